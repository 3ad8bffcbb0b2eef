#pragma once

// Explicit finite family: the caller supplies atoms (symbols 0..K−1) with
// masses, regression values, density-proxy values, the two flip rates, and
// a full distance table.
//
// Unlike the constructed families, nothing is known analytically here, so
// audit() checks the assumptions themselves by finite enumeration rather
// than a lemma's sufficient conditions:
//   - margin: at each distinct positive gap ε = |η(x) − 1/2|, the cumulative
//     mass of atoms with smaller-or-equal positive gap must be ≤ C_α·ε^α
//     (right-continuity makes these the only critical thresholds);
//   - Hölder: all atom pairs;
//   - minimal mass: per atom, ball masses between consecutive distinct
//     distances below 1;
//   - tail: at each distinct ω value below t_γ;
//   - range: η must attain both 0 and 1 (the ε → 0 limit), and the
//     restricted infima are checked at each distinct ω value below t_τ.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "noiseknn/error.hpp"
#include "noiseknn/gamma.hpp"
#include "noiseknn/point.hpp"

namespace noiseknn {

struct UserTableFamily {
    std::vector<double> masses;  // per atom, summing to 1
    std::vector<double> eta;     // per atom, in [0, 1]
    std::vector<double> omega;   // per atom, in (0, 1]
    double pi0 = 0.0, pi1 = 0.0;
    DiscreteTable table;

    std::size_t atom_count() const { return masses.size(); }

    static UserTableFamily create(std::vector<double> masses, std::vector<double> eta,
                                  std::vector<double> omega, double pi0, double pi1,
                                  DiscreteTable table) {
        const std::size_t k = masses.size();
        if (k == 0) throw parameter_error("user table needs at least one atom");
        if (eta.size() != k || omega.size() != k)
            throw parameter_error("user table masses, eta, and omega must have equal length");
        double total = 0.0;
        for (double m : masses) {
            if (!(m >= 0.0) || !std::isfinite(m))
                throw parameter_error("user table masses must be finite and nonnegative");
            total += m;
        }
        if (std::fabs(total - 1.0) > 1e-12)
            throw parameter_error("user table masses must sum to 1 (1e-12)");
        for (double e : eta)
            if (!(e >= 0.0 && e <= 1.0))
                throw parameter_error("user table eta values must lie in [0, 1]");
        for (double o : omega)
            if (!(o > 0.0 && o <= 1.0))
                throw parameter_error("user table omega values must lie in (0, 1]");
        if (!(pi0 >= 0.0 && pi0 < 1.0) || !(pi1 >= 0.0 && pi1 < 1.0))
            throw parameter_error("user table noise rates must lie in [0, 1)");
        if (!(pi0 + pi1 < 1.0))
            throw parameter_error("user table noise rates must sum below 1");
        if (table.n_atoms != k)
            throw parameter_error("user table distance matrix does not match atom count");
        table.validate();

        UserTableFamily f;
        f.masses = std::move(masses);
        f.eta = std::move(eta);
        f.omega = std::move(omega);
        f.pi0 = pi0;
        f.pi1 = pi1;
        f.table = std::move(table);
        return f;
    }

    DiscreteTable metric() const { return table; }

    AssumptionAudit audit(const GammaParams& g) const {
        g.validate();
        AssumptionAudit a;
        const std::size_t k = atom_count();

        a.add("noise: pi0 + pi1 <= nu_max", pi0 + pi1 <= g.nu_max);

        // Margin: scan atoms by increasing positive gap from 1/2.
        {
            std::vector<std::pair<double, double>> gaps;  // (gap, mass)
            for (std::size_t i = 0; i < k; ++i) {
                double gap = std::fabs(eta[i] - 0.5);
                if (gap > 0.0) gaps.push_back({gap, masses[i]});
            }
            std::sort(gaps.begin(), gaps.end());
            bool ok = true;
            double cum = 0.0;
            for (std::size_t i = 0; i < gaps.size(); ++i) {
                cum += gaps[i].second;
                if (i + 1 < gaps.size() && gaps[i + 1].first == gaps[i].first) continue;
                if (!audit_leq(cum, g.C_alpha * std::pow(gaps[i].first, g.alpha))) ok = false;
            }
            a.add("margin: mu(0 < |eta - 1/2| <= eps) <= C_alpha * eps^alpha at each gap", ok);
        }

        // Hölder: every pair.
        {
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i)
                for (std::size_t j = i + 1; j < k; ++j)
                    if (!audit_leq(std::fabs(eta[i] - eta[j]),
                                   g.C_beta * std::pow(table.at(i, j), g.beta))) {
                        ok = false;
                        break;
                    }
            a.add("holder: |eta(x) - eta(y)| <= C_beta * rho(x,y)^beta for all pairs", ok);
        }

        // Minimal mass: for each atom, the ball mass at each distinct radius
        // below 1 must dominate omega * r^d up to the next radius.
        {
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i) {
                std::vector<std::pair<double, double>> by_dist;  // (distance, mass)
                for (std::size_t j = 0; j < k; ++j) by_dist.push_back({table.at(i, j), masses[j]});
                std::sort(by_dist.begin(), by_dist.end());
                double ball = 0.0;
                for (std::size_t j = 0; j < by_dist.size(); ++j) {
                    ball += by_dist[j].second;
                    if (j + 1 < by_dist.size() && by_dist[j + 1].first == by_dist[j].first)
                        continue;
                    double next = j + 1 < by_dist.size() ? by_dist[j + 1].first : 1.0;
                    if (next > 1.0) next = 1.0;
                    if (by_dist[j].first >= 1.0) break;
                    if (!audit_leq(omega[i] * std::pow(next, g.d), ball)) {
                        ok = false;
                        break;
                    }
                }
            }
            a.add("minimal-mass: mu(B_r(x)) >= omega(x) * r^d for r in (0,1), all atoms", ok);
        }

        // Tail: at each distinct omega value below t_gamma.
        {
            std::vector<std::pair<double, double>> by_omega;  // (omega, mass)
            for (std::size_t i = 0; i < k; ++i) by_omega.push_back({omega[i], masses[i]});
            std::sort(by_omega.begin(), by_omega.end());
            bool ok = true;
            double cum = 0.0;
            for (std::size_t i = 0; i < by_omega.size(); ++i) {
                cum += by_omega[i].second;
                if (i + 1 < by_omega.size() && by_omega[i + 1].first == by_omega[i].first)
                    continue;
                if (by_omega[i].first >= g.t_gamma) break;
                if (!audit_leq(cum, g.C_gamma * std::pow(by_omega[i].first, g.gamma)))
                    ok = false;
            }
            a.add("tail: mu(omega <= eps) <= C_gamma * eps^gamma below t_gamma", ok);
        }

        // Quantitative range: eta must attain 0 and 1 somewhere (the eps -> 0
        // limit of the condition), then check restricted infima at each
        // distinct omega threshold below t_tau.
        {
            bool attains0 = false, attains1 = false;
            for (std::size_t i = 0; i < k; ++i) {
                if (eta[i] == 0.0) attains0 = true;
                if (eta[i] == 1.0) attains1 = true;
            }
            a.add("range: eta attains 0 and 1 on the support", attains0 && attains1);

            std::vector<double> levels(omega);
            std::sort(levels.begin(), levels.end());
            levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
            bool ok = true;
            for (double eps : levels) {
                if (eps >= g.t_tau) break;
                double lo = 1.0, hi = 0.0;
                bool any = false;
                for (std::size_t i = 0; i < k; ++i)
                    if (omega[i] > eps) {
                        lo = std::min(lo, eta[i]);
                        hi = std::max(hi, eta[i]);
                        any = true;
                    }
                if (!any) break;
                double value = std::max(lo, 1.0 - hi);
                if (!audit_leq(value, g.C_tau * std::pow(eps, g.tau))) ok = false;
            }
            a.add("range: max{inf eta, inf 1-eta} over {omega > eps} <= C_tau * eps^tau", ok);
        }

        return a;
    }
};

}  // namespace noiseknn
