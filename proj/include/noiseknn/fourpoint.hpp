#pragma once

// Four-atom discrete family with asymmetric class-conditional label noise.
//
// The space is X = {a, b, c, d} (symbol ids 0..3) with ρ(a,b) = r and every
// other distinct pair at distance 1. Two variants ι ∈ {0, 1} share the
// marginal μ = (u, 1/3, v, 2/3−u−v) and the density proxy ω = (w, 1/3, v, 1/3)
// but differ in the regression table and in the label-noise rates:
//
//   η⁰ = (1, 1−Δ, (1−Δ)/(2−Δ), 0)      π₀ = 0,  π₁ = ν_max/4
//   η¹ = (1, 1,   1/(2−Δ),     0)      π₀ = 0,  π₁ = Δ + (ν_max/4)(1−Δ)
//
// The pair is built so both corrupted distributions agree everywhere except
// atom a, where the corrupted regressions differ by (1−ν_max/4)·Δ, while the
// clean Bayes labels at atom c disagree: φ*(c) = ι. Telling the variants
// apart is therefore statistically hard exactly when classifying c is, which
// is what makes the pair a stress test for noise-rate recovery.
//
// lb_parameters_unknown_noise(n, g) instantiates both variants at the
// sample-size-dependent schedule
//
//   Δ = 6^(−(1+1/α+τ)) · ν_max · (2n)^(−τβ/(τ(2β+d)+β)),
//   r = Δ^(1/β),  u = Δ^((β+τd)/(τβ)),  v = Δ^α,  w = Δ^(1/τ),
//
// which keeps the quintuple inside (0, 1/6)⁵ and satisfies both the audit
// inequalities and the indistinguishability budget 8nuΔ² ≤ ν_max for every
// admissible Γ and n ≥ 1. Any derived value escaping (0, 1/6) — e.g. α = 0
// forcing v = 1, or τ = +inf collapsing Δ to 0 — is rejected with the
// violated constraint named rather than silently clamped.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "noiseknn/error.hpp"
#include "noiseknn/gamma.hpp"
#include "noiseknn/point.hpp"

namespace noiseknn {

struct FourPointFamily {
    // Atom order everywhere: a = 0, b = 1, c = 2, d = 3.
    static constexpr std::size_t kAtomA = 0;
    static constexpr std::size_t kAtomB = 1;
    static constexpr std::size_t kAtomC = 2;
    static constexpr std::size_t kAtomD = 3;

    int iota = 0;
    double delta = 0.0, r = 0.0, u = 0.0, v = 0.0, w = 0.0;
    double nu_max = 0.0;

    std::array<double, 4> mass{};         // μ per atom
    std::array<double, 4> eta_table{};    // η^ι per atom
    std::array<double, 4> omega_table{};  // ω per atom
    double pi0 = 0.0, pi1 = 0.0;

    static FourPointFamily create(int iota, double delta, double r, double u, double v,
                                  double w, double nu_max) {
        if (iota != 0 && iota != 1)
            throw parameter_error("four-point iota must be 0 or 1, got " + std::to_string(iota));
        if (!(nu_max > 0.0 && nu_max < 1.0))
            throw parameter_error("four-point nu_max must lie in (0, 1)");
        auto in_range = [](double x) { return x > 0.0 && x < 1.0 / 6.0; };
        auto reject = [](const char* name, double x) {
            throw parameter_error(std::string("four-point parameter ") + name + " = " +
                                  std::to_string(x) + " must lie in (0, 1/6)");
        };
        if (!in_range(delta)) reject("Delta", delta);
        if (!in_range(r)) reject("r", r);
        if (!in_range(u)) reject("u", u);
        if (!in_range(v)) reject("v", v);
        if (!in_range(w)) reject("w", w);

        FourPointFamily f;
        f.iota = iota;
        f.delta = delta;
        f.r = r;
        f.u = u;
        f.v = v;
        f.w = w;
        f.nu_max = nu_max;
        f.mass = {u, 1.0 / 3.0, v, 2.0 / 3.0 - u - v};
        if (iota == 0)
            f.eta_table = {1.0, 1.0 - delta, (1.0 - delta) / (2.0 - delta), 0.0};
        else
            f.eta_table = {1.0, 1.0, 1.0 / (2.0 - delta), 0.0};
        f.omega_table = {w, 1.0 / 3.0, v, 1.0 / 3.0};
        f.pi0 = 0.0;
        f.pi1 = iota == 0 ? nu_max / 4.0 : delta + (nu_max / 4.0) * (1.0 - delta);
        return f;
    }

    DiscreteTable metric() const {
        DiscreteTable t;
        t.n_atoms = 4;
        t.dist.assign(16, 1.0);
        for (std::size_t i = 0; i < 4; ++i) t.dist[i * 4 + i] = 0.0;
        t.dist[kAtomA * 4 + kAtomB] = r;
        t.dist[kAtomB * 4 + kAtomA] = r;
        return t;
    }

    // Checks the sufficient conditions under which both variants satisfy
    // every assumption encoded by g. Each item is one inequality, evaluated
    // through audit_leq because the derived schedule meets several of them
    // with exact-arithmetic equality.
    AssumptionAudit audit(const GammaParams& g) const {
        g.validate();
        AssumptionAudit a;
        a.add("noise: Delta <= nu_max/2", audit_leq(delta, nu_max / 2.0));
        a.add("margin: C_alpha >= 4^alpha", audit_leq(std::pow(4.0, g.alpha), g.C_alpha));
        a.add("margin: v <= Delta^alpha", audit_leq(v, std::pow(delta, g.alpha)));
        a.add("holder: Delta <= C_beta * r^beta",
              audit_leq(delta, g.C_beta * std::pow(r, g.beta)));
        a.add("minimal-mass: u >= w * r^d", audit_leq(w * std::pow(r, g.d), u));
        a.add("tail: gamma <= 1", g.gamma <= 1.0);
        a.add("tail: t_gamma <= 1/3", g.t_gamma <= 1.0 / 3.0);
        a.add("tail: u <= w", audit_leq(u, w));
        a.add("range: t_tau <= 1/3", g.t_tau <= 1.0 / 3.0);
        // pow(w, +inf) = 0 for w < 1, so the τ = +inf case fails naturally.
        a.add("range: Delta <= C_tau * w^tau",
              audit_leq(delta, g.C_tau * std::pow(w, g.tau)));
        double total = 0.0;
        for (double m : mass) total += m;
        a.add("mass: atom masses sum to 1 (1e-12)", std::fabs(total - 1.0) <= 1e-12);
        return a;
    }
};

// Sample-size-dependent instantiation of the hard pair (ι = 0, ι = 1). Both
// share μ, ω, and the metric; they differ in η and π₁. Throws parameter_error
// naming the first derived value that leaves (0, 1/6).
inline std::pair<FourPointFamily, FourPointFamily> lb_parameters_unknown_noise(
    std::size_t n, const GammaParams& g) {
    g.validate();
    if (n < 1) throw parameter_error("sample size n must be at least 1");
    const double expo = g.tau * g.beta / (g.tau * (2.0 * g.beta + g.d) + g.beta);
    const double delta = std::pow(6.0, -(1.0 + 1.0 / g.alpha + g.tau)) * g.nu_max *
                         std::pow(2.0 * static_cast<double>(n), -expo);
    const double r = std::pow(delta, 1.0 / g.beta);
    const double u = std::pow(delta, (g.beta + g.tau * g.d) / (g.tau * g.beta));
    const double v = std::pow(delta, g.alpha);
    const double w = std::pow(delta, 1.0 / g.tau);

    auto pair = std::make_pair(FourPointFamily::create(0, delta, r, u, v, w, g.nu_max),
                               FourPointFamily::create(1, delta, r, u, v, w, g.nu_max));

    // The indistinguishability budget behind the schedule; it holds
    // identically under the formulas above, so a violation means the inputs
    // were outside the ranges this construction is defined for.
    if (!(8.0 * static_cast<double>(n) * u * delta * delta <= g.nu_max))
        throw parameter_error("four-point schedule violates 8*n*u*Delta^2 <= nu_max");
    return pair;
}

}  // namespace noiseknn
