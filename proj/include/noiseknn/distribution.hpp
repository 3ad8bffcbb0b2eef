#pragma once

// One handle over the synthetic families: sampling, the clean and corrupted
// regression functions, the Bayes rule, the density proxy, exact range
// extremes, and excess-risk evaluation (exact atomic sums or Monte Carlo).
//
// Sampling is pure in (seed, draw index): X uses the points stream, the
// clean label the labels stream, and the flip coin the channel stream, so a
// corrupted sample is bit-for-bit the clean sample pushed through the flip
// channel, and trials parallelize without shared state.
//
// Excess risk is ∫ |2η − 1| · 1{φ ≠ φ*} dμ; the equivalent normalization
// 2∫ |η − 1/2| … is the same quantity written with the factor outside.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "noiseknn/dataset.hpp"
#include "noiseknn/error.hpp"
#include "noiseknn/fourpoint.hpp"
#include "noiseknn/gamma.hpp"
#include "noiseknn/hypercube.hpp"
#include "noiseknn/laplace.hpp"
#include "noiseknn/point.hpp"
#include "noiseknn/rng.hpp"
#include "noiseknn/usertable.hpp"

namespace noiseknn {

// Corrupted regression value with the range extremes kept exact: where η
// attains 0 or 1 the affine form can drift by an ulp, but the identities
// inf η̃ = π₀ and sup η̃ = 1 − π₁ are exact by construction, so return the
// identity values directly at the extremes.
inline double eta_tilde_of(double eta, double pi0, double pi1) {
    if (eta == 0.0) return pi0;
    if (eta == 1.0) return 1.0 - pi1;
    return (1.0 - pi0 - pi1) * eta + pi0;
}

class DistributionSpec {
  public:
    using Family =
        std::variant<FourPointFamily, HypercubeFamily, LaplaceLogisticFamily, UserTableFamily>;

    static DistributionSpec four_point(FourPointFamily f, GammaParams g) {
        return DistributionSpec(std::move(f), std::move(g), "four-point");
    }
    static DistributionSpec hypercube(HypercubeFamily f, GammaParams g) {
        return DistributionSpec(std::move(f), std::move(g), "hypercube");
    }
    static DistributionSpec laplace_logistic(LaplaceLogisticFamily f) {
        GammaParams g = f.gamma();
        return DistributionSpec(std::move(f), std::move(g), "laplace-logistic");
    }
    static DistributionSpec user_table(UserTableFamily f, GammaParams g) {
        return DistributionSpec(std::move(f), std::move(g), "user-table");
    }

    const Family& family() const { return family_; }
    const GammaParams& gamma() const { return gamma_; }
    const std::string& name() const { return name_; }

    bool is_atomic() const {
        return !std::holds_alternative<LaplaceLogisticFamily>(family_);
    }

    Metric metric() const {
        return std::visit([](const auto& f) -> Metric { return f.metric(); }, family_);
    }

    double pi0() const {
        return std::visit(
            [](const auto& f) -> double {
                if constexpr (std::is_same_v<std::decay_t<decltype(f)>, HypercubeFamily>)
                    return 0.0;
                else
                    return f.pi0;
            },
            family_);
    }

    double pi1() const {
        return std::visit(
            [](const auto& f) -> double {
                if constexpr (std::is_same_v<std::decay_t<decltype(f)>, HypercubeFamily>)
                    return 0.0;
                else
                    return f.pi1;
            },
            family_);
    }

    // ---------- atomic access ----------

    std::size_t atom_count() const {
        return std::visit(
            [](const auto& f) -> std::size_t {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, FourPointFamily>)
                    return 4;
                else if constexpr (std::is_same_v<F, HypercubeFamily>)
                    return f.atom_count();
                else if constexpr (std::is_same_v<F, UserTableFamily>)
                    return f.atom_count();
                else
                    throw unsupported_error("atom access requires an atomic family");
            },
            family_);
    }

    Point atom(std::size_t index) const {
        return std::visit(
            [index](const auto& f) -> Point {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, FourPointFamily>) {
                    if (index >= 4) throw parameter_error("four-point atom index out of range");
                    return Symbol{static_cast<std::uint32_t>(index)};
                } else if constexpr (std::is_same_v<F, HypercubeFamily>) {
                    return f.atom(index);
                } else if constexpr (std::is_same_v<F, UserTableFamily>) {
                    if (index >= f.atom_count())
                        throw parameter_error("user table atom index out of range");
                    return Symbol{static_cast<std::uint32_t>(index)};
                } else {
                    throw unsupported_error("atom access requires an atomic family");
                }
            },
            family_);
    }

    double atom_mass(std::size_t index) const {
        return std::visit(
            [index](const auto& f) -> double {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, FourPointFamily>) {
                    if (index >= 4) throw parameter_error("four-point atom index out of range");
                    return f.mass[index];
                } else if constexpr (std::is_same_v<F, HypercubeFamily>) {
                    return f.atom_mass(index);
                } else if constexpr (std::is_same_v<F, UserTableFamily>) {
                    if (index >= f.atom_count())
                        throw parameter_error("user table atom index out of range");
                    return f.masses[index];
                } else {
                    throw unsupported_error("atom access requires an atomic family");
                }
            },
            family_);
    }

    double atom_eta(std::size_t index) const {
        return std::visit(
            [index](const auto& f) -> double {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, FourPointFamily>) {
                    if (index >= 4) throw parameter_error("four-point atom index out of range");
                    return f.eta_table[index];
                } else if constexpr (std::is_same_v<F, HypercubeFamily>) {
                    return f.atom_eta(index);
                } else if constexpr (std::is_same_v<F, UserTableFamily>) {
                    if (index >= f.atom_count())
                        throw parameter_error("user table atom index out of range");
                    return f.eta[index];
                } else {
                    throw unsupported_error("atom access requires an atomic family");
                }
            },
            family_);
    }

    // ---------- pointwise functions ----------

    double eta(const Point& x) const {
        return std::visit(
            [&](const auto& f) -> double {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, LaplaceLogisticFamily>) {
                    const auto* rv = std::get_if<RealVector>(&x);
                    if (rv == nullptr)
                        throw kind_mismatch_error(
                            "laplace-logistic expects 1-D real vector points");
                    if (rv->size() != 1)
                        throw kind_mismatch_error(
                            "laplace-logistic expects 1-D real vector points");
                    return f.eta((*rv)[0]);
                } else if constexpr (std::is_same_v<F, HypercubeFamily>) {
                    return f.atom_eta(hypercube_index(f, x));
                } else {
                    return eta_by_symbol(f, x);
                }
            },
            family_);
    }

    double eta_tilde(const Point& x) const { return eta_tilde_of(eta(x), pi0(), pi1()); }

    int bayes(const Point& x) const { return eta(x) >= 0.5 ? 1 : 0; }

    double omega(const Point& x) const {
        return std::visit(
            [&](const auto& f) -> double {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, LaplaceLogisticFamily>) {
                    const auto* rv = std::get_if<RealVector>(&x);
                    if (rv == nullptr || rv->size() != 1)
                        throw kind_mismatch_error(
                            "laplace-logistic expects 1-D real vector points");
                    return f.density((*rv)[0]);
                } else if constexpr (std::is_same_v<F, FourPointFamily>) {
                    const auto* s = std::get_if<Symbol>(&x);
                    if (s == nullptr) throw kind_mismatch_error("four-point expects symbol points");
                    if (s->id >= 4) throw data_error("symbol is not a four-point atom");
                    return f.omega_table[s->id];
                } else if constexpr (std::is_same_v<F, HypercubeFamily>) {
                    return f.atom_omega(hypercube_index(f, x));
                } else {
                    const auto* s = std::get_if<Symbol>(&x);
                    if (s == nullptr) throw kind_mismatch_error("user table expects symbol points");
                    if (s->id >= f.atom_count())
                        throw data_error("symbol is not a user-table atom");
                    return f.omega[s->id];
                }
            },
            family_);
    }

    // Exact extremes of the corrupted regression over the support. For the
    // continuous family the supremum is the unattained limit 1 − π₁ (and the
    // infimum π₀); for atomic families the extremes are scanned directly.
    double true_sup_eta_tilde() const {
        if (!is_atomic()) return 1.0 - pi1();
        double best = 0.0;
        for (std::size_t i = 0; i < atom_count(); ++i)
            best = std::max(best, eta_tilde_of(atom_eta(i), pi0(), pi1()));
        return best;
    }

    double true_inf_eta_tilde() const {
        if (!is_atomic()) return pi0();
        double best = 1.0;
        for (std::size_t i = 0; i < atom_count(); ++i)
            best = std::min(best, eta_tilde_of(atom_eta(i), pi0(), pi1()));
        return best;
    }

    // ---------- sampling ----------

    Dataset sample_clean(std::size_t n, std::uint64_t seed) const {
        return sample(n, seed, /*corrupted=*/false);
    }

    Dataset sample_corrupted(std::size_t n, std::uint64_t seed) const {
        return sample(n, seed, /*corrupted=*/true);
    }

    // Inverse-CDF draw from the marginal: one uniform in, the drawn point
    // and its regression value out. Both the samplers and the Monte-Carlo
    // risk evaluator go through here.
    std::pair<Point, double> draw_from_marginal(double u01) const {
        if (const auto* f = std::get_if<LaplaceLogisticFamily>(&family_)) {
            double x = f->quantile(u01);
            return {RealVector{x}, f->eta(x)};
        }
        std::size_t idx = draw_atom_index(u01);
        return {atom(idx), atom_eta(idx)};
    }

  private:
    DistributionSpec(Family f, GammaParams g, std::string name)
        : family_(std::move(f)), gamma_(std::move(g)), name_(std::move(name)) {
        gamma_.validate();
    }

    template <class F>
    static double eta_by_symbol(const F& f, const Point& x) {
        const auto* s = std::get_if<Symbol>(&x);
        if (s == nullptr) throw kind_mismatch_error("family expects symbol points");
        if constexpr (std::is_same_v<F, FourPointFamily>) {
            if (s->id >= 4) throw data_error("symbol is not a four-point atom");
            return f.eta_table[s->id];
        } else {
            if (s->id >= f.atom_count()) throw data_error("symbol is not a user-table atom");
            return f.eta[s->id];
        }
    }

    // Maps a bit-string point back to the family's atom index (inverse of
    // HypercubeFamily::atom).
    static std::size_t hypercube_index(const HypercubeFamily& f, const Point& x) {
        const auto* bs = std::get_if<BitString>(&x);
        if (bs == nullptr) throw kind_mismatch_error("hypercube expects bit-string points");
        const std::string& b = bs->bits;
        if (b == "0") return 0;
        if (b == "1") return 1;
        if (b.size() != f.l) throw data_error("bit string length does not match the family");
        std::uint64_t value = 0;
        for (char c : b) {
            if (c != '0' && c != '1') throw data_error("bit string must contain only 0 and 1");
            value = value << 1 | static_cast<std::uint64_t>(c == '1');
        }
        const std::uint64_t m = f.m;
        std::size_t k;
        if (value < 2 * m) {
            if (value & 1u) return 2 + static_cast<std::size_t>(value - 1) / 2;  // A♯
            k = static_cast<std::size_t>(value / 2);
        } else {
            k = static_cast<std::size_t>(value - m);
        }
        return 2 + static_cast<std::size_t>(m) + k;
    }

    std::size_t draw_atom_index(double u01) const {
        return std::visit(
            [u01](const auto& f) -> std::size_t {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, FourPointFamily>) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i + 1 < 4; ++i) {
                        acc += f.mass[i];
                        if (u01 < acc) return i;
                    }
                    return 3;
                } else if constexpr (std::is_same_v<F, HypercubeFamily>) {
                    return f.atom_index_from_uniform(u01);
                } else if constexpr (std::is_same_v<F, UserTableFamily>) {
                    double acc = 0.0;
                    const std::size_t k = f.atom_count();
                    for (std::size_t i = 0; i + 1 < k; ++i) {
                        acc += f.masses[i];
                        if (u01 < acc) return i;
                    }
                    return k - 1;
                } else {
                    throw unsupported_error("atom access requires an atomic family");
                }
            },
            family_);
    }

    Dataset sample(std::size_t n, std::uint64_t seed, bool corrupted) const {
        if (n < 1) throw parameter_error("sample size n must be at least 1");
        CounterRng points(seed, RngStream::points);
        CounterRng labels(seed, RngStream::labels);
        CounterRng channel(seed, RngStream::channel);
        const double p0 = pi0(), p1 = pi1();

        std::vector<Point> xs;
        xs.reserve(n);
        std::vector<double> ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto [x, eta_x] = draw_from_marginal(points.uniform01(i));
            xs.push_back(std::move(x));
            int y = labels.bernoulli(eta_x, i) ? 1 : 0;
            if (corrupted) {
                double coin = channel.uniform01(i);
                if (y == 1 && coin < p1) y = 0;
                else if (y == 0 && coin < p0) y = 1;
            }
            ys[i] = static_cast<double>(y);
        }
        return Dataset(std::move(xs), std::move(ys));
    }

    Family family_;
    GammaParams gamma_;
    std::string name_;
};

// ---------- excess risk ----------

// Exact atomic sum of |2η − 1| over the disagreement set; the classifier is
// consulted once per atom.
template <class Phi>
double excess_risk_exact(const DistributionSpec& spec, Phi&& phi) {
    if (!spec.is_atomic())
        throw unsupported_error("exact excess risk requires an atomic family");
    double total = 0.0;
    const std::size_t count = spec.atom_count();
    for (std::size_t i = 0; i < count; ++i) {
        const Point x = spec.atom(i);
        const double eta = spec.atom_eta(i);
        const int star = eta >= 0.5 ? 1 : 0;
        if (phi(x) != star) total += spec.atom_mass(i) * std::fabs(2.0 * eta - 1.0);
    }
    return total;
}

struct MonteCarloRisk {
    double value = 0.0;
    double stderr_value = 0.0;
};

// Monte-Carlo average of the same integrand over fresh X draws (risk
// stream), with the usual sd/sqrt(mc_n) standard error via a streaming
// variance accumulator.
template <class Phi>
MonteCarloRisk excess_risk_mc(const DistributionSpec& spec, Phi&& phi, std::size_t mc_n,
                              std::uint64_t seed) {
    if (mc_n < 1) throw parameter_error("mc_n must be at least 1");
    CounterRng risk(seed, RngStream::risk);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < mc_n; ++i) {
        auto [x, eta] = spec.draw_from_marginal(risk.uniform01(i));
        const int star = eta >= 0.5 ? 1 : 0;
        const double g = phi(x) != star ? std::fabs(2.0 * eta - 1.0) : 0.0;
        const double delta = g - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (g - mean);
    }
    MonteCarloRisk out;
    out.value = mean;
    if (mc_n > 1) {
        const double sd = std::sqrt(m2 / static_cast<double>(mc_n - 1));
        out.stderr_value = sd / std::sqrt(static_cast<double>(mc_n));
    }
    return out;
}

}  // namespace noiseknn
