#pragma once

// Noiseless bit-string family over an ultrametric cube with two anchors.
//
// The space is X = A ∪ {"0", "1"} where A = {0,1}^l. The two length-one
// strings act as anchors pinning the regression range: η("0") = 0 and
// η("1") = 1, each carrying mass 1/3. Distances inside A are 2^(−lcp/d)
// (lcp = longest common prefix); any pair involving an anchor is at
// distance 1 (see HypercubeUltrametric).
//
// A distinguished subset A♯ of m strings, all ending in '1', carries the
// signal: η = (1 + Δ·g_j)/2 on the j-th member with signs g_j ∈ {−1,+1},
// and η = 1/2 on the rest of A. Labels are never flipped (Ỹ = Y), so this
// family exercises the pipeline with the noise rates known to be zero.
//
// Atom indexing (used by masses, η, ω, and the sampler):
//   0            anchor "0"
//   1            anchor "1"
//   2 .. m+1     A♯ member j = index−2, the bit string of value 2j+1
//                (the lexicographically first m strings ending in '1')
//   m+2 ..       A∖A♯ member k = index−2−m, the bit string of value
//                2k for k < m (even values below 2m) and k+m otherwise
//
// lb_parameters_hypercube(n, g, seed) instantiates the family at the
// sample-size-dependent schedule
//
//   l = ⌈(dγ/(γ(2β+d)+αβ)) · ln(2n)/ln 2⌉ + 1,   Δ = 2^(−lβ/d),
//   w = (1/3)·Δ^(α/γ),
//   m = ⌊min{1/2, 2^(−α), 24^(−γ)} · Δ^(−(αβ+γ(d−αβ))/(γβ))⌋,
//
// with the m signs drawn from the seeded counter RNG (one word per sign).
// Requires αβ ≤ d; if the floor makes m = 0 the sample size is too small
// for the construction and a typed error says so.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "noiseknn/error.hpp"
#include "noiseknn/gamma.hpp"
#include "noiseknn/point.hpp"
#include "noiseknn/rng.hpp"

namespace noiseknn {

namespace detail {

// Fixed-width big-endian rendering of a value as a bit string.
inline std::string bits_of_value(std::uint64_t value, std::size_t width) {
    std::string s(width, '0');
    for (std::size_t q = 0; q < width; ++q)
        if (value >> (width - 1 - q) & 1u) s[q] = '1';
    return s;
}

}  // namespace detail

struct HypercubeFamily {
    std::size_t l = 2;        // bit-string length, >= 2
    double w = 1.0 / 3.0;     // mass scale on A♯, in (0, 1/3]
    double delta = 0.0;       // regression gap on A♯, in [0, 1]
    std::size_t m = 0;        // |A♯|, <= 2^(l−1)
    double d = 1.0;           // metric dimension, > 0
    std::vector<int> signs;   // size m, entries ±1

    double mass_sharp = 0.0;  // μ per A♯ atom: w·2^(−l)
    double mass_rest = 0.0;   // μ per A∖A♯ atom: (1 − 3mw·2^(−l)) / (3(2^l − m))

    static HypercubeFamily create(std::size_t l, double w, double delta, std::size_t m,
                                  double d, std::vector<int> signs) {
        if (l < 2) throw parameter_error("hypercube l must be at least 2");
        if (l > 62) throw parameter_error("hypercube l must be at most 62");
        if (!(w > 0.0 && w <= 1.0 / 3.0))
            throw parameter_error("hypercube w must lie in (0, 1/3]");
        if (!(delta >= 0.0 && delta <= 1.0))
            throw parameter_error("hypercube Delta must lie in [0, 1]");
        const std::uint64_t half = std::uint64_t{1} << (l - 1);
        if (m > half)
            throw parameter_error("hypercube m must be at most 2^(l-1), got " +
                                  std::to_string(m));
        if (!(d > 0.0)) throw parameter_error("hypercube d must be positive");
        if (signs.size() != m)
            throw parameter_error("hypercube sign vector must have exactly m entries");
        for (int s : signs)
            if (s != -1 && s != 1)
                throw parameter_error("hypercube signs must be -1 or +1");

        HypercubeFamily f;
        f.l = l;
        f.w = w;
        f.delta = delta;
        f.m = m;
        f.d = d;
        f.signs = std::move(signs);
        const double pow2l = std::ldexp(1.0, static_cast<int>(l));  // 2^l, exact
        f.mass_sharp = w / pow2l;
        f.mass_rest = (1.0 - 3.0 * static_cast<double>(m) * f.mass_sharp) /
                      (3.0 * (pow2l - static_cast<double>(m)));
        return f;
    }

    HypercubeUltrametric metric() const { return HypercubeUltrametric{d}; }

    std::size_t atom_count() const { return (std::size_t{1} << l) + 2; }

    Point atom(std::size_t index) const {
        check_index(index);
        if (index == 0) return BitString{"0"};
        if (index == 1) return BitString{"1"};
        const std::size_t j = index - 2;
        std::uint64_t value;
        if (j < m) {
            value = 2 * static_cast<std::uint64_t>(j) + 1;
        } else {
            const std::size_t k = j - m;
            value = k < m ? 2 * static_cast<std::uint64_t>(k)
                          : static_cast<std::uint64_t>(k + m);
        }
        return BitString{detail::bits_of_value(value, l)};
    }

    double atom_mass(std::size_t index) const {
        check_index(index);
        if (index < 2) return 1.0 / 3.0;
        return index - 2 < m ? mass_sharp : mass_rest;
    }

    double atom_eta(std::size_t index) const {
        check_index(index);
        if (index == 0) return 0.0;
        if (index == 1) return 1.0;
        const std::size_t j = index - 2;
        if (j < m) return (1.0 + delta * static_cast<double>(signs[j])) / 2.0;
        return 0.5;
    }

    double atom_omega(std::size_t index) const {
        check_index(index);
        if (index < 2) return 1.0 / 3.0;
        return index - 2 < m ? w / 8.0 : 1.0 / 24.0;
    }

    // O(1) inverse-CDF lookup matching the atom indexing above: the anchors
    // occupy [0, 1/3) and [1/3, 2/3), then A♯ uniformly, then A∖A♯ uniformly.
    std::size_t atom_index_from_uniform(double u01) const {
        if (u01 < 1.0 / 3.0) return 0;
        if (u01 < 2.0 / 3.0) return 1;
        const double md = static_cast<double>(m);
        const double sharp_total = md * mass_sharp;
        double off = u01 - 2.0 / 3.0;
        if (off < sharp_total) {
            auto j = static_cast<std::size_t>(off / mass_sharp);
            return 2 + (j >= m ? m - 1 : j);
        }
        off -= sharp_total;
        const std::size_t rest = (std::size_t{1} << l) - m;
        auto k = static_cast<std::size_t>(off / mass_rest);
        return 2 + m + (k >= rest ? rest - 1 : k);
    }

    // Sufficient conditions from the admissibility lemma for this family.
    // Items without an inequality hold by construction and are recorded for
    // completeness.
    AssumptionAudit audit(const GammaParams& g) const {
        g.validate();
        AssumptionAudit a;
        const double pow2l = std::ldexp(1.0, static_cast<int>(l));
        const double mw2l = static_cast<double>(m) * w / pow2l;
        a.add("noise: labels never flipped (holds by construction)", true);
        a.add("margin: m*w*2^(-l) <= C_alpha * (Delta/2)^alpha",
              audit_leq(mw2l, g.C_alpha * std::pow(delta / 2.0, g.alpha)));
        a.add("holder: Delta <= C_beta * 2^(-(l-1)*beta/d)",
              audit_leq(delta,
                        g.C_beta * std::pow(2.0, -static_cast<double>(l - 1) * g.beta / g.d)));
        a.add("minimal-mass: holds by construction", true);
        a.add("tail: t_gamma <= 1/24", g.t_gamma <= 1.0 / 24.0);
        a.add("tail: m*w*2^(-l) <= C_gamma * (w/8)^gamma",
              audit_leq(mw2l, g.C_gamma * std::pow(w / 8.0, g.gamma)));
        a.add("range: t_tau <= 1/3", g.t_tau <= 1.0 / 3.0);
        double total = 2.0 / 3.0 + static_cast<double>(m) * mass_sharp +
                       (pow2l - static_cast<double>(m)) * mass_rest;
        a.add("mass: atom masses sum to 1 (1e-12)", std::fabs(total - 1.0) <= 1e-12);
        return a;
    }

  private:
    void check_index(std::size_t index) const {
        if (index >= atom_count())
            throw parameter_error("hypercube atom index out of range");
    }
};

// Sample-size-dependent instantiation with seeded signs. Requires αβ ≤ d;
// rejects sample sizes for which the floored m vanishes.
inline HypercubeFamily lb_parameters_hypercube(std::size_t n, const GammaParams& g,
                                               std::uint64_t seed) {
    g.validate();
    if (n < 1) throw parameter_error("sample size n must be at least 1");
    if (!(g.alpha * g.beta <= g.d))
        throw parameter_error("hypercube schedule requires alpha*beta <= d");
    if (std::isinf(g.tau))
        throw parameter_error("hypercube schedule requires finite tau");

    const double coef = g.d * g.gamma / (g.gamma * (2.0 * g.beta + g.d) + g.alpha * g.beta);
    const double n2 = 2.0 * static_cast<double>(n);
    const auto l = static_cast<std::size_t>(std::ceil(coef * std::log(n2) / std::log(2.0))) + 1;
    if (l > 62) throw parameter_error("hypercube schedule: n too large (l exceeds 62)");
    const double delta = std::pow(2.0, -static_cast<double>(l) * g.beta / g.d);
    const double w = (1.0 / 3.0) * std::pow(delta, g.alpha / g.gamma);
    const double cap = std::min(std::min(0.5, std::pow(2.0, -g.alpha)), std::pow(24.0, -g.gamma));
    const double m_exp = (g.alpha * g.beta + g.gamma * (g.d - g.alpha * g.beta)) / (g.gamma * g.beta);
    const double m_real = cap * std::pow(delta, -m_exp);
    if (!(m_real >= 1.0))
        throw parameter_error("hypercube schedule: n too small (derived m is below 1)");
    const auto m = static_cast<std::size_t>(std::floor(m_real));
    if (m > (std::size_t{1} << (l - 1)))
        throw parameter_error("hypercube schedule violates m <= 2^(l-1)");

    CounterRng rng(seed, RngStream::signs);
    std::vector<int> signs(m);
    for (std::size_t j = 0; j < m; ++j) signs[j] = rng.word(j) & 1u ? 1 : -1;
    return HypercubeFamily::create(l, w, delta, m, g.d, std::move(signs));
}

}  // namespace noiseknn
