#pragma once

// Lower-confidence-bound estimator of M(f) = sup f over the support, and
// the noise-rate recovery built on it.
//
//   M̂_{n,δ}(f) = max over (i,k) in [n]² of { f̂_{n,k}(X_i) − sqrt(ln(4n/δ)/k) }
//
// The penalty here is sqrt(ln(4n/δ)/k) — there is NO factor 2 under the
// root, unlike the Lepski band half-width; the two must not share a
// formula. k runs over all of 1..n (no Lepski floor), per the definition.
//
// The (i,k) scan is O(n²) after neighbor ordering. Three orderings are
// used, all bit-identical to sorting each row from scratch:
//   * 1-D vectors: one shared sorted line, two-pointer merge per row;
//   * symbol/bitstring datasets: rows keyed by point content — duplicate
//     atoms have identical distance profiles AND identical index
//     tie-breaks, hence identical rows — so each distinct atom is swept
//     once;
//   * anything else: a heap sweep per row.
// Ties in the max are resolved (highest value, then lowest i, then lowest
// k), which the ascending scans realise with strict ">" updates.

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "noiseknn/dataset.hpp"
#include "noiseknn/error.hpp"
#include "noiseknn/lepski.hpp"
#include "noiseknn/neighbor.hpp"
#include "noiseknn/point.hpp"

namespace noiseknn {

struct SupEstimate {
    double value = 0.0;
    std::size_t argmax_index = 0;  // 1-based sample number i*
    std::size_t k_at_max = 0;      // k*
};

// Penalty table: pen[k] = sqrt(ln(4n/δ)/k), k = 1..n.
inline std::vector<double> sup_penalties(std::size_t n, double delta) {
    check_delta(delta);
    const double lt = band_log_term(n, delta);
    std::vector<double> pen(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k)
        pen[k] = std::sqrt(lt / static_cast<double>(k));
    return pen;
}

namespace detail {

struct RowBest {
    double value;
    std::size_t k;
};

// Best penalised prefix mean over k for one row; ascending k with strict
// ">" picks the lowest maximising k.
template <class Sweep>
RowBest sup_row(std::size_t n, const std::vector<double>& z, const std::vector<double>& pen,
                Sweep&& sweep) {
    double sum = 0.0;
    RowBest best{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t k = 1; k <= n; ++k) {
        sum += z[sweep.next()];
        const double v = sum / static_cast<double>(k) - pen[k];
        if (v > best.value) best = RowBest{v, k};
    }
    return best;
}

// Fused variant for binary responses: one sweep yields the best for the
// responses and for their complement. Prefix sums are exact integers, so
// (k−c)/k matches what a literal pass over 1−Z responses would compute.
struct RowBestPair {
    RowBest pos{-std::numeric_limits<double>::infinity(), 0};
    RowBest neg{-std::numeric_limits<double>::infinity(), 0};
};

template <class Sweep>
RowBestPair sup_row_binary(std::size_t n, const std::vector<double>& z,
                           const std::vector<double>& pen, Sweep&& sweep) {
    std::uint64_t ones = 0;
    RowBestPair best;
    for (std::size_t k = 1; k <= n; ++k) {
        ones += z[sweep.next()] == 1.0 ? 1u : 0u;
        const double kd = static_cast<double>(k);
        const double p = static_cast<double>(ones) / kd - pen[k];
        const double q = static_cast<double>(k - ones) / kd - pen[k];
        if (p > best.pos.value) best.pos = RowBest{p, k};
        if (q > best.neg.value) best.neg = RowBest{q, k};
    }
    return best;
}

// Runs `row(i) -> RowBest-like` over all sample points with the cheapest
// applicable ordering backend, folding with the (value, i, k) tie order.
// RowFn receives a ready-to-pull sweep for sample point i.
template <class Result, class RowFn>
Result sup_scan(const Dataset& ds, const Metric& m, RowFn&& row) {
    const std::size_t n = ds.size();
    Result out{};
    if (ds.point_kind() == PointKind::real_vector && ds.dimension() == 1) {
        const SortedLine line = SortedLine::build(ds);
        for (std::size_t i = 0; i < n; ++i) {
            LineSweep sweep(line, std::get<RealVector>(ds.point(i))[0]);
            out.fold(row(sweep), i);
        }
    } else if (ds.point_kind() != PointKind::real_vector) {
        // Atomic space: memoise per distinct point content.
        using Row = decltype(row(std::declval<HeapSweep&>()));
        std::unordered_map<Point, Row, PointHash> memo;
        for (std::size_t i = 0; i < n; ++i) {
            auto it = memo.find(ds.point(i));
            if (it == memo.end()) {
                HeapSweep sweep(ds, m, ds.point(i));
                it = memo.emplace(ds.point(i), row(sweep)).first;
            }
            out.fold(it->second, i);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            HeapSweep sweep(ds, m, ds.point(i));
            out.fold(row(sweep), i);
        }
    }
    return out;
}

struct FoldSingle {
    SupEstimate best{-std::numeric_limits<double>::infinity(), 0, 0};
    void fold(const RowBest& r, std::size_t i) {
        if (r.value > best.value) best = SupEstimate{r.value, i + 1, r.k};
    }
};

struct FoldPair {
    SupEstimate pos{-std::numeric_limits<double>::infinity(), 0, 0};
    SupEstimate neg{-std::numeric_limits<double>::infinity(), 0, 0};
    void fold(const RowBestPair& r, std::size_t i) {
        if (r.pos.value > pos.value) pos = SupEstimate{r.pos.value, i + 1, r.pos.k};
        if (r.neg.value > neg.value) neg = SupEstimate{r.neg.value, i + 1, r.neg.k};
    }
};

}  // namespace detail

inline SupEstimate sup_estimate(const Dataset& ds, const Metric& m, double delta) {
    const std::size_t n = ds.size();
    const std::vector<double> pen = sup_penalties(n, delta);
    auto fold = detail::sup_scan<detail::FoldSingle>(ds, m, [&](auto& sweep) {
        return detail::sup_row(n, ds.responses(), pen, sweep);
    });
    return fold.best;
}

// M̂ of the complement 1−f; the implied lower bound on inf f is 1 − value.
inline SupEstimate inf_estimate(const Dataset& ds, const Metric& m, double delta) {
    return sup_estimate(ds.complemented(), m, delta);
}

// Both extremum estimates from one fused pass; binary responses only.
struct SupPair {
    SupEstimate sup;         // M̂ of the responses
    SupEstimate complement;  // M̂ of 1 − responses
};

inline SupPair sup_pair_binary(const Dataset& ds, const Metric& m, double delta) {
    require_binary(ds, "fused extremum estimation");
    const std::size_t n = ds.size();
    const std::vector<double> pen = sup_penalties(n, delta);
    auto fold = detail::sup_scan<detail::FoldPair>(ds, m, [&](auto& sweep) {
        return detail::sup_row_binary(n, ds.responses(), pen, sweep);
    });
    return SupPair{fold.pos, fold.neg};
}

// ------------------------------------------------------------ noise rates

struct NoiseRates {
    double pi0 = 0.0;
    double pi1 = 0.0;
    bool clipped = false;  // raw estimates were projected into range
    bool sum_ok = true;    // pi0 + pi1 < 1 without the rescue rescale
};

inline constexpr double kNoiseRateClip = 1e-6;

// π̂₁ = 1 − M̂(f), π̂₀ = 1 − M̂(1−f), each then projected to [0, 0.5−ε].
// After per-rate clipping the sum is at most 1−2ε, so the proportional
// rescale below is unreachable; it stays as written for defence in depth
// and to make sum_ok meaningful if the projection rule ever changes.
inline NoiseRates estimate_noise_rates(const Dataset& ds, const Metric& m, double delta) {
    require_binary(ds, "noise-rate estimation");
    const SupPair pair = sup_pair_binary(ds, m, delta);
    NoiseRates out;
    out.pi1 = 1.0 - pair.sup.value;
    out.pi0 = 1.0 - pair.complement.value;
    const double hi = 0.5 - kNoiseRateClip;
    for (double* p : {&out.pi0, &out.pi1}) {
        if (*p < 0.0) { *p = 0.0; out.clipped = true; }
        if (*p > hi)  { *p = hi;  out.clipped = true; }
    }
    if (out.pi0 + out.pi1 >= 1.0 - kNoiseRateClip) {
        const double scale = (1.0 - kNoiseRateClip) / (out.pi0 + out.pi1);
        out.pi0 *= scale;
        out.pi1 *= scale;
        out.sum_ok = false;
    }
    return out;
}

}  // namespace noiseknn
