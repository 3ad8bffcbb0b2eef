#pragma once

// Hoeffding confidence bands and Lepski's rule for choosing k pointwise.
//
// For a query x the band at k is  f̂_{n,k}(x) ± sqrt(2·ln(4n/δ)/k)  and the
// selected k̂ is the largest k in [k_min, k_max] such that the bands for
// every q in [k_min, k] still share a point, where
//
//   k_min = ceil(8·ln(2n/δ)),   k_max = floor(n/2).
//
// "log" means natural log throughout. The running intersection [L, U] only
// shrinks as k grows, so the sweep may stop at the first empty k and
// report k-1; at k_min itself a single band is trivially nonempty.
//
// When k_min > k_max (n too small for the band construction) the rule
// degenerates; we return the global mean with fallback_used set instead of
// erroring, so the harness stays total.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "noiseknn/dataset.hpp"
#include "noiseknn/error.hpp"
#include "noiseknn/neighbor.hpp"

namespace noiseknn {

struct LepskiConfig {
    double delta = 0.1;
};

inline void check_delta(double delta) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw parameter_error("delta must lie in (0, 1)");
}

// ln(4n/δ); shared by ci_halfwidth and the precomputed plan so both round
// identically.
inline double band_log_term(std::size_t n, double delta) {
    return std::log(4.0 * static_cast<double>(n) / delta);
}

inline std::size_t lepski_k_min(std::size_t n, double delta) {
    check_delta(delta);
    double raw = std::ceil(8.0 * std::log(2.0 * static_cast<double>(n) / delta));
    return static_cast<std::size_t>(raw);
}

inline std::size_t lepski_k_max(std::size_t n) { return n / 2; }

// Half-width of the k-NN confidence band: sqrt(2·ln(4n/δ)/k).
inline double ci_halfwidth(std::size_t n, std::size_t k, double delta) {
    check_delta(delta);
    if (n < 1) throw parameter_error("n must be positive");
    if (k < 1 || k > n) throw parameter_error("k out of range [1, n] in ci_halfwidth");
    return std::sqrt(2.0 * band_log_term(n, delta) / static_cast<double>(k));
}

struct LepskiEstimate {
    double value = 0.0;               // f̂ at k_selected (global mean under fallback)
    std::size_t k_selected = 0;
    std::size_t intervals_checked = 0;  // bands folded into the intersection
    bool fallback_used = false;
};

// Widths precomputed once per (n, delta); what repeated-query callers keep
// around. Entries are the same expression ci_halfwidth evaluates, so the
// two agree bitwise.
struct LepskiPlan {
    std::size_t n = 0;
    std::size_t k_min = 0;
    std::size_t k_max = 0;
    bool fallback = false;
    double delta = 0.0;
    std::vector<double> halfwidth;  // [k] for k in [k_min, k_max]

    static LepskiPlan build(std::size_t n, double delta) {
        check_delta(delta);
        if (n < 1) throw parameter_error("n must be positive");
        LepskiPlan p;
        p.n = n;
        p.delta = delta;
        p.k_min = lepski_k_min(n, delta);
        p.k_max = lepski_k_max(n);
        p.fallback = p.k_min > p.k_max;
        if (!p.fallback) {
            const double lt = band_log_term(n, delta);
            p.halfwidth.assign(p.k_max + 1, 0.0);
            for (std::size_t k = p.k_min; k <= p.k_max; ++k)
                p.halfwidth[k] = std::sqrt(2.0 * lt / static_cast<double>(k));
        }
        return p;
    }
};

// Shared sweep. mean_at(k) must return the prefix mean of the k nearest
// responses and is called for k = 1, 2, ... in order exactly once each, so
// pull-based callers can accumulate their running sum inside it.
template <class MeanAt>
LepskiEstimate lepski_sweep(const LepskiPlan& plan, MeanAt&& mean_at) {
    if (plan.fallback) {
        double m = 0.0;
        for (std::size_t k = 1; k <= plan.n; ++k) m = mean_at(k);
        return LepskiEstimate{m, plan.n, 0, true};
    }
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double prev = 0.0;
    std::size_t checked = 0;
    for (std::size_t k = 1; k <= plan.k_max; ++k) {
        const double m = mean_at(k);
        if (k < plan.k_min) continue;
        const double w = plan.halfwidth[k];
        if (m - w > lo) lo = m - w;
        if (m + w < hi) hi = m + w;
        ++checked;
        if (lo > hi)  // bands no longer intersect; k-1 was the last good k
            return LepskiEstimate{prev, k - 1, checked, false};
        prev = m;
    }
    return LepskiEstimate{prev, plan.k_max, checked, false};
}

// Contract entry point over an eager NeighborOrder.
inline LepskiEstimate lepski_select(const NeighborOrder& no, const LepskiConfig& cfg) {
    const std::size_t n = no.prefix_means.size();
    const LepskiPlan plan = LepskiPlan::build(n, cfg.delta);
    return lepski_sweep(plan, [&no](std::size_t k) { return no.prefix_means[k - 1]; });
}

// Lazy variant over a sweep backend; bit-identical to lepski_select
// because prefix means are accumulated in the same emission order.
template <class Sweep>
LepskiEstimate lepski_from_sweep(const LepskiPlan& plan, const std::vector<double>& responses,
                                 Sweep&& sweep) {
    double sum = 0.0;
    return lepski_sweep(plan, [&](std::size_t k) {
        sum += responses[sweep.next()];
        return sum / static_cast<double>(k);
    });
}

// One-shot composition: order the sample around x, then select.
inline LepskiEstimate lepski_estimate_at(const Dataset& ds, const Metric& m, const Point& x,
                                         double delta) {
    const LepskiPlan plan = LepskiPlan::build(ds.size(), delta);
    HeapSweep sweep(ds, m, x);
    return lepski_from_sweep(plan, ds.responses(), sweep);
}

}  // namespace noiseknn
