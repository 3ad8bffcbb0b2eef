#pragma once

// Neighbor ordering and prefix means.
//
// Everything downstream (Lepski bands, the sup estimator, the classifier)
// consumes sample points in (distance to query, original index) order and
// averages responses over prefixes of that order. The ordering contract:
//
//   * sort by distance, ties broken by ascending original index;
//   * prefix_means[k-1] = (sum of the first k responses in that order) / k,
//     with the sum accumulated in emission order.
//
// Two lazy "sweep" backends produce the same order without materialising
// it: LineSweep (two-pointer merge over a pre-sorted 1-D coordinate line)
// and HeapSweep (min-heap over precomputed distances, any metric). Both
// must be bit-identical to the eager sort — the 1-D Euclidean distance is
// therefore computed as |a-b| directly everywhere (never sqrt of a square,
// which can be off by one ulp), and IEEE negation being exact makes the
// merge's q-x / x-q arithmetic agree with std::abs(x-q).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "noiseknn/dataset.hpp"
#include "noiseknn/error.hpp"
#include "noiseknn/point.hpp"

namespace noiseknn {

// ------------------------------------------------------------ eager order

struct NeighborOrder {
    std::vector<std::uint32_t> order;  // order[j] = 0-based index of (j+1)-th nearest
    std::vector<double> distances;     // nondecreasing, aligned with order
    std::vector<double> prefix_means;  // prefix_means[k-1] = mean of k nearest responses
};

inline NeighborOrder neighbor_order(const Dataset& ds, const Metric& m, const Point& x) {
    const std::size_t n = ds.size();
    NeighborOrder no;
    no.order.resize(n);
    no.distances.resize(n);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = distance(m, ds.point(i), x);
        no.order[i] = static_cast<std::uint32_t>(i);
    }
    std::sort(no.order.begin(), no.order.end(), [&d](std::uint32_t a, std::uint32_t b) {
        if (d[a] != d[b]) return d[a] < d[b];
        return a < b;
    });
    no.prefix_means.resize(n);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        no.distances[j] = d[no.order[j]];
        s += ds.response(no.order[j]);
        no.prefix_means[j] = s / static_cast<double>(j + 1);
    }
    return no;
}

// f̂_{n,k}(x): mean of the k nearest responses. k is 1-based.
inline double knn_estimate(const NeighborOrder& no, std::size_t k) {
    if (k < 1 || k > no.prefix_means.size())
        throw parameter_error("k out of range [1, n] in knn_estimate");
    return no.prefix_means[k - 1];
}

// ------------------------------------------------------- 1-D sorted line

// Sample coordinates sorted ascending (ties by original index), built once
// per dataset and shared across queries.
struct SortedLine {
    std::vector<double> coord;
    std::vector<std::uint32_t> idx;

    static SortedLine build(const Dataset& ds) {
        if (ds.point_kind() != PointKind::real_vector || ds.dimension() != 1)
            throw kind_mismatch_error("SortedLine requires 1-D vector points");
        const std::size_t n = ds.size();
        SortedLine line;
        line.idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) line.idx[i] = static_cast<std::uint32_t>(i);
        std::vector<double> c(n);
        for (std::size_t i = 0; i < n; ++i) c[i] = std::get<RealVector>(ds.point(i))[0];
        std::sort(line.idx.begin(), line.idx.end(), [&c](std::uint32_t a, std::uint32_t b) {
            if (c[a] != c[b]) return c[a] < c[b];
            return a < b;
        });
        line.coord.resize(n);
        for (std::size_t j = 0; j < n; ++j) line.coord[j] = c[line.idx[j]];
        return line;
    }
};

// Emits sample indices in (|coord - q|, index) order by merging outward
// from q's position in the line. Equal-distance runs from both sides are
// collected into a batch and emitted in ascending index order, matching
// the eager sort's tie-break exactly.
class LineSweep {
  public:
    LineSweep(const SortedLine& line, double q) : line_(&line), q_(q) {
        const auto& c = line.coord;
        r_ = static_cast<std::ptrdiff_t>(
            std::lower_bound(c.begin(), c.end(), q) - c.begin());
        l_ = r_ - 1;
    }

    std::uint32_t next() {
        if (pos_ == buf_.size()) refill();
        return buf_[pos_++];
    }

  private:
    void refill() {
        buf_.clear();
        pos_ = 0;
        const auto& c = line_->coord;
        const auto& id = line_->idx;
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(c.size());
        const double inf = std::numeric_limits<double>::infinity();
        // coord[l_] < q <= coord[r_], so both differences are nonnegative
        // and bitwise equal to std::abs(coord - q).
        const double dl = l_ >= 0 ? q_ - c[l_] : inf;
        const double dr = r_ < n ? c[r_] - q_ : inf;
        if (dl <= dr) {
            // whole equal-coordinate run ending at l_, forward order = ascending index
            std::ptrdiff_t a = l_;
            while (a > 0 && c[a - 1] == c[l_]) --a;
            for (std::ptrdiff_t p = a; p <= l_; ++p) buf_.push_back(id[p]);
            l_ = a - 1;
        }
        if (dr <= dl) {
            std::ptrdiff_t b = r_;
            while (b + 1 < n && c[b + 1] == c[r_]) ++b;
            for (std::ptrdiff_t p = r_; p <= b; ++p) buf_.push_back(id[p]);
            r_ = b + 1;
        }
        if (dl == dr)  // merged batch from both sides: restore index order
            std::sort(buf_.begin(), buf_.end());
    }

    const SortedLine* line_;
    double q_;
    std::ptrdiff_t l_, r_;
    std::vector<std::uint32_t> buf_;
    std::size_t pos_ = 0;
};

// --------------------------------------------------------- generic sweep

// Lazy (distance, index)-ordered emission for any metric: all distances
// are computed up front, then pulled through a min-heap, so consuming only
// a prefix costs O(n + pulls·log n).
class HeapSweep {
  public:
    HeapSweep(const Dataset& ds, const Metric& m, const Point& x) {
        const std::size_t n = ds.size();
        heap_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            heap_[i] = Entry{distance(m, ds.point(i), x), static_cast<std::uint32_t>(i)};
        std::make_heap(heap_.begin(), heap_.end(), later);
    }

    std::uint32_t next() {
        std::pop_heap(heap_.begin(), heap_.end(), later);
        std::uint32_t i = heap_.back().i;
        heap_.pop_back();
        return i;
    }

  private:
    struct Entry {
        double d;
        std::uint32_t i;
    };
    // min-heap on (distance, index)
    static bool later(const Entry& a, const Entry& b) {
        if (a.d != b.d) return a.d > b.d;
        return a.i > b.i;
    }
    std::vector<Entry> heap_;
};

}  // namespace noiseknn
