// Neighbor ordering: the eager sort, the 1-D line sweep, and the heap
// sweep must emit the same (distance, index)-ordered sequence, and prefix
// means must accumulate in exactly that order.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "noiseknn/dataset.hpp"
#include "noiseknn/neighbor.hpp"
#include "noiseknn/point.hpp"
#include "noiseknn/rng.hpp"

using namespace noiseknn;

namespace {

// 1-D dataset with many duplicate coordinates (values on a small integer
// grid), so tie-breaks are actually exercised.
Dataset gridded_dataset(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed, RngStream::generic);
    std::vector<Point> xs;
    std::vector<double> zs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::floor(rng.uniform01(2 * i) * 8.0);  // 0..7
        xs.push_back(RealVector{c});
        zs[i] = rng.uniform01(2 * i + 1) < 0.5 ? 0.0 : 1.0;
    }
    return Dataset(std::move(xs), std::move(zs));
}

std::vector<std::uint32_t> pull_all(LineSweep& sweep, std::size_t n) {
    std::vector<std::uint32_t> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = sweep.next();
    return out;
}

std::vector<std::uint32_t> pull_all(HeapSweep& sweep, std::size_t n) {
    std::vector<std::uint32_t> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = sweep.next();
    return out;
}

}  // namespace

// ---------- eager order ----------

TEST_CASE("neighbor_order sorts by distance with index tie-break") {
    Dataset ds({Point{RealVector{3.0}}, Point{RealVector{1.0}}, Point{RealVector{1.0}},
                Point{RealVector{0.0}}},
               {1.0, 0.0, 1.0, 0.0});
    const auto no = neighbor_order(ds, Euclidean{}, Point{RealVector{1.0}});
    // Distances from q=1: {2, 0, 0, 1}; ties at 0 keep index order 1, 2.
    REQUIRE(no.order == std::vector<std::uint32_t>{1, 2, 3, 0});
    REQUIRE(no.distances == std::vector<double>{0.0, 0.0, 1.0, 2.0});
    REQUIRE(no.prefix_means == std::vector<double>{0.0, 0.5, 1.0 / 3.0, 0.5});
}

TEST_CASE("neighbor_order distances are nondecreasing on random data") {
    const Dataset ds = gridded_dataset(300, 11);
    const auto no = neighbor_order(ds, Euclidean{}, Point{RealVector{3.4}});
    for (std::size_t j = 1; j < no.distances.size(); ++j) {
        REQUIRE(no.distances[j - 1] <= no.distances[j]);
        if (no.distances[j - 1] == no.distances[j])
            REQUIRE(no.order[j - 1] < no.order[j]);
    }
}

TEST_CASE("prefix means accumulate in emission order") {
    const Dataset ds = gridded_dataset(64, 5);
    const auto no = neighbor_order(ds, Euclidean{}, Point{RealVector{2.0}});
    double s = 0.0;
    for (std::size_t j = 0; j < ds.size(); ++j) {
        s += ds.response(no.order[j]);
        REQUIRE(no.prefix_means[j] == s / static_cast<double>(j + 1));
    }
}

TEST_CASE("knn_estimate bounds-checks k") {
    const Dataset ds = gridded_dataset(10, 3);
    const auto no = neighbor_order(ds, Euclidean{}, Point{RealVector{0.0}});
    REQUIRE(knn_estimate(no, 1) == ds.response(no.order[0]));
    REQUIRE(knn_estimate(no, 10) == no.prefix_means[9]);
    REQUIRE_THROWS_AS(knn_estimate(no, 0), parameter_error);
    REQUIRE_THROWS_AS(knn_estimate(no, 11), parameter_error);
}

// ---------- sorted line ----------

TEST_CASE("sorted line orders coordinates with index tie-break") {
    Dataset ds({Point{RealVector{2.0}}, Point{RealVector{1.0}}, Point{RealVector{2.0}},
                Point{RealVector{0.5}}},
               {0.0, 0.0, 0.0, 0.0});
    const auto line = SortedLine::build(ds);
    REQUIRE(line.coord == std::vector<double>{0.5, 1.0, 2.0, 2.0});
    REQUIRE(line.idx == std::vector<std::uint32_t>{3, 1, 0, 2});
}

TEST_CASE("sorted line rejects non-1-D datasets") {
    Dataset symbols({Point{Symbol{0}}, Point{Symbol{1}}}, {0.0, 1.0});
    REQUIRE_THROWS_AS(SortedLine::build(symbols), kind_mismatch_error);
    Dataset wide({Point{RealVector{1.0, 2.0}}}, {0.0});
    REQUIRE_THROWS_AS(SortedLine::build(wide), kind_mismatch_error);
}

TEST_CASE("line sweep equals the eager order, ties included") {
    const Dataset ds = gridded_dataset(257, 21);
    const auto line = SortedLine::build(ds);
    // Query set: sample coordinates themselves (exact hits), exact midpoints
    // between grid values (two-sided ties), and off-grid points.
    std::vector<double> queries = {0.0, 3.0, 7.0, 0.5, 3.5, 6.5, 2.25, -1.0, 9.75};
    for (double q : queries) {
        const auto no = neighbor_order(ds, Euclidean{}, Point{RealVector{q}});
        LineSweep sweep(line, q);
        REQUIRE(pull_all(sweep, ds.size()) == no.order);
    }
}

TEST_CASE("heap sweep equals the eager order for every point kind") {
    // 1-D vectors with ties.
    {
        const Dataset ds = gridded_dataset(120, 31);
        for (double q : {1.0, 2.5, -0.5}) {
            const auto no = neighbor_order(ds, Euclidean{}, Point{RealVector{q}});
            HeapSweep sweep(ds, Euclidean{}, Point{RealVector{q}});
            REQUIRE(pull_all(sweep, ds.size()) == no.order);
        }
    }
    // Symbols under an explicit table (duplicates guaranteed).
    {
        DiscreteTable t;
        t.n_atoms = 3;
        t.dist = {0.0, 0.25, 1.0, 0.25, 0.0, 1.0, 1.0, 1.0, 0.0};
        CounterRng rng(41, RngStream::generic);
        std::vector<Point> xs;
        std::vector<double> zs;
        for (std::size_t i = 0; i < 60; ++i) {
            xs.push_back(Symbol{static_cast<std::uint32_t>(rng.word(i) % 3)});
            zs.push_back(rng.word(1000 + i) & 1u ? 1.0 : 0.0);
        }
        Dataset ds(std::move(xs), std::move(zs));
        for (std::uint32_t q = 0; q < 3; ++q) {
            const auto no = neighbor_order(ds, t, Point{Symbol{q}});
            HeapSweep sweep(ds, t, Point{Symbol{q}});
            REQUIRE(pull_all(sweep, ds.size()) == no.order);
        }
    }
    // Bitstrings under the ultrametric.
    {
        CounterRng rng(17, RngStream::generic);
        std::vector<Point> xs;
        std::vector<double> zs;
        for (std::size_t i = 0; i < 80; ++i) {
            std::string s;
            for (std::size_t j = 0; j < 5; ++j)
                s.push_back(rng.word(10 * i + j) & 1u ? '1' : '0');
            xs.push_back(BitString{s});
            zs.push_back(rng.word(5000 + i) & 1u ? 1.0 : 0.0);
        }
        Dataset ds(std::move(xs), std::move(zs));
        const Metric m = HypercubeUltrametric{1.0};
        const auto no = neighbor_order(ds, m, Point{BitString{"01010"}});
        HeapSweep sweep(ds, m, Point{BitString{"01010"}});
        REQUIRE(pull_all(sweep, ds.size()) == no.order);
    }
}

TEST_CASE("line sweep batches both sides of an exact two-sided tie") {
    // Points at 1 and 3 are equidistant from q=2; the merged batch must come
    // out in ascending index order regardless of side.
    Dataset ds({Point{RealVector{3.0}}, Point{RealVector{1.0}}, Point{RealVector{3.0}},
                Point{RealVector{1.0}}, Point{RealVector{2.0}}},
               {0.0, 0.0, 0.0, 0.0, 0.0});
    const auto line = SortedLine::build(ds);
    LineSweep sweep(line, 2.0);
    const auto got = pull_all(sweep, ds.size());
    const auto no = neighbor_order(ds, Euclidean{}, Point{RealVector{2.0}});
    REQUIRE(got == no.order);
    REQUIRE(got == std::vector<std::uint32_t>{4, 0, 1, 2, 3});
}
