#pragma once

// Points and metrics.
//
// Three point kinds cover every space we work with:
//   RealVector — a point of R^D (finite coordinates only);
//   Symbol     — an atom of a finite space, named by a small integer;
//   BitString  — a {0,1}-string, used by the ultrametric tree space.
//
// Metrics are matched to point kinds at call time; a mismatch is a typed
// error, never UB.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "noiseknn/error.hpp"

namespace noiseknn {

using RealVector = std::vector<double>;

struct Symbol {
    std::uint32_t id = 0;
    friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct BitString {
    std::string bits;  // characters '0'/'1' only
    friend bool operator==(const BitString&, const BitString&) = default;
};

using Point = std::variant<RealVector, Symbol, BitString>;

enum class PointKind { real_vector, symbol, bit_string };

inline PointKind kind(const Point& p) {
    switch (p.index()) {
        case 0: return PointKind::real_vector;
        case 1: return PointKind::symbol;
        default: return PointKind::bit_string;
    }
}

inline const char* kind_name(PointKind k) {
    switch (k) {
        case PointKind::real_vector: return "vector";
        case PointKind::symbol: return "symbol";
        default: return "bitstring";
    }
}

// Throws if the point is malformed (non-finite coordinate, bad bit char).
inline void validate_point(const Point& p) {
    if (const auto* v = std::get_if<RealVector>(&p)) {
        if (v->empty()) throw data_error("vector point has no coordinates");
        for (double c : *v)
            if (!std::isfinite(c))
                throw data_error("vector point has a non-finite coordinate");
    } else if (const auto* b = std::get_if<BitString>(&p)) {
        if (b->bits.empty()) throw data_error("bitstring point is empty");
        for (char c : b->bits)
            if (c != '0' && c != '1')
                throw data_error("bitstring point has a character other than 0/1");
    }
}

// Stable hash for memoising per-point work (duplicate sample points share
// their neighbor sweep). Not exposed as part of any file format.
struct PointHash {
    std::size_t operator()(const Point& p) const {
        std::size_t h = p.index() * 0x9e3779b97f4a7c15ull;
        if (const auto* v = std::get_if<RealVector>(&p)) {
            for (double c : *v) {
                if (c == 0.0) c = 0.0;  // -0.0 == 0.0 but their bit patterns differ
                std::uint64_t bits;
                static_assert(sizeof bits == sizeof c);
                std::memcpy(&bits, &c, sizeof bits);
                h ^= std::hash<std::uint64_t>{}(bits) + 0x9e3779b9 + (h << 6) + (h >> 2);
            }
        } else if (const auto* s = std::get_if<Symbol>(&p)) {
            h ^= std::hash<std::uint32_t>{}(s->id) + 0x9e3779b9 + (h << 6) + (h >> 2);
        } else {
            h ^= std::hash<std::string>{}(std::get<BitString>(p).bits) + 0x9e3779b9 +
                 (h << 6) + (h >> 2);
        }
        return h;
    }
};

// ---------------------------------------------------------------- metrics

struct Euclidean {};

// Explicit distance matrix over symbols 0..n_atoms-1. The matrix must be a
// genuine metric; validate() checks all axioms exhaustively (fine for the
// small spaces this is meant for).
struct DiscreteTable {
    std::size_t n_atoms = 0;
    std::vector<double> dist;  // row-major n_atoms x n_atoms

    double at(std::size_t i, std::size_t j) const { return dist[i * n_atoms + j]; }

    void validate() const {
        if (dist.size() != n_atoms * n_atoms)
            throw parameter_error("distance table size does not match atom count");
        for (std::size_t i = 0; i < n_atoms; ++i) {
            if (at(i, i) != 0.0)
                throw parameter_error("distance table diagonal must be zero");
            for (std::size_t j = 0; j < n_atoms; ++j) {
                if (!(at(i, j) >= 0.0) || !std::isfinite(at(i, j)))
                    throw parameter_error("distance table entries must be finite and nonnegative");
                if (at(i, j) != at(j, i))
                    throw parameter_error("distance table must be symmetric");
                if (i != j && at(i, j) == 0.0)
                    throw parameter_error("distinct atoms must have positive distance");
                for (std::size_t k = 0; k < n_atoms; ++k)
                    if (at(i, j) > at(i, k) + at(k, j))
                        throw parameter_error("distance table violates the triangle inequality");
            }
        }
    }
};

// Tree metric on bit strings: rho(x0,x1) = 2^(-lcp/d) for distinct strings,
// where lcp is the longest common prefix length (0 when the first bits
// differ). Strings of length 1 play the role of the two detached anchor
// atoms: their distance to everything else is 1.
struct HypercubeUltrametric {
    double d = 1.0;
};

using Metric = std::variant<Euclidean, DiscreteTable, HypercubeUltrametric>;

namespace detail {

inline double euclidean_distance(const RealVector& a, const RealVector& b) {
    if (a.size() != b.size())
        throw kind_mismatch_error("Euclidean distance between vectors of different lengths");
    if (a.size() == 1) return std::abs(a[0] - b[0]);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        s += diff * diff;
    }
    return std::sqrt(s);
}

inline double ultrametric_distance(const HypercubeUltrametric& m, const BitString& a,
                                   const BitString& b) {
    if (a.bits == b.bits) return 0.0;
    if (a.bits.size() <= 1 || b.bits.size() <= 1) return 1.0;  // anchor involved
    std::size_t lcp = 0;
    std::size_t limit = std::min(a.bits.size(), b.bits.size());
    while (lcp < limit && a.bits[lcp] == b.bits[lcp]) ++lcp;
    return std::exp2(-static_cast<double>(lcp) / m.d);
}

}  // namespace detail

inline double distance(const Metric& m, const Point& a, const Point& b) {
    if (const auto* e = std::get_if<Euclidean>(&m)) {
        (void)e;
        const auto* va = std::get_if<RealVector>(&a);
        const auto* vb = std::get_if<RealVector>(&b);
        if (!va || !vb)
            throw kind_mismatch_error("Euclidean metric requires vector points");
        return detail::euclidean_distance(*va, *vb);
    }
    if (const auto* t = std::get_if<DiscreteTable>(&m)) {
        const auto* sa = std::get_if<Symbol>(&a);
        const auto* sb = std::get_if<Symbol>(&b);
        if (!sa || !sb)
            throw kind_mismatch_error("distance table requires symbol points");
        if (sa->id >= t->n_atoms || sb->id >= t->n_atoms)
            throw kind_mismatch_error("symbol id outside the distance table");
        return t->at(sa->id, sb->id);
    }
    const auto& u = std::get<HypercubeUltrametric>(m);
    const auto* ba = std::get_if<BitString>(&a);
    const auto* bb = std::get_if<BitString>(&b);
    if (!ba || !bb)
        throw kind_mismatch_error("ultrametric requires bitstring points");
    return detail::ultrametric_distance(u, *ba, *bb);
}

}  // namespace noiseknn
