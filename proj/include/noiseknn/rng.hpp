#pragma once

// Counter-based random number generation (Philox4x64-10).
//
// Every random draw in this library is addressed by a triple
// (seed, stream, index): the same triple always yields the same value, on
// any platform, in any execution order. This is what makes trials
// reproducible and embarrassingly parallel — there is no generator state to
// hand between threads, only coordinates.

#include <array>
#include <cmath>
#include <cstdint>

namespace noiseknn {

namespace detail {

// One 64x64 -> 128 bit multiply, split into (hi, lo).
inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

}  // namespace detail

// Philox4x64 with the standard 10 rounds and canonical constants.
// block() maps a (key, counter) pair to four 64-bit words.
struct Philox4x64 {
    static constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ull;
    static constexpr std::uint64_t M1 = 0xCA5A826395121157ull;
    static constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ull;  // golden ratio
    static constexpr std::uint64_t W1 = 0xBB67AE8584CAA73Bull;  // sqrt(3) - 1

    static std::array<std::uint64_t, 4> block(
        std::array<std::uint64_t, 2> key, std::array<std::uint64_t, 4> ctr) {
        for (int round = 0; round < 10; ++round) {
            std::uint64_t hi0, lo0, hi1, lo1;
            detail::mulhilo64(M0, ctr[0], hi0, lo0);
            detail::mulhilo64(M1, ctr[2], hi1, lo1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

// Named streams so independent uses of the same seed never collide.
enum class RngStream : std::uint64_t {
    points = 1,       // X draws
    labels = 2,       // clean Y draws
    channel = 3,      // label-flip coin per record
    risk = 4,         // Monte-Carlo risk evaluation draws
    signs = 5,        // hypercube sign vector
    generic = 6,      // tests and scratch use
};

// A handle for one (seed, stream) pair. All accessors are pure functions of
// the draw index.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, RngStream stream)
        : key_{seed, static_cast<std::uint64_t>(stream)} {}

    std::uint64_t word(std::uint64_t index) const {
        return Philox4x64::block(key_, {index, 0, 0, 0})[0];
    }

    // Uniform on the open interval (0,1): safe to feed to log().
    double uniform01(std::uint64_t index) const {
        return (static_cast<double>(word(index) >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli(double p, std::uint64_t index) const {
        return uniform01(index) < p;
    }

    // Standard Laplace variate by inverse CDF.
    double laplace(std::uint64_t index) const {
        double u = uniform01(index);
        return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
    }

private:
    std::array<std::uint64_t, 2> key_;
};

// Deterministic per-trial seed: mixing (base_seed, n, trial) through a full
// Philox block means adding trials or grid points never perturbs the seeds
// of existing cells.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t n,
                                 std::uint64_t trial_index) {
    return Philox4x64::block({base_seed, 0x7365656473ull},  // "seeds"
                             {n, trial_index, 0, 0})[0];
}

}  // namespace noiseknn
