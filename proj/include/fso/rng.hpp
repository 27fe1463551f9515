#pragma once

#include <cstdint>
#include <random>

#include "fso/detail/normal.hpp"

namespace fso {

/// Derive a child seed from a base seed and a stream tag (splitmix64 mix).
/// Used to give every purpose (topology, weights, training, evaluation, ...)
/// its own independent, reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random source. All distributions are generated from raw
/// 64-bit words through fixed arithmetic, so a given seed yields the same
/// sequence on every build of this library (unlike std::*_distribution,
/// whose output is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo is biased for huge n; all callers use small n.
        return gen_() % n;
    }

    /// Standard normal draw (inverse-CDF method; one word per draw).
    double normal() {
        // uniform() can return exactly 0; shift into (0, 1).
        double u = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
        return detail::normal_inverse_cdf(u);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Independent child generator; advances this stream by one word.
    Rng split() { return Rng(next_u64()); }

private:
    std::mt19937_64 gen_;
};

} // namespace fso
