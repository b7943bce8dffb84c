#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace germ {

// Counter-based stream generator (SplitMix64 finalizer over a keyed counter).
// Streams keyed by (seed, stream) are statistically independent, so parallel
// Monte Carlo can hand one stream per replication and aggregate in any order.
// State after construction is just the counter; sequences are reproducible
// per (seed, stream) within one build.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed + GAMMA * mix(stream + GAMMA))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

    result_type operator()() {
        counter_ += GAMMA;
        return mix(key_ ^ counter_);
    }

    // Uniform double in [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    // Derive an independent stream without disturbing this one.
    RngStream split(std::uint64_t substream) const {
        return RngStream(key_, substream + 0x9e3779b9U);
    }

private:
    static constexpr std::uint64_t GAMMA = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Thin wrappers so call sites do not repeat distribution-object boilerplate.
// std distribution algorithms are deterministic within one build, which is
// the reproducibility contract here.

inline std::uint64_t sample_poisson(RngStream& rng, double lambda) {
    std::poisson_distribution<long long> d(lambda);
    return static_cast<std::uint64_t>(d(rng));
}

inline std::uint64_t sample_binomial(RngStream& rng, std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<long long> d(static_cast<long long>(n), p);
    return static_cast<std::uint64_t>(d(rng));
}

// Sum of n iid Geometric(p) counts of failures before the first success.
inline std::uint64_t sample_negative_binomial(RngStream& rng, std::uint64_t n, double p) {
    if (n == 0) return 0;
    std::negative_binomial_distribution<long long> d(static_cast<long long>(n), p);
    return static_cast<std::uint64_t>(d(rng));
}

}  // namespace germ
