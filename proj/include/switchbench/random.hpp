#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace switchbench {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Combines a parent seed with a counter into a child seed.
constexpr std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t counter) {
    return splitmix64(parent ^ splitmix64(counter + 0x632BE59BD9B4E019ULL));
}

enum class StreamRole : std::uint64_t { algorithm = 1, adversary = 2 };

/// Seed of replication `replication`'s stream for `role`.
/// derive_seed(b, r, role) = mix(mix(b, r), role); a pure function of its inputs.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replication, StreamRole role) {
    return mix_seed(mix_seed(base_seed, replication), static_cast<std::uint64_t>(role));
}

/// Deterministic random stream. All variates are computed from raw 64-bit engine
/// output so the sequence is identical across standard library implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Independent sub-stream keyed by `counter`.
    RandomStream child(std::uint64_t counter) const { return RandomStream(mix_seed(seed_, counter)); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard exponential by inversion: -ln(1 - U).
    double exponential();

    /// Standard normal by Box-Muller (one variate per call, two uniforms consumed).
    double gaussian();

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n), unbiased.
    std::size_t index(std::size_t n);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace switchbench
