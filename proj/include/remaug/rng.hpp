#pragma once

#include <cstdint>
#include <random>

namespace remaug {

// Random source scheme "remaug-rng/1":
//   * base generator: std::mt19937_64 (bit-exact per the C++ standard),
//     seeded through one splitmix64 round so nearby seeds decorrelate;
//   * stream splitting: substream(tag) derives an independent generator from
//     (seed, tag) via splitmix64 mixing; nested splits compose;
//   * normal deviates: explicit Box-Muller on 53-bit uniforms (no reliance on
//     implementation-defined std::normal_distribution).
// Identical (seed, tag path, draw order) gives identical values within one
// build of this toolkit; other implementations of the scheme match at the
// statistical level only.

uint64_t splitmix64(uint64_t x);

/// Named stream tags; keep values stable, they are part of the scheme.
enum class StreamTag : uint64_t {
    Shadowing = 1,
    Mask = 2,
    MaskRetry = 3,
    BenchmarkScenario = 4,
    BenchmarkMask = 5,
    TestData = 6,
};

class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(splitmix64(seed)), seed_(seed) {}

    /// Independent child stream for (this seed, tag, index).
    Rng substream(StreamTag tag, uint64_t index = 0) const {
        return Rng(splitmix64(seed_ ^ splitmix64(static_cast<uint64_t>(tag) + 0x9e3779b97f4a7c15ULL * (index + 1))));
    }

    uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    uint64_t uniform_int(uint64_t n);

    /// Standard normal via Box-Muller (pairs cached).
    double normal();

    uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 engine_;
    uint64_t seed_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace remaug
