#pragma once

#include <cstdint>
#include <span>

namespace rmslab {

/// SplitMix64 generator (Steele, Lea & Flood; fixed-increment variant by Vigna).
/// 64-bit state, one multiply-xorshift finalizer per output. Chosen because the
/// algorithm is short enough to pin down exactly, so trajectories replay
/// identically for a given seed regardless of the standard library in use.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    /// Finalizer applied to each incremented state word.
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Purpose tags for deriving independent sub-streams from one run seed.
enum class Stream : std::uint64_t {
    gradient_noise = 0,
    problem_data = 1,
    init_point = 2,
    sigma_estimate = 3,
    smoothness_estimate = 4,
    probe = 5,
};

/// One independent stream per (seed, purpose): the sub-seed is the SplitMix64
/// finalizer applied to seed + (purpose+1) * golden-gamma increment.
inline SplitMix64 make_stream(std::uint64_t seed, Stream purpose) {
    const std::uint64_t p = static_cast<std::uint64_t>(purpose) + 1;
    return SplitMix64(SplitMix64::mix(seed + p * 0x9E3779B97F4A7C15ULL));
}

/// Fills `out` with independent standard normals via Box-Muller on SplitMix64
/// uniforms. Pairs are consumed in order; an odd tail discards the sine half.
void fill_gaussian(SplitMix64& rng, std::span<double> out);

/// Single standard normal draw (one Box-Muller pair, sine half discarded).
double sample_gaussian(SplitMix64& rng);

}  // namespace rmslab
