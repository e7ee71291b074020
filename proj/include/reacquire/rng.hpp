#pragma once

#include <cstdint>
#include <string_view>

namespace reacquire {

/**
 * SplitMix64 (Steele, Lea & Flood 2014; the seeding generator of xoshiro).
 *
 * All randomness in the library goes through this generator so that results
 * are reproducible across platforms and standard libraries; the std
 * distributions are implementation-defined and are not used.
 */
class SplitMix64 {
public:
    static constexpr std::string_view algorithm = "splitmix64/stream(seed,index)";

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    /// Independent stream for (seed, index): the key is the finalizer of the
    /// pair, so neighbouring indices do not produce overlapping sequences.
    static constexpr SplitMix64 stream(std::uint64_t seed, std::uint64_t index) noexcept {
        return SplitMix64(mix(seed ^ mix(index + 0x632BE59BD9B4E019ULL)));
    }

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) by rejection; bound must be positive.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

    constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

}  // namespace reacquire
