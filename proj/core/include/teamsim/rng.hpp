#pragma once

#include <cstddef>
#include <cstdint>

namespace teamsim {

// 64-bit linear congruential generator. Uniforms are built from the top 33
// bits of the state after each advance, so streams reproduce bit-for-bit in
// any implementation that follows the same recurrence.
class Lcg {
public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
    static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;
    static constexpr double kTwoPow33 = 8589934592.0;

    constexpr Lcg() = default;
    constexpr explicit Lcg(std::uint64_t state) : state_(state) {}

    constexpr std::uint64_t state() const { return state_; }

    // Advances and returns the top 33 bits.
    constexpr std::uint64_t next() {
        state_ = state_ * kMultiplier + kIncrement;
        return state_ >> 31;
    }

    // Uniform on [0, 1).
    constexpr double uniform01() { return static_cast<double>(next()) / kTwoPow33; }

    // Uniform on [lo, hi).
    constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n); n must be positive.
    constexpr std::size_t below(std::size_t n) {
        auto idx = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

    constexpr bool bernoulli(double p) { return uniform01() < p; }

    friend constexpr bool operator==(const Lcg&, const Lcg&) = default;

private:
    std::uint64_t state_ = 0;
};

// splitmix64 finalizer; used only to derive independent stream seeds from a
// session seed and a stream index.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace teamsim
