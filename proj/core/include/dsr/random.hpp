#ifndef DSR_RANDOM_HPP
#define DSR_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace dsr {

/// Deterministic random source: SplitMix64.
///
/// Every stochastic operation in the library draws only from a RandomSource,
/// so an experiment is a pure function of its seeds. The raw 64-bit sequence
/// is bit-exact across platforms; floating-point derivations (uniform, normal)
/// are exact up to the platform's libm for log/cos/sqrt.
///
/// A RandomSource is single-owner: parallel work must derive child sources
/// with child(), never share one instance across tasks.
class RandomSource {
public:
    static constexpr const char* kAlgorithm = "splitmix64";

    explicit RandomSource(std::uint64_t seed) : state_(seed) {}

    std::uint64_t seed_state() const { return state_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (consumes two uniforms per call).
    double normal() {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    /// Deterministic Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    /// Child source for task `index`; child seed = mix(parent_seed + GAMMA*(index+1)).
    /// Children of distinct indices are decorrelated and reproducible.
    RandomSource child(std::uint64_t index) const {
        return RandomSource(mix(state_ + 0x9E3779B97F4A7C15ULL * (index + 1)));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace dsr

#endif // DSR_RANDOM_HPP
