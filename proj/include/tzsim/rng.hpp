#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace tzsim::rng {

// splitmix64 finalizer (Vigna). Used both as the mixing function for
// stream derivation and as the generator step itself.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_tag(std::string_view tag) noexcept {
    // FNV-1a
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : tag) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// One independent random stream. All simulation randomness flows through
/// streams derived from (master seed, module tag, entity id, step index),
/// so adding entities or reordering work never perturbs unrelated draws.
class Stream {
  public:
    explicit Stream(std::uint64_t state) noexcept : state_(state) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    /// Box-Muller, no caching so the draw count per call is fixed.
    double normal(double mean, double stddev) noexcept {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::uint64_t state_;
};

inline Stream derive(std::uint64_t seed, std::string_view tag,
                     std::uint64_t id = 0, std::uint64_t step = 0) noexcept {
    std::uint64_t s = mix64(seed ^ hash_tag(tag));
    s = mix64(s ^ (id * 0xA24BAED4963EE407ULL));
    s = mix64(s ^ (step * 0x9FB21C651E98DF25ULL));
    return Stream(s);
}

}  // namespace tzsim::rng
