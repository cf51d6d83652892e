#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string_view>

#include "bapc/errors.hpp"

namespace bapc {

// Every random quantity in the project traces back to one root seed through
// named substreams, so adding a consumer never perturbs the draws of another.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed for the substream `name` of the given root seed.
inline std::uint64_t substream_seed(std::uint64_t root, std::string_view name) {
    std::uint64_t state = root ^ fnv1a64(name);
    splitmix64(state);
    return splitmix64(state);
}

/// Indexed variant for per-repeat / per-tree substreams.
inline std::uint64_t substream_seed(std::uint64_t root, std::string_view name,
                                    std::uint64_t index) {
    std::uint64_t state = substream_seed(root, name) ^ (index * 0xd1342543de82ef95ULL + 1);
    splitmix64(state);
    return splitmix64(state);
}

/// Deterministic random stream with hand-rolled distributions. The standard
/// library distributions are implementation-defined, so uniform, normal and
/// exponential draws are produced directly from the engine's 64-bit output to
/// keep results reproducible across standard libraries.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
    RandomStream(std::uint64_t root, std::string_view name)
        : engine_(substream_seed(root, name)) {}
    RandomStream(std::uint64_t root, std::string_view name, std::uint64_t index)
        : engine_(substream_seed(root, name, index)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes two uniforms per pair.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log1p(-u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Exponential via inverse CDF.
    double exponential(double rate) {
        if (!(rate > 0.0)) throw ValidationError("exponential rate must be positive");
        return -std::log1p(-uniform()) / rate;
    }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw ValidationError("below(0) is undefined");
        const std::uint64_t rem =
            (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
        const std::uint64_t bound = std::numeric_limits<std::uint64_t>::max() - rem;
        std::uint64_t x = next_u64();
        while (x > bound) x = next_u64();
        return x % n;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bapc
