#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace promptpainter {

// Deterministic RNG used everywhere randomness is needed. We avoid the
// std <random> distributions on purpose: their algorithms are
// implementation-defined, and run manifests promise replayable traces.

/// splitmix64 finalizer. Decorrelates consecutive or structured inputs.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-sensitive combination of seed material (run seed, level, iteration, ...).
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x8f1844c4d9a0b1ecULL;
    for (std::uint64_t p : parts) {
        h = mix64(h ^ (p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
    }
    return h;
}

/// FNV-1a over bytes; used to turn strings into seed material.
inline std::uint64_t hash_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Small counter-based generator (splitmix64 stream).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform integer in [lo, hi], inclusive. Consumes exactly one draw.
    int uniform_int(int lo, int hi) {
        if (hi <= lo) {
            next_u64();
            return lo;
        }
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    /// Standard normal via Box-Muller. Consumes two draws per call.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        // Guard log(0).
        if (u1 <= 0.0) {
            u1 = 0x1.0p-53;
        }
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace promptpainter
