#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace cwica {

/// Deterministic 64-bit generator (SplitMix64: Weyl counter + permutation
/// finalizer). Identical seed + identical call sequence gives bit-identical
/// output on every platform; no standard-library distributions are used
/// anywhere so golden files stay valid.
///
/// Sub-streams: `sub(key)` derives an independent child generator from the
/// *original* seed and the key only, so derivation does not depend on how
/// many draws the parent has made. Experiment code names its streams
/// ("data", "init", "batch", "shift", ...) via the string overload.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return finalize(state_);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via Box-Muller; draws in pairs, caches the spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01(); // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform index in {0, ..., n-1} (multiply-shift; bias < n / 2^64).
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Independent child stream keyed off the original seed.
    Rng sub(std::uint64_t key) const {
        return Rng(finalize(seed_ + 0x9E3779B97F4A7C15ull * (key + 1)));
    }

    Rng sub(std::string_view name) const { return sub(fnv1a(name)); }

    /// Fisher-Yates shuffle.
    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(first[i - 1], first[j]);
        }
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xCBF29CE484222325ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ull;
        }
        return h;
    }

private:
    static std::uint64_t finalize(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace cwica
