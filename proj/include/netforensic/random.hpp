#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nf {

/// SplitMix64 finalizer, used to derive independent stage seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed for a named stage, derived from the experiment seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char c : stage) h = (h ^ c) * 0x100000001B3ull;
    return mix64(seed ^ h);
}

/// Uniform integer in [0, bound) by rejection, so the sequence depends only
/// on the mt19937_64 output stream (which the standard pins down exactly).
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
        std::uint64_t x = rng();
        if (x >= limit) return x % bound;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace nf
