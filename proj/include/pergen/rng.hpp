#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace pergen {

// Seeded randomness used for splits, sampling, and mixing. std::mt19937_64
// output is specified bit-for-bit by the standard; the standard library
// *distributions* are not, so bounded draws are done by hand here to keep
// artifacts byte-identical across platforms.

using Rng = std::mt19937_64;

/// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t rand_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

/// Uniform double in [0, 1) with 53 bits of precision.
inline double rand_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool rand_bernoulli(Rng& rng, double p) { return rand_unit(rng) < p; }

template <typename T>
void shuffle_deterministic(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rand_below(rng, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

/// FNV-1a, used to derive independent sub-seeds from (seed, tag) and to
/// fingerprint configs.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = fnv1a64(tag);
    h ^= seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

}  // namespace pergen
