#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "amtk/util.hpp"

namespace amtk {

// Deterministic RNG used everywhere randomness is needed. The generator is
// std::mt19937_64 (fully specified by the C++ standard, so sequences are
// identical across platforms); bounded draws use rejection sampling instead
// of std::uniform_int_distribution, whose algorithm is implementation-defined.
//
// Seeding: sub-streams are derived from a user seed plus a context string
// (dataset id, tensor name, cell key, ...) via FNV-1a + SplitMix64, so the
// order in which streams are consumed never affects any single stream.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform in [0, n). Rejection sampling over the top multiple of n.
    uint64_t bounded(uint64_t n) {
        if (n == 0) throw Error("Rng::bounded: n must be positive");
        uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

inline uint64_t derive_seed(uint64_t seed, std::string_view context) {
    return splitmix64(seed ^ fnv1a64(context));
}

inline uint64_t derive_seed(uint64_t seed, std::string_view a, std::string_view b) {
    return splitmix64(seed ^ fnv1a64(b, fnv1a64(a) ^ 0x9e3779b97f4a7c15ull));
}

template <typename T>
void shuffle_fisher_yates(std::vector<T>& v, Rng& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.bounded(i));
        std::swap(v[i - 1], v[j]);
    }
}

// k distinct indices drawn uniformly from [0, n), returned in ascending
// order (partial Fisher-Yates over the index vector).
inline std::vector<size_t> sample_indices(size_t n, size_t k, Rng& rng) {
    if (k > n) throw Error("sample_indices: k exceeds population");
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + static_cast<size_t>(rng.bounded(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace amtk
