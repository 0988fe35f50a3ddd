#ifndef XTALK_RNG_H
#define XTALK_RNG_H

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace xtalk {

using Rng = std::mt19937_64;

/// Mixes a 64-bit value (splitmix64 finalizer).
uint64_t mix64(uint64_t x);

/// Derives an independent sub-stream seed from a master seed and a stream name.
uint64_t derive_seed(uint64_t master, std::string_view stream);
uint64_t derive_seed(uint64_t master, uint64_t index);

/// Uniform integer in [0, n). Portable: does not depend on the standard library's distributions.
uint64_t uniform_index(Rng &rng, uint64_t n);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng &rng);

template <typename T>
void shuffle_in_place(std::vector<T> &items, Rng &rng) {
    for (size_t i = items.size(); i > 1; i--) {
        size_t j = uniform_index(rng, i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace xtalk

#endif
