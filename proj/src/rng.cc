#include "xtalk/rng.h"

namespace xtalk {

uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t master, std::string_view stream) {
    // FNV-1a over the stream name, then mixed with the master seed.
    uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return mix64(master ^ mix64(h));
}

uint64_t derive_seed(uint64_t master, uint64_t index) {
    return mix64(mix64(master) + 0x632BE59BD9B4E019ULL * (index + 1));
}

uint64_t uniform_index(Rng &rng, uint64_t n) {
    if (n <= 1) {
        return 0;
    }
    // Rejection sampling to remove modulo bias.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace xtalk
