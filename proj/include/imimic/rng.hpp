#ifndef IMIMIC_RNG_HPP
#define IMIMIC_RNG_HPP

#include <cstdint>

namespace imimic {

// splitmix64: tiny, stateless-friendly generator with identical output on
// every platform. std::mt19937 would also be portable, but the standard
// distributions are not, and golden tests pin exact bytes.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [lo, hi]; modulo bias is irrelevant at 8-bit ranges.
    int next_in(int lo, int hi) {
        uint64_t span = uint64_t(hi - lo) + 1;
        return lo + int(next() % span);
    }

    double next_unit() { return double(next() >> 11) * 0x1.0p-53; }

private:
    uint64_t state_;
};

// Stateless position hash for procedural textures.
inline uint64_t hash_mix(uint64_t a, uint64_t b) {
    uint64_t z = a * 0x9e3779b97f4a7c15ULL + b;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace imimic

#endif
