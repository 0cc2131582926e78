#pragma once

#include <cstdint>

namespace treechild {

/// SplitMix64 (Steele, Lea & Flood's mixer). Fixed here so that seeds
/// reproduce bit-exactly across platforms and standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound) by rejection; bound >= 1.
    uint64_t below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        while (true) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// True with probability num/den.
    bool chance(uint64_t num, uint64_t den) { return below(den) < num; }

private:
    uint64_t state_;
};

} // namespace treechild
