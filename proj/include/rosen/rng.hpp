#pragma once

#include "rosen/numeric.hpp"

#include <cstdint>

namespace rosen {

/**
 * Counter-based splittable RNG (splitmix64 core). Streams are keyed by
 * (seed, stream id), so block decompositions reproduce identically no
 * matter how work is scheduled.
 */
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) {
        state_ = mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    double next_double() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // [0, 1) with the full mantissa of the current working precision.
    Real next_real() {
        unsigned bits = current_precision_bits();
        unsigned words = (bits + 63) / 64 + 1;
        Real acc = 0;
        for (unsigned i = 0; i < words; ++i)
            acc += Real(next_u64()) * pow2(-64 * static_cast<long>(i + 1));
        return acc;
    }

    // Uniform in [lo, hi).
    Real uniform(const Real& lo, const Real& hi) { return lo + (hi - lo) * next_real(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace rosen
