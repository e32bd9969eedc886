#pragma once

#include <cstdint>
#include <random>

namespace gencourant {

// MT19937-64 (the standard 64-bit Mersenne Twister). A double in [0,1) is
// built from the top 53 bits of one draw: (x >> 11) * 2^-53. This mapping is
// fixed so that seeds reproduce across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Integer in [lo, hi].
    int integer(int lo, int hi) {
        return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace gencourant
