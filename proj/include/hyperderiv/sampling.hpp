#pragma once

#include <random>

#include "hyperderiv/rational.hpp"

namespace hyperderiv {

// mt19937_64 is fully specified by the standard; deriving values from raw
// outputs (rather than std distributions) keeps sampled reports identical
// across platforms.
inline long rand_int(std::mt19937_64& rng, long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<unsigned long long>(hi - lo + 1));
}

// Small-height rational: |numerator| <= h, 1 <= denominator <= h.
inline Rational rand_rational(std::mt19937_64& rng, long h = 20) {
    return Rational(rand_int(rng, -h, h), rand_int(rng, 1, h));
}

inline Rational rand_nonzero_rational(std::mt19937_64& rng, long h = 20) {
    while (true) {
        Rational r = rand_rational(rng, h);
        if (!r.is_zero()) return r;
    }
}

}  // namespace hyperderiv
