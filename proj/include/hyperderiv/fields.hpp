#pragma once

#include <map>

#include "hyperderiv/derivation.hpp"

namespace hyperderiv {

// The two explicitly given fields: the first odd field
//   L1 = sum_j x_{2,j} d/dx_{1,j} + x_{3,j} d/dx_{2,j}
//              + 4(2 x_{1,1} x_{2,j} + x_{2,1} x_{1,j} + x_{2,j+2}) d/dx_{3,j}
// with x_{2,j+2} = 0 beyond the alphabet, and the Euler field
//   L0 = sum_j (j+1) x_{1,j} d/dx_{1,j} + (j+2) x_{2,j} d/dx_{2,j} + (j+3) x_{3,j} d/dx_{3,j}.

inline Derivation build_L1(int genus) {
    std::map<VarId, Polynomial> imgs;
    for (int j = 1; j <= 2 * genus - 1; j += 2) {
        imgs.emplace(make_x(1, j, genus), x_poly(2, j, genus));
        imgs.emplace(make_x(2, j, genus), x_poly(3, j, genus));
        Polynomial p = Rational(8) * (x_poly(1, 1, genus) * x_poly(2, j, genus)) +
                       Rational(4) * (x_poly(2, 1, genus) * x_poly(1, j, genus)) +
                       Rational(4) * x_poly(2, j + 2, genus);
        imgs.emplace(make_x(3, j, genus), std::move(p));
    }
    return Derivation(genus, 1, std::move(imgs));
}

inline Derivation build_euler(int genus) {
    std::map<VarId, Polynomial> imgs;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 2 * genus - 1; j += 2)
            imgs.emplace(make_x(i, j, genus), Rational(i + j) * x_poly(i, j, genus));
    return Derivation(genus, 0, std::move(imgs));
}

}  // namespace hyperderiv
