#pragma once

#include "cavityflow/polynomial.hpp"

namespace cavityflow {

/// Real solid harmonic R_lm = r^l Y_lm as a homogeneous polynomial of degree l,
/// together with its gradient and (harmonic, trace-free) Hessian.
///
/// Convention: real spherical harmonics with unit L2 norm on the unit sphere,
/// no Condon-Shortley phase; m > 0 pairs with cos(m phi), m < 0 with sin(|m| phi).
struct SolidHarmonic {
    int l = 0;
    int m = 0;
    Poly3 value;
    std::array<Poly3, 3> grad;
    std::array<std::array<Poly3, 3>, 3> hess;
};

SolidHarmonic real_solid_harmonic(int l, int m);

} // namespace cavityflow
