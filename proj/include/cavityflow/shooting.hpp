#pragma once

#include "cavityflow/basis.hpp"
#include "cavityflow/stokes.hpp"

namespace cavityflow {

/// k-th eigenvalue (k >= 1) of the radial Stokes pencil for the given family
/// and harmonic degree l in the unit ball, by root-finding on the spherical
/// Bessel characteristic equation of the Navier slip condition:
///
///   toroidal:  nu x j_l'(x) + (zeta - nu) j_l(x) = 0
///   poloidal:  (zeta - 2 nu) x j_l'(x) + (nu (2l - x^2) - zeta l) j_l(x) = 0
///
/// with eigenvalue nu x^2. Derived by separating the eigenproblem in spherical
/// coordinates; independent of the Galerkin assembly path, used as its oracle.
double shooting_oracle(Family family, int l, const FluidParams& params, int k);

} // namespace cavityflow
