#pragma once

#include "cavityflow/types.hpp"

namespace cavityflow {

/// Unit ball with unit fluid density; the only domain this solver supports.
struct DomainSpec {
    double radius = 1.0;
    double fluid_density = 1.0;

    void validate() const {
        if (radius != 1.0) throw ConfigError("domain radius must be exactly 1 (unit ball)");
        if (fluid_density != 1.0) throw ConfigError("fluid density must be exactly 1");
    }
};

/// Tensor-product quadrature over the unit ball and its boundary sphere.
///
/// Volume rule: Gauss-Legendre in r on [0,1] (weights carry the r^2 Jacobian)
/// crossed with the surface rule. Surface rule: Gauss-Legendre in cos(theta)
/// crossed with a uniform azimuthal grid; exact for all spherical harmonics
/// through surface_degree.
struct QuadratureGrid {
    Eigen::Matrix<double, Eigen::Dynamic, 3> volume_nodes;
    Eigen::VectorXd volume_weights;
    Eigen::Matrix<double, Eigen::Dynamic, 3> surface_nodes;
    Eigen::VectorXd surface_weights;
    int volume_degree = 0;  // radial polynomial degree integrated exactly (before the r^2 factor)
    int surface_degree = 0; // spherical-harmonic degree integrated exactly

    Eigen::Index n_volume() const { return volume_weights.size(); }
    Eigen::Index n_surface() const { return surface_weights.size(); }
};

/// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Grid whose volume rule is exact for radial polynomials r^k, k <= max_poly_degree
/// (including the r^2 measure) and whose surface rule is exact for spherical
/// harmonics of degree <= 3*(l_max+1)+2, enough for convection-tensor triple products.
QuadratureGrid make_grid(int l_max, int max_poly_degree);

/// Inertia tensor of the fluid-filled unit ball at unit density:
/// integral of |x|^2 Id - x (x) x. Analytically diag(8 pi/15).
Mat3 fluid_inertia(const QuadratureGrid& grid);

} // namespace cavityflow
