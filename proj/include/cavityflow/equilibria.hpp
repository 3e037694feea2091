#pragma once

#include "cavityflow/coupling.hpp"

namespace cavityflow {

/// Permanent rotation: fluid at rest, body spinning about a principal axis.
/// a_star lies in the lambda_star eigenspace of the inertia tensor and
/// |I a_star| equals the prescribed momentum. manifold_dim is the eigenvalue
/// multiplicity, which is the local dimension of the equilibria manifold.
struct Equilibrium {
    Vec3 a_star = Vec3::Zero();
    double lambda_star = 0.0;
    int manifold_dim = 1;
    Eigen::Matrix<double, 3, Eigen::Dynamic> eigenspace; // orthonormal representative set
    int sign = +1;
};

/// One representative per (distinct inertia eigenvalue, sign), ascending in
/// lambda_star, + before -. Degenerate eigenspaces get a single entry carrying
/// the orthonormal representative set.
std::vector<Equilibrium> find_equilibria(const InertiaSpec& inertia, double momentum);

/// Exact Jacobian of the Galerkin dynamics at (c, a) = (0, a_star) as a pencil
/// against the mass blocks diag(B, I); neg_generator = M^{-1} J represents
/// -L_star, whose spectrum decides stability.
struct Linearization {
    Eigen::MatrixXd jacobian;      // (n+3) x (n+3)
    Eigen::MatrixXd neg_generator; // M^{-1} J
    int n_fluid = 0;
};

Linearization linearize(const CouplingTensors& tensors, const Equilibrium& eq);

enum class Classification { NormallyStable, NormallyHyperbolic };

const char* classification_name(Classification c);

struct StabilityReport {
    Eigen::VectorXcd spectrum;     // eigenvalues of -L_star
    int zero_multiplicity = 0;
    int unstable_count = 0;        // Re > threshold
    Classification classification = Classification::NormallyStable;
    double spectral_gap = 0.0;     // distance of the nonzero spectrum from the imaginary axis
    double cluster_threshold = 0.0;
};

/// Solve the spectrum of -L_star, identify the zero cluster, verify it is
/// semi-simple (rank test), and classify. Throws NumericalError when the zero
/// cluster is not semi-simple within tolerance (discretization too coarse).
StabilityReport classify(const Linearization& lin, const CouplingTensors& tensors,
                         const Equilibrium& eq);

} // namespace cavityflow
