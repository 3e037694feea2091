#pragma once

#include "cavityflow/basis.hpp"

#include <memory>

namespace cavityflow {

/// Kinematic viscosity and boundary friction. zeta > 0 is the standing
/// assumption; zeta = 0 changes the decay analysis (rigid rotations stop
/// dissipating) and is only allowed behind the experimental flag.
struct FluidParams {
    double nu = 1.0;
    double zeta = 1.0;
    bool experimental_zero_zeta = false;

    void validate() const {
        if (!(nu > 0.0)) throw ConfigError("fluid.nu must be > 0");
        if (experimental_zero_zeta) {
            if (zeta < 0.0) throw ConfigError("fluid.zeta must be >= 0 (experimental mode)");
        } else if (!(zeta > 0.0)) {
            throw ConfigError("fluid.zeta must be > 0 (set fluid.allow_zero_zeta for the zeta=0 experiment)");
        }
    }
};

/// L2 mass matrix and dissipation form of the trial family:
///   mass_{ij} = (v_i | v_j)_Omega
///   dissipation_{ij} = zeta (v_i | v_j)_Gamma + 2 nu (D(v_i) | D(v_j))_Omega
struct Forms {
    Eigen::MatrixXd mass;
    Eigen::MatrixXd dissipation;
};

Forms assemble_forms(const BasisSet& basis, const FluidParams& params);

/// H1 Gram matrix (v_i | v_j) + (grad v_i : grad v_j) over the ball.
Eigen::MatrixXd assemble_h1_gram(const BasisSet& basis);

struct EigenPairs {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // M-orthonormal columns
};

/// Smallest n_modes eigenpairs of A x = Lambda M x via Cholesky reduction of M.
EigenPairs solve_modes(const Eigen::MatrixXd& M, const Eigen::MatrixXd& A, int n_modes);

struct ModeLabel {
    Family family = Family::Toroidal;
    int degree_l = 1;
    int order_m = 0;
    int overtone = 1; // k-th eigenvalue within the (family, l, m) radial pencil, 1-based
};

/// L2-orthonormal eigenmodes of the Stokes operator with Navier slip,
/// as coefficient vectors over a BasisSet. Eigenvalues ascending; within a
/// degenerate multiplet the order is lexicographic in (l, m, family).
class ModeSet {
public:
    ModeSet(std::shared_ptr<const BasisSet> basis, FluidParams params,
            Eigen::VectorXd eigenvalues, Eigen::MatrixXd coeffs, std::vector<ModeLabel> labels);

    int size() const { return static_cast<int>(eigenvalues_.size()); }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXd& coeffs() const { return coeffs_; }
    const std::vector<ModeLabel>& labels() const { return labels_; }
    const BasisSet& basis() const { return *basis_; }
    std::shared_ptr<const BasisSet> basis_ptr() const { return basis_; }
    const FluidParams& params() const { return params_; }

    /// Mode values at the volume nodes, (3 nv) x n_modes; same layout as BasisSet.
    Eigen::MatrixXd volume_values() const { return basis_->values() * coeffs_; }
    Eigen::MatrixXd volume_gradients() const { return basis_->gradients() * coeffs_; }

private:
    std::shared_ptr<const BasisSet> basis_;
    FluidParams params_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd coeffs_;
    std::vector<ModeLabel> labels_;
};

/// Solve the eigenproblem blockwise over the exactly-decoupled (family, l, m)
/// sectors and merge ascending with the (l, m, family) tie-break. The merged
/// spectrum agrees with solve_modes on the full pencil to rounding; blockwise
/// solves give exact multiplets and a canonical degenerate ordering.
ModeSet compute_modes(std::shared_ptr<const BasisSet> basis, const FluidParams& params, int n_modes);

/// Discrete constant of the Friedrichs/Korn inequality over the trial space:
/// sqrt of the smallest eigenvalue of ( |u|_Gamma^2 + |D(u)|^2 ) against the
/// H1 Gram. Always in (0,1) once the trial space contains a rigid rotation.
double korn_constant(const BasisSet& basis);

} // namespace cavityflow
