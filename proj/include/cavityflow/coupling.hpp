#pragma once

#include "cavityflow/stokes.hpp"

#include <array>

namespace cavityflow {

/// Diagonal inertia tensor of the coupled solid + fluid system about the
/// center of mass. Built from the solid part plus the fluid ball contribution
/// (diag 8 pi/15 at unit density), which keeps the coupled mass matrix B
/// positive definite by construction. The raw factory bypasses the solid
/// decomposition; build_B then has to catch unphysical inputs.
struct InertiaSpec {
    Vec3 solid_lambda = Vec3::Zero();
    Vec3 total = Vec3::Zero();
    bool raw = false;

    static InertiaSpec from_solid(const Vec3& solid);
    static InertiaSpec from_raw_total(const Vec3& total);

    Vec3 inverse() const { return total.cwiseInverse(); }
    Vec3 apply(const Vec3& a) const { return total.cwiseProduct(a); }
    Vec3 solve(const Vec3& b) const { return b.cwiseQuotient(total); }
};

/// Fluid ball inertia diagonal, 8 pi / 15.
double fluid_inertia_diagonal();

/// Every coefficient of the coupled Galerkin system:
///   moments:     m_k = int x cross phi_k
///   cross_gram:  P_kr = int phi_k cross phi_r  (three antisymmetric component matrices)
///   convection:  T_rkl = (phi_k . grad phi_l | phi_r)
///   convection_full: D_rkl = T_rkl - 2 (P_kr | I^{-1} m_l)
///   B:           B_rk = delta_rk - m_r^T I^{-1} m_k, Cholesky-factored
/// Rank-3 arrays are dense with index r + n k + n^2 l.
struct CouplingTensors {
    InertiaSpec inertia;
    Eigen::VectorXd eigenvalues;           // Lambda_k of the modes
    Eigen::MatrixXd moments;               // n x 3, row k = m_k
    std::array<Eigen::MatrixXd, 3> cross_gram;
    std::vector<double> convection;
    std::vector<double> convection_full;
    Eigen::MatrixXd B;
    Eigen::LLT<Eigen::MatrixXd> B_chol;

    int n() const { return static_cast<int>(eigenvalues.size()); }
    double tensor(const std::vector<double>& t, int r, int k, int l) const {
        return t[static_cast<std::size_t>(r + n() * (k + n() * l))];
    }
    Vec3 cross_gram_vec(int k, int r) const {
        return Vec3(cross_gram[0](k, r), cross_gram[1](k, r), cross_gram[2](k, r));
    }
    /// Modal angular-velocity map omega(c) = I^{-1} sum_k c_k m_k.
    Vec3 omega(const Eigen::VectorXd& c) const { return inertia.solve(moments.transpose() * c); }
};

Eigen::MatrixXd moment_vectors(const ModeSet& modes);

struct BFactor {
    Eigen::MatrixXd B;
    Eigen::LLT<Eigen::MatrixXd> chol;
};
BFactor build_B(const Eigen::MatrixXd& moments, const InertiaSpec& inertia);

struct ConvectionData {
    std::vector<double> T;                 // raw advection tensor
    std::array<Eigen::MatrixXd, 3> cross_gram;
};
ConvectionData convection_tensor(const ModeSet& modes);

CouplingTensors assemble_coupling(const ModeSet& modes, const InertiaSpec& inertia);

} // namespace cavityflow
