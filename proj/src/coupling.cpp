#include "cavityflow/coupling.hpp"

#include <cmath>

namespace cavityflow {

double fluid_inertia_diagonal() { return 8.0 * M_PI / 15.0; }

InertiaSpec InertiaSpec::from_solid(const Vec3& solid) {
    for (int i = 0; i < 3; ++i)
        if (solid(i) < 0.0) throw ConfigError("inertia.solid_lambda entries must be >= 0");
    InertiaSpec s;
    s.solid_lambda = solid;
    s.total = solid + Vec3::Constant(fluid_inertia_diagonal());
    s.raw = false;
    // The coupled system is a rigid mass distribution, so its total moments
    // must satisfy the triangle inequalities.
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        if (s.total(i) + s.total(j) < s.total(k) * (1.0 - 1e-12))
            throw ConfigError("inertia: total moments violate the triangle inequality");
    }
    return s;
}

InertiaSpec InertiaSpec::from_raw_total(const Vec3& total) {
    for (int i = 0; i < 3; ++i)
        if (!(total(i) > 0.0)) throw ConfigError("inertia.raw_lambda entries must be > 0");
    InertiaSpec s;
    s.solid_lambda = total - Vec3::Constant(fluid_inertia_diagonal());
    s.total = total;
    s.raw = true;
    return s;
}

namespace {

// Component slice of the (3 nv) x n value layout: rows 3p + comp.
Eigen::MatrixXd component_slice(const Eigen::MatrixXd& vals, int comp) {
    const Eigen::Index nv = vals.rows() / 3;
    Eigen::MatrixXd out(nv, vals.cols());
    for (Eigen::Index p = 0; p < nv; ++p) out.row(p) = vals.row(3 * p + comp);
    return out;
}

} // namespace

Eigen::MatrixXd moment_vectors(const ModeSet& modes) {
    const BasisSet& basis = modes.basis();
    const Eigen::MatrixXd vals = modes.volume_values();
    const Eigen::VectorXd& w = basis.grid().volume_weights;

    std::array<Eigen::MatrixXd, 3> v;
    for (int a = 0; a < 3; ++a) v[static_cast<std::size_t>(a)] = component_slice(vals, a);
    const auto& x = basis.grid().volume_nodes;

    Eigen::MatrixXd m(modes.size(), 3);
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        // (x cross v)_a = x_b v_c - x_c v_b
        m.col(a) = v[static_cast<std::size_t>(c)].transpose() * w.cwiseProduct(x.col(b)) -
                   v[static_cast<std::size_t>(b)].transpose() * w.cwiseProduct(x.col(c));
    }
    return m;
}

BFactor build_B(const Eigen::MatrixXd& moments, const InertiaSpec& inertia) {
    const Eigen::Index n = moments.rows();
    BFactor out;
    // B_rk = delta_rk - m_r . I^{-1} m_k; the sign follows from
    // (K phi_k | phi_r) = -(I^{-1} m_k | m_r) via the triple-product identity.
    out.B = Eigen::MatrixXd::Identity(n, n) -
            moments * inertia.inverse().asDiagonal() * moments.transpose();
    out.B = 0.5 * (out.B + out.B.transpose()).eval();
    out.chol.compute(out.B);
    if (out.chol.info() != Eigen::Success)
        throw ConfigError("coupled mass matrix B is not positive definite (unphysical inertia input)");
    return out;
}

ConvectionData convection_tensor(const ModeSet& modes) {
    const BasisSet& basis = modes.basis();
    const Eigen::Index nv = basis.grid().n_volume();
    const int n = modes.size();
    if (basis.gradients().size() == 0) throw AssemblyError("convection_tensor: missing gradient cache");
    const int field_degree = basis.l_max() + 2 * basis.n_rad() - 1;
    if (basis.grid().volume_degree < 3 * field_degree)
        throw AssemblyError("convection_tensor: grid exactness insufficient for triple products");

    const Eigen::MatrixXd vals = modes.volume_values();
    const Eigen::MatrixXd grads = modes.volume_gradients();
    const Eigen::VectorXd& w = basis.grid().volume_weights;

    ConvectionData out;
    out.T.assign(static_cast<std::size_t>(n) * n * n, 0.0);

    std::array<Eigen::MatrixXd, 3> vslice;
    for (int a = 0; a < 3; ++a) vslice[static_cast<std::size_t>(a)] = component_slice(vals, a);

    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        out.cross_gram[static_cast<std::size_t>(a)] =
            vslice[static_cast<std::size_t>(b)].transpose() * w.asDiagonal() * vslice[static_cast<std::size_t>(c)] -
            vslice[static_cast<std::size_t>(c)].transpose() * w.asDiagonal() * vslice[static_cast<std::size_t>(b)];
        // P_kk = 0 and P_kr = -P_rk hold exactly; enforce against rounding drift.
        auto& P = out.cross_gram[static_cast<std::size_t>(a)];
        P = 0.5 * (P - P.transpose()).eval();
    }

    // Weighted values once; per k, advect every mode along phi_k and contract.
    Eigen::MatrixXd vals_w = vals;
    for (Eigen::Index p = 0; p < nv; ++p) vals_w.middleRows(3 * p, 3) *= w(p);

    Eigen::MatrixXd advected(3 * nv, n);
    for (int k = 0; k < n; ++k) {
        for (Eigen::Index p = 0; p < nv; ++p) {
            const Vec3 vk = vals.block<3, 1>(3 * p, k);
            for (int l = 0; l < n; ++l) {
                const Eigen::Map<const Mat3> Gl(grads.col(l).data() + 9 * p);
                advected.block<3, 1>(3 * p, l) = Gl * vk;
            }
        }
        const Eigen::MatrixXd Tk = vals_w.transpose() * advected; // (r, l)
        for (int l = 0; l < n; ++l)
            for (int r = 0; r < n; ++r)
                out.T[static_cast<std::size_t>(r + n * (k + n * l))] = Tk(r, l);
    }
    return out;
}

CouplingTensors assemble_coupling(const ModeSet& modes, const InertiaSpec& inertia) {
    CouplingTensors t;
    t.inertia = inertia;
    t.eigenvalues = modes.eigenvalues();
    t.moments = moment_vectors(modes);
    ConvectionData conv = convection_tensor(modes);
    t.cross_gram = std::move(conv.cross_gram);
    t.convection = std::move(conv.T);

    BFactor bf = build_B(t.moments, inertia);
    t.B = std::move(bf.B);
    t.B_chol = std::move(bf.chol);

    const int n = t.n();
    const Vec3 iinv = inertia.inverse();
    t.convection_full.resize(t.convection.size());
    for (int l = 0; l < n; ++l) {
        const Vec3 wl = iinv.cwiseProduct(t.moments.row(l).transpose());
        for (int k = 0; k < n; ++k)
            for (int r = 0; r < n; ++r) {
                const Vec3 pkr = t.cross_gram_vec(k, r);
                t.convection_full[static_cast<std::size_t>(r + n * (k + n * l))] =
                    t.convection[static_cast<std::size_t>(r + n * (k + n * l))] - 2.0 * pkr.dot(wl);
            }
    }
    return t;
}

} // namespace cavityflow
