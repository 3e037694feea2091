#include "cavityflow/basis.hpp"

namespace cavityflow {

namespace {

// Closed forms used throughout, with R = r^l Y_lm the solid harmonic and
// u(s) the radial profile in s = r^2:
//   toroidal:  v = u(s) * (grad R x x)
//   poloidal:  v = -2l u'(s) R x + ((l+1) u + 2 s u') grad R
// Both follow from curl(x u R) and curl curl(x u R) with harmonic R.
struct FieldEval {
    Vec3 value;
    Mat3 grad; // grad(i, j) = d_j v_i
};

FieldEval eval_toroidal(const SolidHarmonic& sh, const Poly1& u, const Poly1& du,
                        const Vec3& x, bool want_grad) {
    const double s = x.squaredNorm();
    const double us = u.eval(s);
    Vec3 gR;
    for (int a = 0; a < 3; ++a) gR(a) = sh.grad[a].eval(x);
    const Vec3 w = gR.cross(x);

    FieldEval out;
    out.value = us * w;
    if (!want_grad) return out;

    const double dus = du.eval(s);
    Mat3 H;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) H(a, b) = sh.hess[a][b].eval(x);
    for (int j = 0; j < 3; ++j) {
        const Vec3 dW = Vec3(H.col(j)).cross(x) + gR.cross(Vec3::Unit(j));
        out.grad.col(j) = 2.0 * dus * x(j) * w + us * dW;
    }
    return out;
}

FieldEval eval_poloidal(const SolidHarmonic& sh, const Poly1& u, const Poly1& du,
                        const Poly1& ddu, const Vec3& x, bool want_grad) {
    const double s = x.squaredNorm();
    const double l = static_cast<double>(sh.l);
    const double us = u.eval(s);
    const double dus = du.eval(s);
    const double alpha = -2.0 * l * dus;
    const double P = (l + 1.0) * us + 2.0 * s * dus;
    const double R = sh.value.eval(x);
    Vec3 gR;
    for (int a = 0; a < 3; ++a) gR(a) = sh.grad[a].eval(x);

    FieldEval out;
    out.value = alpha * R * x + P * gR;
    if (!want_grad) return out;

    const double ddus = ddu.eval(s);
    const double dalpha = -2.0 * l * ddus;
    const double dP = (l + 3.0) * dus + 2.0 * s * ddus;
    Mat3 H;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) H(a, b) = sh.hess[a][b].eval(x);
    for (int j = 0; j < 3; ++j) {
        out.grad.col(j) = 2.0 * dalpha * x(j) * R * x + alpha * (gR(j) * x + R * Vec3::Unit(j)) +
                          2.0 * dP * x(j) * gR + P * H.col(j);
    }
    return out;
}

} // namespace

BasisSet::BasisSet(std::vector<BasisFunction> functions, QuadratureGrid grid, RadialFamily radial)
    : functions_(std::move(functions)), grid_(std::move(grid)), radial_(radial) {
    if (functions_.empty()) throw ConfigError("basis must contain at least one function");
    for (const auto& f : functions_) {
        if (f.degree_l < 1) throw ConfigError("basis function degree l must be >= 1");
        if (std::abs(f.order_m) > f.degree_l) throw ConfigError("basis function order |m| must be <= l");
        if (f.radial_j < 0) throw ConfigError("basis function radial index must be >= 0");
        l_max_ = std::max(l_max_, f.degree_l);
        n_rad_ = std::max(n_rad_, f.radial_j + 1);
    }
    harmonics_.resize(static_cast<std::size_t>(l_max_ * l_max_ + 2 * l_max_));
    for (int l = 1; l <= l_max_; ++l)
        for (int m = -l; m <= l; ++m)
            harmonics_[static_cast<std::size_t>(harmonic_index(l, m))] = real_solid_harmonic(l, m);

    profiles_.resize(static_cast<std::size_t>(2 * n_rad_));
    const Poly1 one_minus_s({1.0, -1.0});
    for (int j = 0; j < n_rad_; ++j) {
        const Poly1 q = radial_polynomial(radial_, j);
        Profile tor{q, q.derivative(), q.derivative().derivative()};
        const Poly1 h = one_minus_s * q;
        Profile pol{h, h.derivative(), h.derivative().derivative()};
        profiles_[static_cast<std::size_t>(j)] = std::move(tor);
        profiles_[static_cast<std::size_t>(n_rad_ + j)] = std::move(pol);
    }
    evaluate_cache();
}

const BasisSet::Profile& BasisSet::profile(const BasisFunction& f) const {
    const int idx = (f.family == Family::Toroidal ? 0 : n_rad_) + f.radial_j;
    return profiles_[static_cast<std::size_t>(idx)];
}

Vec3 BasisSet::evaluate(std::size_t i, const Vec3& x) const {
    const BasisFunction& f = functions_[i];
    const SolidHarmonic& sh = harmonics_[static_cast<std::size_t>(harmonic_index(f.degree_l, f.order_m))];
    const Profile& pr = profile(f);
    if (f.family == Family::Toroidal) return eval_toroidal(sh, pr.u, pr.du, x, false).value;
    return eval_poloidal(sh, pr.u, pr.du, pr.ddu, x, false).value;
}

Mat3 BasisSet::evaluate_gradient(std::size_t i, const Vec3& x) const {
    const BasisFunction& f = functions_[i];
    const SolidHarmonic& sh = harmonics_[static_cast<std::size_t>(harmonic_index(f.degree_l, f.order_m))];
    const Profile& pr = profile(f);
    if (f.family == Family::Toroidal) return eval_toroidal(sh, pr.u, pr.du, x, true).grad;
    return eval_poloidal(sh, pr.u, pr.du, pr.ddu, x, true).grad;
}

std::vector<int> BasisSet::block(Family family, int l, int m) const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < functions_.size(); ++i) {
        const auto& f = functions_[i];
        if (f.family == family && f.degree_l == l && f.order_m == m) idx.push_back(static_cast<int>(i));
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return functions_[static_cast<std::size_t>(a)].radial_j < functions_[static_cast<std::size_t>(b)].radial_j;
    });
    return idx;
}

void BasisSet::evaluate_cache() {
    const Eigen::Index nv = grid_.n_volume();
    const Eigen::Index ns = grid_.n_surface();
    const Eigen::Index n = static_cast<Eigen::Index>(functions_.size());
    values_.resize(3 * nv, n);
    gradients_.resize(9 * nv, n);
    traces_.resize(3 * ns, n);

    for (Eigen::Index i = 0; i < n; ++i) {
        const BasisFunction& f = functions_[static_cast<std::size_t>(i)];
        const SolidHarmonic& sh =
            harmonics_[static_cast<std::size_t>(harmonic_index(f.degree_l, f.order_m))];
        const Profile& pr = profile(f);
        const bool tor = f.family == Family::Toroidal;
        for (Eigen::Index p = 0; p < nv; ++p) {
            const Vec3 x = grid_.volume_nodes.row(p);
            const FieldEval fe = tor ? eval_toroidal(sh, pr.u, pr.du, x, true)
                                     : eval_poloidal(sh, pr.u, pr.du, pr.ddu, x, true);
            values_.block<3, 1>(3 * p, i) = fe.value;
            Eigen::Map<Mat3>(gradients_.col(i).data() + 9 * p) = fe.grad;
        }
        for (Eigen::Index p = 0; p < ns; ++p) {
            const Vec3 x = grid_.surface_nodes.row(p);
            const FieldEval fe = tor ? eval_toroidal(sh, pr.u, pr.du, x, false)
                                     : eval_poloidal(sh, pr.u, pr.du, pr.ddu, x, false);
            traces_.block<3, 1>(3 * p, i) = fe.value;
        }
    }
}

BasisSet build_basis(int l_max, int n_rad, FamilySet families, RadialFamily radial) {
    if (l_max < 1) throw ConfigError("build_basis: l_max must be >= 1");
    if (n_rad < 1) throw ConfigError("build_basis: n_rad must be >= 1");
    if (families.empty()) throw ConfigError("build_basis: families must be nonempty");

    std::vector<BasisFunction> fns;
    for (Family fam : {Family::Toroidal, Family::Poloidal}) {
        if (!families.has(fam)) continue;
        for (int l = 1; l <= l_max; ++l)
            for (int m = -l; m <= l; ++m)
                for (int j = 0; j < n_rad; ++j) fns.push_back({fam, l, m, j});
    }

    // Poloidal fields reach degree l_max + 2 n_rad - 1; triple products in the
    // convection tensor need three times that from the volume rule.
    const int field_degree = l_max + 2 * n_rad - 1;
    QuadratureGrid grid = make_grid(l_max, 3 * field_degree);
    return BasisSet(std::move(fns), std::move(grid), radial);
}

} // namespace cavityflow
