#include "cavityflow/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cavityflow {

namespace {

// Weighted Gram helper: out = lhs^T diag(w per node, replicated per component) rhs.
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs,
                              const Eigen::VectorXd& node_weights, int comps) {
    Eigen::VectorXd w(node_weights.size() * comps);
    for (Eigen::Index p = 0; p < node_weights.size(); ++p)
        w.segment(comps * p, comps).setConstant(node_weights(p));
    return lhs.transpose() * w.asDiagonal() * rhs;
}

// Reorder gradient rows so that entry d_j v_i lands where d_i v_j sits;
// pairing a column of this with a gradient column gives grad u : grad v^T.
Eigen::MatrixXd transpose_gradient_rows(const Eigen::MatrixXd& grads) {
    Eigen::MatrixXd out(grads.rows(), grads.cols());
    const Eigen::Index nv = grads.rows() / 9;
    for (Eigen::Index p = 0; p < nv; ++p)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                out.row(9 * p + 3 * j + i) = grads.row(9 * p + 3 * i + j);
    return out;
}

} // namespace

Forms assemble_forms(const BasisSet& basis, const FluidParams& params) {
    params.validate();
    if (basis.size() == 0) throw AssemblyError("assemble_forms: empty basis");
    const int field_degree = basis.l_max() + 2 * basis.n_rad() - 1;
    if (basis.grid().volume_degree < 2 * field_degree)
        throw AssemblyError("assemble_forms: grid exactness insufficient for the basis degree");

    Forms f;
    f.mass = weighted_gram(basis.values(), basis.values(), basis.grid().volume_weights, 3);

    // 2 nu (D(u)|D(v)) = nu (grad u : grad v + grad u : grad v^T)
    const Eigen::MatrixXd gradsT = transpose_gradient_rows(basis.gradients());
    Eigen::MatrixXd a = params.nu * (weighted_gram(basis.gradients(), basis.gradients(),
                                                   basis.grid().volume_weights, 9) +
                                     weighted_gram(basis.gradients(), gradsT,
                                                   basis.grid().volume_weights, 9));
    a += params.zeta * weighted_gram(basis.traces(), basis.traces(), basis.grid().surface_weights, 3);

    // Symmetrize away rounding; both integrands are symmetric in (i, j).
    f.mass = 0.5 * (f.mass + f.mass.transpose()).eval();
    f.dissipation = 0.5 * (a + a.transpose());
    return f;
}

Eigen::MatrixXd assemble_h1_gram(const BasisSet& basis) {
    Eigen::MatrixXd h = weighted_gram(basis.values(), basis.values(), basis.grid().volume_weights, 3) +
                        weighted_gram(basis.gradients(), basis.gradients(), basis.grid().volume_weights, 9);
    return 0.5 * (h + h.transpose()).eval();
}

EigenPairs solve_modes(const Eigen::MatrixXd& M, const Eigen::MatrixXd& A, int n_modes) {
    if (M.rows() != M.cols() || A.rows() != A.cols() || M.rows() != A.rows())
        throw NumericalError("solve_modes: dimension mismatch");
    if (n_modes < 1 || n_modes > M.rows()) throw NumericalError("solve_modes: invalid mode count");

    // Cholesky reduction requires an SPD mass matrix; Eigen does not report
    // the internal factorization failure, so check it up front.
    if (Eigen::LLT<Eigen::MatrixXd>(M).info() != Eigen::Success)
        throw NumericalError("solve_modes: mass matrix is not positive definite");

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
        throw NumericalError("solve_modes: generalized eigensolver failed (mass matrix not SPD?)");

    EigenPairs out;
    out.values = es.eigenvalues().head(n_modes);
    out.vectors = es.eigenvectors().leftCols(n_modes);
    return out;
}

ModeSet::ModeSet(std::shared_ptr<const BasisSet> basis, FluidParams params,
                 Eigen::VectorXd eigenvalues, Eigen::MatrixXd coeffs, std::vector<ModeLabel> labels)
    : basis_(std::move(basis)), params_(params), eigenvalues_(std::move(eigenvalues)),
      coeffs_(std::move(coeffs)), labels_(std::move(labels)) {
    // ascending up to the degeneracy-clustering tolerance (the lexicographic
    // tie-break may reorder inside a rounding-level multiplet)
    for (Eigen::Index i = 0; i + 1 < eigenvalues_.size(); ++i)
        if (eigenvalues_(i) > eigenvalues_(i + 1) * (1.0 + 1e-8) + 1e-12)
            throw NumericalError("ModeSet: eigenvalues not ascending");
    const double floor = params_.experimental_zero_zeta ? -1e-9 : 0.0;
    if (eigenvalues_.size() > 0 && !(eigenvalues_(0) > floor))
        throw NumericalError("ModeSet: nonpositive Stokes eigenvalue");
}

ModeSet compute_modes(std::shared_ptr<const BasisSet> basis, const FluidParams& params, int n_modes) {
    params.validate();
    if (n_modes < 1 || n_modes > static_cast<int>(basis->size()))
        throw ConfigError("modes.count must be in [1, basis size]");

    const Forms forms = assemble_forms(*basis, params);

    struct Entry {
        double lambda;
        ModeLabel label;
        Eigen::VectorXd coeff; // over the full basis
    };
    std::vector<Entry> entries;
    entries.reserve(basis->size());

    for (Family fam : {Family::Toroidal, Family::Poloidal}) {
        for (int l = 1; l <= basis->l_max(); ++l) {
            for (int m = -l; m <= l; ++m) {
                const std::vector<int> idx = basis->block(fam, l, m);
                if (idx.empty()) continue;
                const int nb = static_cast<int>(idx.size());
                Eigen::MatrixXd Mb(nb, nb), Ab(nb, nb);
                for (int a = 0; a < nb; ++a)
                    for (int b = 0; b < nb; ++b) {
                        Mb(a, b) = forms.mass(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
                        Ab(a, b) = forms.dissipation(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
                    }
                const EigenPairs ep = solve_modes(Mb, Ab, nb);
                for (int k = 0; k < nb; ++k) {
                    Entry e;
                    e.lambda = ep.values(k);
                    e.label = {fam, l, m, k + 1};
                    e.coeff = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
                    for (int a = 0; a < nb; ++a)
                        e.coeff(idx[static_cast<std::size_t>(a)]) = ep.vectors(a, k);
                    entries.push_back(std::move(e));
                }
            }
        }
    }

    // Sort by eigenvalue, then impose the (l, m, family) lexicographic order
    // inside each rounding-level multiplet (relative gap below 1e-8).
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.lambda < b.lambda; });
    const auto label_less = [](const Entry& a, const Entry& b) {
        if (a.label.degree_l != b.label.degree_l) return a.label.degree_l < b.label.degree_l;
        if (a.label.order_m != b.label.order_m) return a.label.order_m < b.label.order_m;
        return static_cast<int>(a.label.family) < static_cast<int>(b.label.family);
    };
    for (std::size_t lo = 0; lo < entries.size();) {
        std::size_t hi = lo + 1;
        while (hi < entries.size() &&
               entries[hi].lambda - entries[hi - 1].lambda <=
                   1e-8 * std::max(std::abs(entries[hi].lambda), 1e-300))
            ++hi;
        std::sort(entries.begin() + static_cast<std::ptrdiff_t>(lo),
                  entries.begin() + static_cast<std::ptrdiff_t>(hi), label_less);
        lo = hi;
    }

    Eigen::VectorXd lam(n_modes);
    Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(basis->size()), n_modes);
    std::vector<ModeLabel> labels(static_cast<std::size_t>(n_modes));
    for (int k = 0; k < n_modes; ++k) {
        lam(k) = entries[static_cast<std::size_t>(k)].lambda;
        coeffs.col(k) = entries[static_cast<std::size_t>(k)].coeff;
        labels[static_cast<std::size_t>(k)] = entries[static_cast<std::size_t>(k)].label;
    }
    return ModeSet(std::move(basis), params, std::move(lam), std::move(coeffs), std::move(labels));
}

double korn_constant(const BasisSet& basis) {
    // With nu = 1/2, zeta = 1 the dissipation form is |D(u)|^2 + |u|_Gamma^2.
    const Forms f = assemble_forms(basis, FluidParams{0.5, 1.0, false});
    const Eigen::MatrixXd h = assemble_h1_gram(basis);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(f.dissipation, h, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw NumericalError("korn_constant: eigensolver failed");
    const double mu = es.eigenvalues()(0);
    if (!(mu > 0.0)) throw NumericalError("korn_constant: nonpositive Rayleigh quotient");
    return std::sqrt(mu);
}

} // namespace cavityflow
