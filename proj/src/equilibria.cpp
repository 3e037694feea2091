#include "cavityflow/equilibria.hpp"

#include "cavityflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cavityflow {

std::vector<Equilibrium> find_equilibria(const InertiaSpec& inertia, double momentum) {
    if (!(momentum > 0.0)) throw ConfigError("momentum must be > 0");

    // The inertia tensor is diagonal; its eigenspaces are groups of equal entries.
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return inertia.total(a) < inertia.total(b); });

    std::vector<Equilibrium> out;
    std::size_t i = 0;
    std::vector<std::vector<int>> groups;
    while (i < 3) {
        std::vector<int> group{order[i]};
        std::size_t j = i + 1;
        while (j < 3 && std::abs(inertia.total(order[j]) - inertia.total(order[i])) <=
                            1e-12 * std::abs(inertia.total(order[i]))) {
            group.push_back(order[j]);
            ++j;
        }
        groups.push_back(std::move(group));
        i = j;
    }

    for (int sign : {+1, -1}) {
        for (const auto& group : groups) {
            Equilibrium eq;
            eq.lambda_star = inertia.total(group.front());
            eq.manifold_dim = static_cast<int>(group.size());
            eq.eigenspace.resize(3, eq.manifold_dim);
            for (int g = 0; g < eq.manifold_dim; ++g)
                eq.eigenspace.col(g) = Vec3::Unit(group[static_cast<std::size_t>(g)]);
            eq.sign = sign;
            eq.a_star = sign * (momentum / eq.lambda_star) * eq.eigenspace.col(0);
            out.push_back(std::move(eq));
        }
    }
    // ascending lambda_star; + representatives first
    std::stable_sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
        if (a.lambda_star != b.lambda_star) return a.lambda_star < b.lambda_star;
        return a.sign > b.sign;
    });
    return out;
}

Linearization linearize(const CouplingTensors& tensors, const Equilibrium& eq) {
    const int n = tensors.n();
    const Vec3 astar = eq.a_star;
    const Vec3 Ia = tensors.inertia.apply(astar);

    {
        // The equilibrium must actually be a fixed point of the assembled system.
        SimState s;
        s.c = Eigen::VectorXd::Zero(n);
        s.a = astar;
        const Derivative d = rhs(s, tensors);
        const double scale = std::max(1.0, astar.norm() * Ia.norm());
        if (std::sqrt(d.cdot.squaredNorm() + d.adot.squaredNorm()) > 1e-12 * scale)
            throw ConfigError("linearize: input is not an equilibrium of the assembled system");
    }

    const Eigen::MatrixXd Wm = tensors.moments * tensors.inertia.inverse().asDiagonal();

    // Fluid block: -(Lambda + C(a*)) with
    // C(a*)_{rk} = (w_k x Ia | w_r) + 2 (a* | P_kr).
    Eigen::MatrixXd Jcc = -Wm * (-hat(Ia)) * Wm.transpose();
    for (int al = 0; al < 3; ++al)
        Jcc -= 2.0 * astar(al) * tensors.cross_gram[static_cast<std::size_t>(al)].transpose();
    Jcc -= Eigen::MatrixXd(tensors.eigenvalues.asDiagonal());

    // d/da of -E(a) at a*: row r = w_r^T (-hat(Ia) + hat(a*) I)
    const Eigen::MatrixXd Jca = Wm * (-hat(Ia) + hat(astar) * tensors.inertia.total.asDiagonal());

    // d/dc of (omega - a) x Ia at (0, a*): column k = w_k x Ia = -hat(Ia) w_k
    const Eigen::MatrixXd Jac = -hat(Ia) * Wm.transpose();

    // d/da of (omega - a) x Ia at (0, a*)
    const Mat3 Jaa = hat(Ia) - hat(astar) * tensors.inertia.total.asDiagonal();

    Linearization lin;
    lin.n_fluid = n;
    lin.jacobian.resize(n + 3, n + 3);
    lin.jacobian.topLeftCorner(n, n) = Jcc;
    lin.jacobian.topRightCorner(n, 3) = Jca;
    lin.jacobian.bottomLeftCorner(3, n) = Jac;
    lin.jacobian.bottomRightCorner(3, 3) = Jaa;

    lin.neg_generator.resize(n + 3, n + 3);
    lin.neg_generator.topRows(n) = tensors.B_chol.solve(lin.jacobian.topRows(n));
    lin.neg_generator.bottomRows(3) =
        tensors.inertia.inverse().asDiagonal() * lin.jacobian.bottomRows(3);
    return lin;
}

const char* classification_name(Classification c) {
    return c == Classification::NormallyStable ? "normally_stable" : "normally_hyperbolic";
}

StabilityReport classify(const Linearization& lin, const CouplingTensors& tensors,
                         const Equilibrium& eq) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(lin.neg_generator, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericalError("classify: eigensolver failed");

    StabilityReport rep;
    rep.spectrum = es.eigenvalues();

    // Threshold scales with the spectral content: Lambda_0 and |a*|.
    const double scale = std::max(tensors.eigenvalues.size() > 0 ? tensors.eigenvalues(0) : 1.0,
                                  eq.a_star.norm());
    rep.cluster_threshold = 1e-9 * scale;

    int zero = 0, unstable = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rep.spectrum.size(); ++i) {
        const std::complex<double> z = rep.spectrum(i);
        if (std::abs(z) < rep.cluster_threshold) {
            ++zero;
            continue;
        }
        if (z.real() > rep.cluster_threshold) ++unstable;
        gap = std::min(gap, std::abs(z.real()));
    }
    rep.zero_multiplicity = zero;
    rep.unstable_count = unstable;
    rep.spectral_gap = gap;
    rep.classification =
        unstable == 0 ? Classification::NormallyStable : Classification::NormallyHyperbolic;

    // Semi-simple zero: geometric multiplicity (rank deficiency) must match the
    // algebraic cluster count; a Jordan block here flags a too-coarse truncation.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lin.neg_generator);
    const int geometric = static_cast<int>(
        (svd.singularValues().array() < rep.cluster_threshold).count());
    if (geometric != rep.zero_multiplicity)
        throw NumericalError("classify: zero cluster is not semi-simple within tolerance");
    return rep;
}

} // namespace cavityflow
