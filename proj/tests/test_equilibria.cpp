#include "cavityflow/dynamics.hpp"
#include "cavityflow/equilibria.hpp"
#include "cavityflow/stokes.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace cavityflow;

namespace {

CouplingTensors coupled_tensors(const Vec3& solid, int n_modes, int l_max = 2, int n_rad = 2) {
    auto basis = std::make_shared<const BasisSet>(build_basis(l_max, n_rad, FamilySet::both()));
    const ModeSet modes = compute_modes(basis, FluidParams{1.0, 1.0, false}, n_modes);
    return assemble_coupling(modes, InertiaSpec::from_solid(solid));
}

CouplingTensors decoupled_tensors(const Vec3& raw_total) {
    auto basis =
        std::make_shared<const BasisSet>(build_basis(1, 2, FamilySet::only(Family::Poloidal)));
    const ModeSet modes = compute_modes(basis, FluidParams{1.0, 1.0, false}, 6);
    return assemble_coupling(modes, InertiaSpec::from_raw_total(raw_total));
}

} // namespace

TEST_CASE("equilibria enumeration for distinct, degenerate and spherical inertia") {
    const InertiaSpec distinct = InertiaSpec::from_raw_total(Vec3(1, 2, 3));
    const auto eqs = find_equilibria(distinct, 3.0);
    REQUIRE(eqs.size() == 6); // +/- per axis
    for (const auto& eq : eqs) {
        CHECK(eq.manifold_dim == 1);
        CHECK((distinct.apply(eq.a_star) - eq.lambda_star * eq.a_star).norm() < 1e-12);
        CHECK(distinct.apply(eq.a_star).norm() == doctest::Approx(3.0).epsilon(1e-14));
    }
    CHECK(eqs[0].a_star.cwiseAbs().maxCoeff() == doctest::Approx(3.0));   // lambda = 1
    CHECK(eqs[2].a_star.cwiseAbs().maxCoeff() == doctest::Approx(1.5));   // lambda = 2
    CHECK(eqs[4].a_star.cwiseAbs().maxCoeff() == doctest::Approx(1.0));   // lambda = 3

    const auto degen = find_equilibria(InertiaSpec::from_raw_total(Vec3(2, 2, 3)), 1.0);
    REQUIRE(degen.size() == 4);
    CHECK(degen[0].manifold_dim == 2);
    CHECK(degen[2].manifold_dim == 1);

    const auto spherical = find_equilibria(InertiaSpec::from_raw_total(Vec3(2, 2, 2)), 1.0);
    REQUIRE(spherical.size() == 2);
    CHECK(spherical[0].manifold_dim == 3);

    CHECK_THROWS_AS(find_equilibria(distinct, 0.0), ConfigError);
}

TEST_CASE("analytic jacobian matches central differences of the rhs") {
    const CouplingTensors t = coupled_tensors(Vec3(0.5, 1.5, 2.5), 16);
    const auto eqs = find_equilibria(t.inertia, 2.0);
    const Equilibrium& eq = eqs[2]; // middle axis, + sign
    const Linearization lin = linearize(t, eq);

    const int n = t.n();
    const double h = 1e-6;
    Eigen::MatrixXd fd(n + 3, n + 3);
    auto eval = [&](const Eigen::VectorXd& z) {
        SimState s;
        s.c = z.head(n);
        s.a = z.tail<3>();
        const Derivative d = rhs(s, t);
        Eigen::VectorXd out(n + 3);
        // mass-weighted form: (B cdot, I adot) is what the jacobian differentiates
        out.head(n) = t.B * d.cdot;
        out.tail<3>() = t.inertia.apply(d.adot);
        return out;
    };
    Eigen::VectorXd z0(n + 3);
    z0.setZero();
    z0.tail<3>() = eq.a_star;
    for (int j = 0; j < n + 3; ++j) {
        Eigen::VectorXd zp = z0, zm = z0;
        zp(j) += h;
        zm(j) -= h;
        fd.col(j) = (eval(zp) - eval(zm)) / (2 * h);
    }
    const double scale = lin.jacobian.cwiseAbs().maxCoeff();
    CHECK((fd - lin.jacobian).cwiseAbs().maxCoeff() < 1e-6 * scale);

    // the equilibrium is an exact fixed point
    SimState s;
    s.c = Eigen::VectorXd::Zero(n);
    s.a = eq.a_star;
    const Derivative d = rhs(s, t);
    CHECK(std::sqrt(d.cdot.squaredNorm() + d.adot.squaredNorm()) < 1e-13);
}

TEST_CASE("linearize rejects non-equilibrium input") {
    const CouplingTensors t = coupled_tensors(Vec3(0.5, 1.5, 2.5), 10);
    Equilibrium fake;
    fake.a_star = Vec3(1.0, 1.0, 0.0); // not a principal axis
    fake.lambda_star = t.inertia.total(0);
    fake.eigenspace = Vec3::UnitX();
    CHECK_THROWS_AS(linearize(t, fake), ConfigError);
}

TEST_CASE("decoupled body block reproduces the rigid Euler spectrum") {
    // With zero moment coupling the body block is exactly the 3x3 rigid
    // linearization: eigenvalues {0, +mu, -mu} with
    // mu^2 = -|a*|^2 (l*-li)(l*-lj) / (li lj).
    const Vec3 lambdas(1.0, 2.0, 3.0);
    const CouplingTensors t = decoupled_tensors(lambdas);
    const double momentum = 2.0;

    for (int axis : {0, 1, 2}) {
        const auto eqs = find_equilibria(t.inertia, momentum);
        const Equilibrium& eq = eqs[static_cast<std::size_t>(2 * axis)];
        const Linearization lin = linearize(t, eq);
        Eigen::EigenSolver<Eigen::MatrixXd> es(lin.neg_generator);

        const int i = (axis + 1) % 3, j = (axis + 2) % 3;
        const double mu2 = -eq.a_star.squaredNorm() * (lambdas(axis) - lambdas(i)) *
                           (lambdas(axis) - lambdas(j)) / (lambdas(i) * lambdas(j));
        // collect the three body eigenvalues: those not of fluid size (-Lambda)
        std::vector<std::complex<double>> body;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
            if (es.eigenvalues()(k).real() > -1.0) body.push_back(es.eigenvalues()(k));
        REQUIRE(body.size() == 3);
        double max_abs = 0.0;
        for (const auto& z : body) max_abs = std::max(max_abs, std::abs(z));
        if (mu2 > 0.0) {
            CHECK(max_abs == doctest::Approx(std::sqrt(mu2)).epsilon(1e-9));
            int realpos = 0;
            for (const auto& z : body)
                if (z.real() > 1e-10) ++realpos;
            CHECK(realpos == 1);
        } else {
            CHECK(max_abs == doctest::Approx(std::sqrt(-mu2)).epsilon(1e-9));
            for (const auto& z : body) CHECK(std::abs(z.real()) < 1e-10);
        }
    }
}

TEST_CASE("theorem-style classification counts for distinct inertia") {
    const CouplingTensors t = coupled_tensors(Vec3(0.5, 1.5, 2.5), 16);
    const auto eqs = find_equilibria(t.inertia, 3.0);

    std::vector<int> expected_unstable{2, 1, 0};
    int row = 0;
    for (std::size_t e = 0; e < eqs.size(); ++e) {
        if (eqs[e].sign < 0) continue;
        const Linearization lin = linearize(t, eqs[e]);
        const StabilityReport rep = classify(lin, t, eqs[e]);
        CHECK(rep.unstable_count == expected_unstable[static_cast<std::size_t>(row)]);
        CHECK(rep.zero_multiplicity == eqs[e].manifold_dim);
        CHECK((rep.classification == Classification::NormallyStable) ==
              (rep.unstable_count == 0));
        CHECK(rep.spectral_gap > 0.0);

        // conjugate-pair symmetry of the real pencil
        for (Eigen::Index k = 0; k < rep.spectrum.size(); ++k) {
            const std::complex<double> z = rep.spectrum(k);
            if (std::abs(z.imag()) < 1e-12) continue;
            bool found = false;
            for (Eigen::Index k2 = 0; k2 < rep.spectrum.size(); ++k2)
                if (std::abs(rep.spectrum(k2) - std::conj(z)) < 1e-8 * std::abs(z)) found = true;
            CHECK(found);
        }
        ++row;
    }
}

TEST_CASE("zero multiplicity equals the manifold dimension for degenerate inertia") {
    const CouplingTensors t2 = coupled_tensors(Vec3(0.5, 0.5, 1.5), 16);
    const auto eqs2 = find_equilibria(t2.inertia, 1.0);
    REQUIRE(eqs2[0].manifold_dim == 2);
    const StabilityReport rep2 = classify(linearize(t2, eqs2[0]), t2, eqs2[0]);
    CHECK(rep2.zero_multiplicity == 2);
    CHECK(rep2.unstable_count == 1); // lambda* = middle value: one positive eigenvalue

    // degenerate maximum: lambda* = max with m = 2 is still normally stable
    const CouplingTensors tmax = coupled_tensors(Vec3(0.5, 1.5, 1.5), 16);
    const auto eqsmax = find_equilibria(tmax.inertia, 1.0);
    REQUIRE(eqsmax[2].manifold_dim == 2);
    const StabilityReport repmax = classify(linearize(tmax, eqsmax[2]), tmax, eqsmax[2]);
    CHECK(repmax.zero_multiplicity == 2);
    CHECK(repmax.unstable_count == 0);
    CHECK(repmax.classification == Classification::NormallyStable);
    const StabilityReport repmin = classify(linearize(tmax, eqsmax[0]), tmax, eqsmax[0]);
    CHECK(repmin.unstable_count == 2);

    const CouplingTensors t3 = coupled_tensors(Vec3(1.0, 1.0, 1.0), 16);
    const auto eqs3 = find_equilibria(t3.inertia, 1.0);
    REQUIRE(eqs3[0].manifold_dim == 3);
    const StabilityReport rep3 = classify(linearize(t3, eqs3[0]), t3, eqs3[0]);
    CHECK(rep3.zero_multiplicity == 3);
    CHECK(rep3.unstable_count == 0);
    CHECK(rep3.classification == Classification::NormallyStable);
}

TEST_CASE("fluid-dominated spectrum sits in the stable half plane") {
    const CouplingTensors t = coupled_tensors(Vec3(0.5, 1.5, 2.5), 16);
    const auto eqs = find_equilibria(t.inertia, 3.0);
    const StabilityReport rep = classify(linearize(t, eqs[4]), t, eqs[4]); // largest axis
    int strongly_negative = 0;
    for (Eigen::Index k = 0; k < rep.spectrum.size(); ++k)
        if (rep.spectrum(k).real() < -0.5 * t.eigenvalues(0)) ++strongly_negative;
    CHECK(strongly_negative >= t.n() - 3); // all but the slow body-coupled modes
}

TEST_CASE("unstable counts are robust under mode-count growth") {
    for (int n_modes : {8, 16, 32}) {
        const CouplingTensors t = coupled_tensors(Vec3(0.5, 1.5, 2.5), n_modes);
        const auto eqs = find_equilibria(t.inertia, 3.0);
        std::vector<int> counts;
        for (const auto& eq : eqs) {
            if (eq.sign < 0) continue;
            counts.push_back(classify(linearize(t, eq), t, eq).unstable_count);
        }
        CHECK(counts == std::vector<int>{2, 1, 0});
    }
}
