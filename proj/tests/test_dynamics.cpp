#include "cavityflow/dynamics.hpp"
#include "cavityflow/rng.hpp"
#include "cavityflow/stokes.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace cavityflow;

namespace {

CouplingTensors make_tensors(int l_max, int n_rad, int n_modes, const InertiaSpec& inertia,
                             FamilySet fams = FamilySet::both(), double nu = 1.0,
                             double zeta = 1.0) {
    auto basis = std::make_shared<const BasisSet>(build_basis(l_max, n_rad, fams));
    const ModeSet modes = compute_modes(basis, FluidParams{nu, zeta, false}, n_modes);
    return assemble_coupling(modes, inertia);
}

const CouplingTensors& reference_tensors() {
    static const CouplingTensors t =
        make_tensors(2, 2, 20, InertiaSpec::from_solid(Vec3(0.5, 1.5, 2.5)));
    return t;
}

SimState state_of(const Eigen::VectorXd& c, const Vec3& a) {
    SimState s;
    s.c = c;
    s.a = a;
    return s;
}

} // namespace

TEST_CASE("principal-axis spins with fluid at rest are fixed points") {
    const CouplingTensors& t = reference_tensors();
    for (int axis = 0; axis < 3; ++axis) {
        const Derivative d =
            rhs(state_of(Eigen::VectorXd::Zero(t.n()), 1.7 * Vec3::Unit(axis)), t);
        CHECK(d.cdot.norm() < 1e-13);
        CHECK(d.adot.norm() < 1e-13);
    }
}

TEST_CASE("with the fluid at rest the body obeys the rigid Euler equations") {
    const CouplingTensors& t = reference_tensors();
    const Vec3 a(0.4, -1.1, 0.6);
    const Derivative d = rhs(state_of(Eigen::VectorXd::Zero(t.n()), a), t);
    const Vec3 expected = -t.inertia.solve(a.cross(t.inertia.apply(a)));
    CHECK((d.adot - expected).norm() < 1e-14);
}

TEST_CASE("exact invariants of the rhs at random states") {
    const CouplingTensors& t = reference_tensors();
    SplitMix64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd c(t.n());
        for (int i = 0; i < t.n(); ++i) c(i) = 0.5 * rng.next_symmetric();
        const Vec3 a(rng.next_symmetric(), rng.next_symmetric(), rng.next_symmetric());
        const Derivative d = rhs(state_of(c, a), t);

        // angular momentum norm is exactly conserved
        const Vec3 Ia = t.inertia.apply(a);
        const double dIa2 = 2.0 * Ia.dot(t.inertia.apply(d.adot));
        CHECK(std::abs(dIa2) < 1e-13 * std::max(1.0, Ia.squaredNorm()));

        // energy dissipates exactly at the rate sum Lambda_k c_k^2
        const double dE = c.dot(t.B * d.cdot) + Ia.dot(d.adot);
        const double expected = -t.eigenvalues.dot(c.cwiseProduct(c));
        CHECK(std::abs(dE - expected) < 1e-10 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("monitors: energy, momentum, dissipation") {
    const CouplingTensors t =
        make_tensors(1, 1, 3, InertiaSpec::from_raw_total(Vec3(1.0, 2.0, 3.0)),
                     FamilySet::only(Family::Poloidal));
    const Monitors m = compute_monitors(state_of(Eigen::VectorXd::Zero(3), Vec3(0, 0, 1)), t);
    CHECK(m.energy == doctest::Approx(1.5).epsilon(1e-14)); // (1/2)(I a | a)
    CHECK(m.dissipation == 0.0);
    CHECK(m.blowup_y == m.dissipation);
    CHECK(m.momentum_norm == doctest::Approx(3.0));

    // E >= (1/2) min_eig(B) |c|^2 at random states
    const CouplingTensors& tr = reference_tensors();
    const double cb = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(tr.B).eigenvalues()(0);
    SplitMix64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd c(tr.n());
        for (int i = 0; i < tr.n(); ++i) c(i) = rng.next_symmetric();
        const Monitors mm = compute_monitors(state_of(c, Vec3::Zero()), tr);
        CHECK(mm.energy >= 0.5 * cb * c.squaredNorm() - 1e-12);
    }
}

TEST_CASE("integrate: equilibrium initial data stays put") {
    const CouplingTensors& t = reference_tensors();
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    SimState s0 = state_of(Eigen::VectorXd::Zero(t.n()), Vec3(0, 0, 1));
    std::vector<TrajectorySample> samples;
    const TrajectorySummary sum = integrate(
        s0, t, cfg, 1.0, [&](const TrajectorySample& s, const SimState&) { samples.push_back(s); });
    CHECK(sum.reached_equilibrium);
    CHECK((sum.final_state.a - Vec3(0, 0, 1)).norm() < 1e-12);
    CHECK(sum.final_state.c.norm() < 1e-12);
}

TEST_CASE("integrate: the rigid-only reduction conserves energy and momentum") {
    const CouplingTensors& t = reference_tensors();
    IntegratorConfig cfg;
    cfg.t_end = 50.0;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.rigid_only = true;
    SimState s0 = state_of(Eigen::VectorXd::Zero(t.n()), Vec3(0.6, 0.8, 0.5));
    std::vector<TrajectorySample> samples;
    const TrajectorySummary sum = integrate(
        s0, t, cfg, 0.5, [&](const TrajectorySample& s, const SimState&) { samples.push_back(s); });
    const double E0 = samples.front().energy;
    for (const auto& s : samples) {
        CHECK(std::abs(s.energy - E0) / E0 < 1e-8);
        CHECK(s.c_norm < 1e-10); // the fluid is not spuriously excited
    }
    CHECK(sum.momentum_drift < 1e-8);
    CHECK(energy_identity_residual(samples) < 1e-8);
}

TEST_CASE("a tumbling body excites the cavity fluid in the coupled system") {
    // c = 0 is not invariant away from equilibria: the momentum-coupling
    // forcing pumps the l=1 toroidal modes as the body precesses.
    const CouplingTensors& t = reference_tensors();
    const Derivative d = rhs(state_of(Eigen::VectorXd::Zero(t.n()), Vec3(0.6, 0.8, 0.5)), t);
    CHECK(d.cdot.norm() > 1e-3);

    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    cfg.rigid_only = true;
    SimState with_fluid = state_of(Eigen::VectorXd::Ones(t.n()), Vec3(0, 0, 1));
    CHECK_THROWS_AS(integrate(with_fluid, t, cfg, 0.5, {}), ConfigError);
}

TEST_CASE("integrate: damped runs dissipate monotonically and terminate") {
    const CouplingTensors& t = reference_tensors();
    IntegratorConfig cfg;
    cfg.t_end = 500.0;
    cfg.equilibrium_eps = 1e-10;
    SplitMix64 rng(70);
    Eigen::VectorXd c0(t.n());
    for (int i = 0; i < t.n(); ++i) c0(i) = 0.3 * rng.next_symmetric();
    SimState s0 = state_of(c0, Vec3(0.2, 0.9, 0.1));
    std::vector<TrajectorySample> samples;
    const TrajectorySummary sum = integrate(
        s0, t, cfg, 0.5, [&](const TrajectorySample& s, const SimState&) { samples.push_back(s); });

    CHECK(sum.reached_equilibrium);
    CHECK(sum.final_monitors.dissipation < cfg.equilibrium_eps);
    CHECK(sum.momentum_drift <= 10 * cfg.rel_tol);
    for (std::size_t i = 1; i < samples.size(); ++i)
        CHECK(samples[i].energy <= samples[i - 1].energy + 10 * cfg.rel_tol * samples[0].energy);
    CHECK(energy_identity_residual(samples) < 1e-7);
}

TEST_CASE("rigid-only trajectories satisfy the energy identity to rounding") {
    const CouplingTensors& t = reference_tensors();
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.rigid_only = true;
    SimState s0 = state_of(Eigen::VectorXd::Zero(t.n()), Vec3(0.6, 0.8, 0.5));
    std::vector<TrajectorySample> samples;
    integrate(s0, t, cfg, 0.5,
              [&](const TrajectorySample& s, const SimState&) { samples.push_back(s); });
    CHECK(energy_identity_residual(samples) < 1e-12);
}

TEST_CASE("a coupled run started from a quiescent fluid still reaches equilibrium") {
    // the body sheds its off-axis momentum through the cavity even when the
    // fluid starts at rest
    const CouplingTensors& t = reference_tensors();
    IntegratorConfig cfg;
    cfg.t_end = 700.0;
    const SimState s0 = state_of(Eigen::VectorXd::Zero(t.n()), Vec3(0.4, 0.9, 0.3));
    const double mom0 = t.inertia.apply(s0.a).norm();
    const TrajectorySummary sum = integrate(s0, t, cfg, 1.0, {});
    CHECK(sum.reached_equilibrium);
    const Vec3 af = sum.final_state.a;
    CHECK(std::atan2(std::hypot(af(0), af(1)), std::abs(af(2))) < 1e-5);
    CHECK(af.norm() == doctest::Approx(mom0 / t.inertia.total(2)).epsilon(1e-6));
}

TEST_CASE("energy identity residual shrinks with the tolerance") {
    const CouplingTensors& t = reference_tensors();
    SplitMix64 rng(71);
    Eigen::VectorXd c0(t.n());
    for (int i = 0; i < t.n(); ++i) c0(i) = 0.3 * rng.next_symmetric();
    const SimState s0 = state_of(c0, Vec3(0.3, 0.5, 0.4));

    auto residual_at = [&](double rel_tol) {
        IntegratorConfig cfg;
        cfg.t_end = 20.0;
        cfg.rel_tol = rel_tol;
        cfg.abs_tol = rel_tol * 1e-2;
        std::vector<TrajectorySample> samples;
        integrate(s0, t, cfg, 0.5,
                  [&](const TrajectorySample& s, const SimState&) { samples.push_back(s); });
        return energy_identity_residual(samples);
    };
    // Global error of the 5(4) pair scales like tol^{4/5}: halving the
    // tolerance buys a factor near 1.8, quartering comfortably exceeds 2.
    const double coarse = residual_at(1e-5);
    const double half = residual_at(5e-6);
    const double quarter = residual_at(2.5e-6);
    CHECK(half <= coarse / 1.5);
    CHECK(quarter <= coarse / 2.0);
}

TEST_CASE("intermediate axis: middle-axis spins tumble, largest-axis spins stay") {
    // Poloidal-only modes carry no angular momentum, so B = I and any raw
    // inertia is admissible; with c0 = 0 this is pure rigid Euler dynamics.
    const CouplingTensors t = make_tensors(1, 1, 3, InertiaSpec::from_raw_total(Vec3(1, 2, 3)),
                                           FamilySet::only(Family::Poloidal));
    const double eps = 1e-3;
    IntegratorConfig cfg;
    cfg.t_end = 100.0;

    double max_angle_mid = 0.0;
    integrate(state_of(Eigen::VectorXd::Zero(3), Vec3(eps, 1.0, eps)), t, cfg, 0.25,
              [&](const TrajectorySample& s, const SimState&) {
                  const double angle =
                      std::atan2(std::hypot(s.a(0), s.a(2)), s.a(1));
                  max_angle_mid = std::max(max_angle_mid, angle);
              });
    CHECK(max_angle_mid > 1.0);

    double max_dist_e3 = 0.0;
    integrate(state_of(Eigen::VectorXd::Zero(3), Vec3(eps, eps, 1.0)), t, cfg, 0.25,
              [&](const TrajectorySample& s, const SimState&) {
                  max_dist_e3 = std::max(max_dist_e3, (s.a - Vec3(0, 0, 1)).norm());
              });
    CHECK(max_dist_e3 <= 10 * eps);
}

TEST_CASE("semi-implicit scheme tracks the explicit one") {
    const CouplingTensors& t = reference_tensors();
    SplitMix64 rng(99);
    Eigen::VectorXd c0(t.n());
    for (int i = 0; i < t.n(); ++i) c0(i) = 0.2 * rng.next_symmetric();
    const SimState s0 = state_of(c0, Vec3(0.4, 0.7, 0.2));

    auto run = [&](Scheme scheme) {
        IntegratorConfig cfg;
        cfg.scheme = scheme;
        cfg.t_end = 5.0;
        cfg.rel_tol = 1e-8;
        cfg.abs_tol = 1e-10;
        return integrate(s0, t, cfg, 1.0, {});
    };
    const TrajectorySummary expl = run(Scheme::ExplicitAdaptive);
    const TrajectorySummary semi = run(Scheme::SemiImplicit);
    CHECK((expl.final_state.a - semi.final_state.a).norm() < 1e-6);
    CHECK((expl.final_state.c - semi.final_state.c).norm() < 1e-6);
    CHECK(semi.final_monitors.energy <= compute_monitors(s0, t).energy);
}

TEST_CASE("input validation and failure reporting") {
    const CouplingTensors& t = reference_tensors();
    IntegratorConfig cfg;
    cfg.t_end = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.t_end = 1.0;

    SimState bad = state_of(Eigen::VectorXd::Zero(t.n() + 1), Vec3::Zero());
    CHECK_THROWS_AS(integrate(bad, t, cfg, 0.5, {}), ConfigError);

    SimState nan_state = state_of(Eigen::VectorXd::Zero(t.n()), Vec3::Zero());
    nan_state.c(0) = std::nan("");
    CHECK_THROWS_AS(integrate(nan_state, t, cfg, 0.5, {}), ConfigError);
}
