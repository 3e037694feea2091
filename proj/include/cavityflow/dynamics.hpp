#pragma once

#include "cavityflow/coupling.hpp"

#include <functional>

namespace cavityflow {

/// Point on a trajectory: time, modal fluid coefficients, body angular velocity.
struct SimState {
    double t = 0.0;
    Eigen::VectorXd c;
    Vec3 a = Vec3::Zero();
};

/// Conservation/dissipation/blow-up functionals along a trajectory.
/// blowup_y duplicates the dissipation functional by value (they coincide in
/// L2) but is tracked separately as the blow-up criterion monitor.
struct Monitors {
    double energy = 0.0;
    double momentum_norm = 0.0;
    double dissipation = 0.0;
    double blowup_y = 0.0;
};

enum class Scheme { ExplicitAdaptive, SemiImplicit };

struct IntegratorConfig {
    Scheme scheme = Scheme::ExplicitAdaptive;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double t_end = 100.0;
    double max_step = 1.0;
    double equilibrium_eps = 1e-10; // terminates when y + |a x I a| drops below
    // Rigid-only reduction: freeze the fluid at rest and integrate the body
    // equation alone (pure Euler dynamics). In the coupled system c = 0 is not
    // invariant away from equilibria -- the (a x Ia | w_r) forcing excites the
    // cavity -- so the reduction is an explicit mode, not an initial condition.
    bool rigid_only = false;

    void validate() const {
        if (!(rel_tol > 0.0)) throw ConfigError("integrator.rel_tol must be > 0");
        if (!(abs_tol > 0.0)) throw ConfigError("integrator.abs_tol must be > 0");
        if (!(t_end > 0.0)) throw ConfigError("integrator.t_end must be > 0");
        if (!(max_step > 0.0)) throw ConfigError("integrator.max_step must be > 0");
        if (!(equilibrium_eps > 0.0)) throw ConfigError("integrator.equilibrium_eps must be > 0");
    }
};

struct Derivative {
    Eigen::VectorXd cdot;
    Vec3 adot;
};

/// Right-hand side of the coupled Galerkin system:
///   B cdot = -(Lambda c + C(a) c + D:cc + E(a)),  I adot = (omega - a) x I a
Derivative rhs(const SimState& state, const CouplingTensors& tensors);

Monitors compute_monitors(const SimState& state, const CouplingTensors& tensors);

struct TrajectorySample {
    double t = 0.0;
    double c_norm = 0.0;
    Vec3 a = Vec3::Zero();
    double energy = 0.0;
    double momentum_norm = 0.0;
    double dissipation = 0.0;
    double dissipation_integral = 0.0; // integrated alongside the state
    double identity_residual = 0.0;    // |E + int diss - E0| / E0
};

using SampleSink = std::function<void(const TrajectorySample&, const SimState&)>;

struct TrajectorySummary {
    SimState final_state;
    Monitors final_monitors;
    bool reached_equilibrium = false;
    long long accepted_steps = 0;
    long long rejected_steps = 0;
    double max_identity_residual = 0.0;
    double momentum_drift = 0.0; // max relative |I a| drift over samples
};

/// Integration failure with the last valid state attached.
struct IntegrationError : NumericalError {
    IntegrationError(const std::string& msg, SimState last)
        : NumericalError(msg), last_state(std::move(last)) {}
    SimState last_state;
};

/// Advance to t_end or equilibrium; emit a sample every sample_interval (plus
/// the initial and final points). Adaptive Dormand-Prince 5(4) with PI step
/// control by default; the semi-implicit scheme treats the stiff linear part
/// by an exact flow inside Strang splitting with step-doubling control.
TrajectorySummary integrate(const SimState& initial, const CouplingTensors& tensors,
                            const IntegratorConfig& config, double sample_interval,
                            const SampleSink& sink);

/// Max relative residual of the semi-discrete energy identity over samples.
double energy_identity_residual(const std::vector<TrajectorySample>& samples);

} // namespace cavityflow
