#include "cavityflow/dynamics.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace cavityflow {

namespace {

// Force assembly shared by rhs() and the integrators; y layout [c; a; S]
// with S the running dissipation integral.
struct System {
    System(const CouplingTensors& t, bool rigid)
        : tensors(t), n(t.n()), rigid_only(rigid),
          Wm(t.moments * t.inertia.inverse().asDiagonal()) {}

    const CouplingTensors& tensors;
    int n;
    bool rigid_only;
    Eigen::MatrixXd Wm; // rows w_k = I^{-1} m_k

    Eigen::Index dim() const { return n + 4; }

    void eval(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const {
        if (rigid_only) {
            const Vec3 a = y.segment<3>(n);
            const Vec3 Ia = tensors.inertia.apply(a);
            dy.resize(dim());
            dy.head(n).setZero();
            dy.segment<3>(n) = -tensors.inertia.solve(a.cross(Ia));
            dy(n + 3) = 0.0;
            return;
        }
        const auto c = y.head(n);
        const Vec3 a = y.segment<3>(n);
        const Vec3 Ia = tensors.inertia.apply(a);
        const Vec3 omega = tensors.inertia.solve(tensors.moments.transpose() * c);

        // -B cdot = Lambda c + C(a) c + D:cc + E(a)
        Eigen::VectorXd force = tensors.eigenvalues.cwiseProduct(c);
        force += Wm * omega.cross(Ia); // ((I^-1 m_k) x Ia | w_r) c_k summed over k
        for (int al = 0; al < 3; ++al)
            force += (2.0 * a(al)) * (tensors.cross_gram[static_cast<std::size_t>(al)].transpose() * c);

        // quadratic term via two mat-vecs on the packed rank-3 array
        Eigen::Map<const Eigen::MatrixXd> D1(tensors.convection_full.data(),
                                             static_cast<Eigen::Index>(n) * n, n);
        Eigen::VectorXd u = D1 * c;                              // (r + n k) indexed
        Eigen::Map<const Eigen::MatrixXd> U(u.data(), n, n);
        force += U * c;

        force -= Wm * a.cross(Ia); // E(a)_r = -(a x Ia | w_r)

        dy.resize(dim());
        dy.head(n) = tensors.B_chol.solve(-force);
        dy.segment<3>(n) = tensors.inertia.solve((omega - a).cross(Ia));
        dy(n + 3) = tensors.eigenvalues.dot(c.cwiseProduct(c)); // dissipation rate
    }
};

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                  double abs_tol, double rel_tol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = abs_tol + rel_tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double q = err(i) / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0,
                 A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;

class Dopri5 {
public:
    explicit Dopri5(const System& sys) : sys_(sys) {
        for (auto& k : k_) k.resize(sys.dim());
        ytmp_.resize(sys.dim());
    }

    int order() const { return 5; }

    // k1 is f(y); callers keep it valid across rejected steps (FSAL).
    void refresh(const Eigen::VectorXd& y) { sys_.eval(y, k_[0]); }

    double step(const Eigen::VectorXd& y, double h, Eigen::VectorXd& ynew, double abs_tol,
                double rel_tol) {
        ytmp_ = y + h * A21 * k_[0];
        sys_.eval(ytmp_, k_[1]);
        ytmp_ = y + h * (A31 * k_[0] + A32 * k_[1]);
        sys_.eval(ytmp_, k_[2]);
        ytmp_ = y + h * (A41 * k_[0] + A42 * k_[1] + A43 * k_[2]);
        sys_.eval(ytmp_, k_[3]);
        ytmp_ = y + h * (A51 * k_[0] + A52 * k_[1] + A53 * k_[2] + A54 * k_[3]);
        sys_.eval(ytmp_, k_[4]);
        ytmp_ = y + h * (A61 * k_[0] + A62 * k_[1] + A63 * k_[2] + A64 * k_[3] + A65 * k_[4]);
        sys_.eval(ytmp_, k_[5]);
        ynew = y + h * (B1 * k_[0] + B3 * k_[2] + B4 * k_[3] + B5 * k_[4] + B6 * k_[5]);
        sys_.eval(ynew, k_[6]);
        const Eigen::VectorXd err =
            h * (E1 * k_[0] + E3 * k_[2] + E4 * k_[3] + E5 * k_[4] + E6 * k_[5] + E7 * k_[6]);
        return error_norm(err, y, ynew, abs_tol, rel_tol);
    }

    void accept() { k_[0].swap(k_[6]); } // FSAL

private:
    const System& sys_;
    std::array<Eigen::VectorXd, 7> k_;
    Eigen::VectorXd ytmp_;
};

// Strang splitting: exact flow of the stiff linear part cdot = -B^{-1} Lambda c
// around an explicit midpoint step of the remainder; error by step doubling.
class StrangSemiImplicit {
public:
    explicit StrangSemiImplicit(const System& sys) : sys_(sys) {
        // Lambda x = mu B x: X is B-orthonormal, stiff flow = X exp(-mu tau) X^T B.
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
            Eigen::MatrixXd(sys.tensors.eigenvalues.asDiagonal()), sys.tensors.B,
            Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
        if (es.info() != Eigen::Success)
            throw NumericalError("semi-implicit scheme: stiff pencil factorization failed");
        mu_ = es.eigenvalues();
        X_ = es.eigenvectors();
        XtB_ = X_.transpose() * sys.tensors.B;
    }

    int order() const { return 2; }
    void refresh(const Eigen::VectorXd&) {}
    void accept() {}

    double step(const Eigen::VectorXd& y, double h, Eigen::VectorXd& ynew, double abs_tol,
                double rel_tol) {
        Eigen::VectorXd big, half;
        single(y, h, big);
        single(y, 0.5 * h, half);
        single(Eigen::VectorXd(half), 0.5 * h, half);
        const Eigen::VectorXd err = (big - half) / 3.0; // Richardson, order 2
        ynew = half;
        return error_norm(err, y, ynew, abs_tol, rel_tol);
    }

private:
    void stiff_flow(double tau, Eigen::VectorXd& y) const {
        const int n = sys_.n;
        Eigen::VectorXd z = XtB_ * y.head(n);
        z.array() *= (-tau * mu_.array()).exp();
        y.head(n) = X_ * z;
    }

    // remainder = full rhs + B^{-1} Lambda c (the stiff part added back out)
    void remainder(const Eigen::VectorXd& y, Eigen::VectorXd& dy) const {
        sys_.eval(y, dy);
        dy.head(sys_.n) += sys_.tensors.B_chol.solve(
            Eigen::VectorXd(sys_.tensors.eigenvalues.cwiseProduct(y.head(sys_.n))));
    }

    void single(const Eigen::VectorXd& y0, double h, Eigen::VectorXd& out) {
        out = y0;
        stiff_flow(0.5 * h, out);
        remainder(out, f1_);
        ymid_ = out + 0.5 * h * f1_;
        remainder(ymid_, f2_);
        out += h * f2_;
        stiff_flow(0.5 * h, out);
    }

    const System& sys_;
    Eigen::VectorXd mu_;
    Eigen::MatrixXd X_, XtB_;
    Eigen::VectorXd f1_, f2_, ymid_;
};

struct MonitorValues {
    Monitors mon;
    double equilibrium_defect;
};

MonitorValues monitors_of(const Eigen::VectorXd& y, const System& sys) {
    const int n = sys.n;
    const auto c = y.head(n);
    const Vec3 a = y.segment<3>(n);
    const Vec3 Ia = sys.tensors.inertia.apply(a);
    MonitorValues mv;
    mv.mon.energy = 0.5 * (c.dot(sys.tensors.B * c) + Ia.dot(a));
    mv.mon.momentum_norm = Ia.norm();
    mv.mon.dissipation = sys.tensors.eigenvalues.dot(c.cwiseProduct(c));
    mv.mon.blowup_y = mv.mon.dissipation;
    mv.equilibrium_defect = mv.mon.dissipation + a.cross(Ia).norm();
    return mv;
}

template <class Stepper>
TrajectorySummary run_integration(Stepper& stepper, const System& sys, const SimState& initial,
                                  const IntegratorConfig& config, double sample_interval,
                                  const SampleSink& sink) {
    const int n = sys.n;
    Eigen::VectorXd y(sys.dim());
    y.head(n) = initial.c;
    y.segment<3>(n) = initial.a;
    y(n + 3) = 0.0;
    double t = initial.t;
    const double t_end = initial.t + config.t_end;

    TrajectorySummary summary;
    const double E0 = monitors_of(y, sys).mon.energy;
    const double mom0 = monitors_of(y, sys).mon.momentum_norm;

    auto make_state = [&](double tt, const Eigen::VectorXd& yy) {
        SimState s;
        s.t = tt;
        s.c = yy.head(n);
        s.a = yy.segment<3>(n);
        return s;
    };

    double last_emit_t = -std::numeric_limits<double>::infinity();
    auto emit = [&](double tt, const Eigen::VectorXd& yy) {
        if (tt <= last_emit_t + 1e-14 * std::max(1.0, std::abs(tt))) return;
        last_emit_t = tt;
        const MonitorValues mv = monitors_of(yy, sys);
        TrajectorySample s;
        s.t = tt;
        s.c_norm = yy.head(n).norm();
        s.a = yy.segment<3>(n);
        s.energy = mv.mon.energy;
        s.momentum_norm = mv.mon.momentum_norm;
        s.dissipation = mv.mon.dissipation;
        s.dissipation_integral = yy(n + 3);
        s.identity_residual =
            std::abs(s.energy + s.dissipation_integral - E0) / std::max(E0, 1e-30);
        summary.max_identity_residual = std::max(summary.max_identity_residual, s.identity_residual);
        if (mom0 > 0.0)
            summary.momentum_drift =
                std::max(summary.momentum_drift, std::abs(s.momentum_norm - mom0) / mom0);
        if (sink) sink(s, make_state(tt, yy));
    };

    stepper.refresh(y);
    emit(t, y);

    // Initial step from the rhs magnitude, then PI control takes over.
    double h;
    {
        Eigen::VectorXd f0(sys.dim());
        sys.eval(y, f0);
        const double d0 = y.norm() + config.abs_tol;
        const double d1 = f0.norm() + config.abs_tol;
        h = std::min({config.max_step, 0.01 * d0 / d1, 0.1 * config.t_end});
        h = std::max(h, 1e-10);
    }

    double err_prev = 1.0;
    double next_sample = t + sample_interval;
    Eigen::VectorXd ynew(sys.dim());
    bool done = false;

    while (!done) {
        bool sample_boundary = false;
        if (t + h >= t_end) {
            h = t_end - t;
            done = true;
            sample_boundary = true;
        }
        if (t + h >= next_sample - 1e-14 * std::max(1.0, std::abs(next_sample)) && !done) {
            h = next_sample - t;
            sample_boundary = true;
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw IntegrationError("integrator step size underflow at t = " + std::to_string(t),
                                   make_state(t, y));

        const double err = stepper.step(y, h, ynew, config.abs_tol, config.rel_tol);
        if (!std::isfinite(err) || !ynew.allFinite()) {
            // NaN poisoning: retry smaller before giving up.
            if (h > 1e-12) {
                h *= 0.25;
                done = false;
                ++summary.rejected_steps;
                continue;
            }
            throw IntegrationError("non-finite state at t = " + std::to_string(t), make_state(t, y));
        }

        const double expo = 1.0 / stepper.order();
        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            stepper.accept();
            ++summary.accepted_steps;

            if (sample_boundary && !done &&
                std::abs(t - next_sample) <= 1e-12 * std::max(1.0, std::abs(t))) {
                emit(t, y);
                next_sample += sample_interval;
            }

            const MonitorValues mv = monitors_of(y, sys);
            if (mv.equilibrium_defect < config.equilibrium_eps) {
                summary.reached_equilibrium = true;
                done = true;
            }

            if (done) emit(t, y);

            const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 * expo) *
                               std::pow(std::max(err_prev, 1e-10), 0.4 * expo);
            h = std::min(config.max_step, h * std::min(5.0, std::max(0.2, fac)));
            err_prev = std::max(err, 1e-10);
        } else {
            ++summary.rejected_steps;
            done = false;
            const double fac = 0.9 * std::pow(err, -expo);
            h *= std::min(1.0, std::max(0.1, fac));
        }
    }

    summary.final_state = make_state(t, y);
    summary.final_monitors = monitors_of(y, sys).mon;
    return summary;
}

} // namespace

Derivative rhs(const SimState& state, const CouplingTensors& tensors) {
    if (state.c.size() != tensors.n()) throw NumericalError("rhs: coefficient dimension mismatch");
    System sys(tensors, false);
    Eigen::VectorXd y(sys.dim()), dy;
    y.head(tensors.n()) = state.c;
    y.segment<3>(tensors.n()) = state.a;
    y(tensors.n() + 3) = 0.0;
    sys.eval(y, dy);
    Derivative d;
    d.cdot = dy.head(tensors.n());
    d.adot = dy.segment<3>(tensors.n());
    return d;
}

Monitors compute_monitors(const SimState& state, const CouplingTensors& tensors) {
    System sys(tensors, false);
    Eigen::VectorXd y(sys.dim());
    y.head(tensors.n()) = state.c;
    y.segment<3>(tensors.n()) = state.a;
    y(tensors.n() + 3) = 0.0;
    return monitors_of(y, sys).mon;
}

TrajectorySummary integrate(const SimState& initial, const CouplingTensors& tensors,
                            const IntegratorConfig& config, double sample_interval,
                            const SampleSink& sink) {
    config.validate();
    if (!(sample_interval > 0.0)) throw ConfigError("output.sample_interval must be > 0");
    if (initial.c.size() != tensors.n())
        throw ConfigError("initial coefficient vector does not match the mode count");
    if (!initial.c.allFinite() || !initial.a.allFinite())
        throw ConfigError("initial state contains non-finite entries");
    if (config.rigid_only && initial.c.norm() != 0.0)
        throw ConfigError("rigid-only reduction requires zero fluid coefficients");

    System sys(tensors, config.rigid_only);
    if (config.scheme == Scheme::ExplicitAdaptive) {
        Dopri5 stepper(sys);
        return run_integration(stepper, sys, initial, config, sample_interval, sink);
    }
    StrangSemiImplicit stepper(sys);
    return run_integration(stepper, sys, initial, config, sample_interval, sink);
}

double energy_identity_residual(const std::vector<TrajectorySample>& samples) {
    if (samples.size() < 2)
        throw NumericalError("energy_identity_residual: need at least two samples");
    double out = 0.0;
    for (const auto& s : samples) out = std::max(out, s.identity_residual);
    return out;
}

} // namespace cavityflow
