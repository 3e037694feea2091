#include "cavityflow/io/runner.hpp"

#include "cavityflow/equilibria.hpp"
#include "cavityflow/io/cache.hpp"
#include "cavityflow/io/csv.hpp"
#include "cavityflow/stokes.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace cavityflow {

namespace {

struct ComputedModes {
    std::shared_ptr<const BasisSet> basis;
    std::shared_ptr<const ModeSet> modes;
    CouplingTensors tensors;
};

ComputedModes compute_pipeline(const RunConfig& cfg) {
    ComputedModes out;
    out.basis = std::make_shared<const BasisSet>(
        build_basis(cfg.basis.l_max, cfg.basis.n_rad, cfg.basis.families, cfg.basis.radial));
    out.modes = std::make_shared<const ModeSet>(compute_modes(out.basis, cfg.fluid, cfg.n_modes));
    out.tensors = assemble_coupling(*out.modes, cfg.inertia);
    return out;
}

std::string cache_path_for(const RunConfig& cfg, const std::string& cache_dir) {
    return (std::filesystem::path(cache_dir) / cache_file_name(fnv1a64(cfg.cache_key()))).string();
}

Vec3 nearest_equilibrium_axis(const InertiaSpec& inertia, const Vec3& a_final, double* lambda_out,
                              double* angle_out) {
    const double momentum = inertia.apply(a_final).norm();
    double best_angle = M_PI;
    Vec3 best = Vec3::UnitZ();
    double best_lambda = inertia.total.maxCoeff();
    if (momentum > 0.0) {
        for (const auto& eq : find_equilibria(inertia, momentum)) {
            const double cosang =
                std::min(1.0, (eq.eigenspace.transpose() * a_final.normalized()).norm());
            const double ang = std::acos(cosang);
            if (eq.sign > 0 && ang < best_angle) {
                best_angle = ang;
                best = eq.a_star;
                best_lambda = eq.lambda_star;
            }
        }
    }
    if (lambda_out) *lambda_out = best_lambda;
    if (angle_out) *angle_out = best_angle;
    return best;
}

struct EquilibriumRow {
    double lambda_star;
    int manifold_dim;
    StabilityReport report;
};

std::vector<EquilibriumRow> stability_rows(const CouplingTensors& tensors, double momentum) {
    std::vector<EquilibriumRow> rows;
    for (const auto& eq : find_equilibria(tensors.inertia, momentum)) {
        if (eq.sign < 0) continue; // spectra of the +/- representatives coincide
        const Linearization lin = linearize(tensors, eq);
        rows.push_back({eq.lambda_star, eq.manifold_dim, classify(lin, tensors, eq)});
    }
    return rows;
}

void print_stability_rows(std::ostream& out, const std::vector<EquilibriumRow>& rows) {
    out << "lambda_star,m,zero_multiplicity,unstable_count,spectral_gap,classification\n";
    for (const auto& r : rows) {
        out << format_double(r.lambda_star) << ',' << r.manifold_dim << ','
            << r.report.zero_multiplicity << ',' << r.report.unstable_count << ','
            << format_double(r.report.spectral_gap) << ','
            << classification_name(r.report.classification) << '\n';
    }
}

} // namespace

CouplingTensors obtain_tensors(const RunConfig& cfg, const std::string& cache_dir,
                               std::ostream& log) {
    if (cache_dir.empty()) return compute_pipeline(cfg).tensors;

    std::filesystem::create_directories(cache_dir);
    const std::string path = cache_path_for(cfg, cache_dir);
    if (std::filesystem::exists(path)) {
        CachePayload payload = cache_load(path);
        if (payload.key != cfg.cache_key())
            throw ConfigError("cache load: key mismatch for '" + path + "'");
        log << "cache = hit " << path << "\n";
        return payload.tensors();
    }

    ComputedModes computed = compute_pipeline(cfg);
    cache_store(path, make_payload(cfg.cache_key(), *computed.modes, computed.tensors));
    log << "cache = stored " << path << "\n";
    return std::move(computed.tensors);
}

int run_modes(const CliOptions& opts, std::ostream& log) {
    try {
        const RunConfig cfg = RunConfig::load(opts.config_path, opts.seed);
        if (opts.cache_dir.empty())
            throw ConfigError("modes: requires --cache-dir (or CAVITYFLOW_CACHE_DIR)");
        std::filesystem::create_directories(opts.cache_dir);
        const std::string path = cache_path_for(cfg, opts.cache_dir);

        if (std::filesystem::exists(path)) {
            const CachePayload payload = cache_load(path);
            if (payload.key != cfg.cache_key())
                throw ConfigError("cache load: key mismatch for '" + path + "'");
            log << "cache = hit " << path << "\n";
            log << "modes = " << payload.eigenvalues.size() << "\n";
            log << "lambda_min = " << format_double(payload.eigenvalues(0)) << "\n";
            log << "lambda_max = "
                << format_double(payload.eigenvalues(payload.eigenvalues.size() - 1)) << "\n";
            return kExitOk;
        }

        ComputedModes computed = compute_pipeline(cfg);
        cache_store(path, make_payload(cfg.cache_key(), *computed.modes, computed.tensors));
        log << "cache = stored " << path << "\n";
        log << "modes = " << computed.modes->size() << "\n";
        log << "lambda_min = " << format_double(computed.modes->eigenvalues()(0)) << "\n";
        log << "lambda_max = "
            << format_double(computed.modes->eigenvalues()(computed.modes->size() - 1)) << "\n";
        log << "korn_constant = " << format_double(korn_constant(*computed.basis)) << "\n";
        log << "min_eig_B = "
            << format_double(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(computed.tensors.B)
                                 .eigenvalues()(0))
            << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
}

int run_simulate(const CliOptions& opts, std::ostream& log) {
    std::string out_path;
    try {
        const RunConfig cfg = RunConfig::load(opts.config_path, opts.seed);
        out_path = !opts.out_path.empty() ? opts.out_path : cfg.csv_path;
        if (out_path.empty())
            throw ConfigError("simulate: no output path (set output.csv or pass --out)");

        const CouplingTensors tensors = obtain_tensors(cfg, opts.cache_dir, log);

        SimState state0;
        state0.t = 0.0;
        state0.c = cfg.initial.coefficients(cfg.n_modes);
        state0.a = cfg.initial.body_velocity(cfg.inertia);

        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw ConfigError("simulate: cannot open output file '" + out_path + "'");
        TrajectoryCsv csv(out);

        std::vector<double> ts, cnorms;
        std::vector<Vec3> as;
        const SampleSink sink = [&](const TrajectorySample& s, const SimState&) {
            csv.write(s);
            ts.push_back(s.t);
            cnorms.push_back(s.c_norm);
            as.push_back(s.a);
        };

        TrajectorySummary summary;
        try {
            summary = integrate(state0, tensors, cfg.integrator, cfg.sample_interval, sink);
        } catch (const IntegrationError& e) {
            out.flush();
            log << "numerical error: " << e.what() << "\n";
            log << "last_valid_t = " << format_double(e.last_state.t) << "\n";
            return kExitNumericalError;
        }

        log << "terminated_at_equilibrium = " << (summary.reached_equilibrium ? "true" : "false")
            << "\n";
        log << "t_final = " << format_double(summary.final_state.t) << "\n";
        log << "energy_final = " << format_double(summary.final_monitors.energy) << "\n";
        log << "dissipation_final = " << format_double(summary.final_monitors.dissipation) << "\n";
        log << "momentum_drift = " << format_double(summary.momentum_drift) << "\n";
        log << "max_energy_identity_residual = " << format_double(summary.max_identity_residual)
            << "\n";

        double lambda_star = 0.0, angle = 0.0;
        nearest_equilibrium_axis(cfg.inertia, summary.final_state.a, &lambda_star, &angle);
        log << "nearest_equilibrium_lambda = " << format_double(lambda_star) << "\n";
        log << "nearest_equilibrium_angle = " << format_double(angle) << "\n";

        // Decay diagnostics: fluid coefficients and body velocity separately;
        // abar from the mean of the final 5 samples.
        try {
            const DecayFit fit = fit_decay(ts, cnorms, 0.3);
            log << "fluid_decay_rate = " << format_double(fit.rate) << "\n";
            log << "fluid_decay_r2 = " << format_double(fit.r_squared) << "\n";
        } catch (const std::exception&) {
            log << "fluid_decay_rate = n/a\n";
        }
        try {
            Vec3 abar = Vec3::Zero();
            const std::size_t navg = std::min<std::size_t>(5, as.size());
            for (std::size_t i = as.size() - navg; i < as.size(); ++i) abar += as[i];
            abar /= static_cast<double>(navg);
            std::vector<double> adist(as.size());
            for (std::size_t i = 0; i < as.size(); ++i) adist[i] = (as[i] - abar).norm();
            const DecayFit fit = fit_decay(ts, adist, 0.3);
            log << "body_decay_rate = " << format_double(fit.rate) << "\n";
        } catch (const std::exception&) {
            log << "body_decay_rate = n/a\n";
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
}

int run_stability(const CliOptions& opts, std::ostream& log) {
    try {
        const RunConfig cfg = RunConfig::load(opts.config_path, opts.seed);
        const CouplingTensors tensors = obtain_tensors(cfg, opts.cache_dir, log);
        const auto rows = stability_rows(tensors, cfg.stability_momentum);

        std::ostringstream body;
        print_stability_rows(body, rows);
        log << body.str();
        if (!opts.out_path.empty()) {
            std::ofstream out(opts.out_path, std::ios::trunc);
            if (!out) throw ConfigError("stability: cannot open output file '" + opts.out_path + "'");
            out << body.str();
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
}

int run_atlas(const CliOptions& opts, std::ostream& log) {
    try {
        const RunConfig cfg = RunConfig::load(opts.config_path, opts.seed);

        std::vector<Vec3> solids = cfg.atlas.solid_lambdas;
        if (solids.empty()) solids.push_back(cfg.inertia.solid_lambda);
        std::vector<double> zetas = cfg.atlas.zetas;
        if (zetas.empty()) zetas.push_back(cfg.fluid.zeta);

        // The basis is parameter-independent; modes depend on zeta only.
        auto basis = std::make_shared<const BasisSet>(
            build_basis(cfg.basis.l_max, cfg.basis.n_rad, cfg.basis.families, cfg.basis.radial));

        struct Cell {
            std::string row;
            bool ok = false;
        };
        std::vector<Cell> cells(solids.size() * zetas.size());

        // One task per zeta: the eigensolve dominates, inertia cells reuse it.
        std::vector<std::future<void>> tasks;
        for (std::size_t zi = 0; zi < zetas.size(); ++zi) {
            tasks.push_back(std::async(std::launch::async, [&, zi]() {
                FluidParams fluid = cfg.fluid;
                fluid.zeta = zetas[zi];
                std::shared_ptr<const ModeSet> modes;
                std::string mode_error;
                try {
                    modes = std::make_shared<const ModeSet>(compute_modes(basis, fluid, cfg.n_modes));
                } catch (const std::exception& e) {
                    mode_error = e.what();
                }
                for (std::size_t si = 0; si < solids.size(); ++si) {
                    Cell& cell = cells[si * zetas.size() + zi];
                    std::ostringstream row;
                    row << format_double(solids[si](0)) << ',' << format_double(solids[si](1)) << ','
                        << format_double(solids[si](2)) << ',' << format_double(zetas[zi]) << ',';
                    try {
                        if (!modes) throw NumericalError(mode_error);
                        const InertiaSpec inertia = InertiaSpec::from_solid(solids[si]);
                        const CouplingTensors tensors = assemble_coupling(*modes, inertia);
                        const auto rows = stability_rows(tensors, cfg.stability_momentum);
                        std::string lam, um, cls;
                        for (std::size_t r = 0; r < rows.size(); ++r) {
                            if (r) { lam += '/'; um += '/'; cls += '/'; }
                            lam += format_double(rows[r].lambda_star);
                            um += std::to_string(rows[r].report.unstable_count);
                            cls += rows[r].report.classification == Classification::NormallyStable
                                       ? "S"
                                       : "H";
                        }
                        row << "ok," << lam << ',' << um << ',' << cls;
                        cell.ok = true;
                    } catch (const std::exception& e) {
                        std::string msg = e.what();
                        for (char& ch : msg)
                            if (ch == ',' || ch == '\n') ch = ';';
                        row << "error," << msg << ",,";
                    }
                    cell.row = row.str();
                }
            }));
        }
        for (auto& t : tasks) t.get();

        std::ostringstream body;
        body << "solid1,solid2,solid3,zeta,status,lambda_stars,unstable_counts,classifications\n";
        bool any_ok = false;
        for (const auto& cell : cells) {
            body << cell.row << '\n';
            any_ok = any_ok || cell.ok;
        }
        log << body.str();
        if (!opts.out_path.empty()) {
            std::ofstream out(opts.out_path, std::ios::trunc);
            if (!out) throw ConfigError("atlas: cannot open output file '" + opts.out_path + "'");
            out << body.str();
        }
        return any_ok ? kExitOk : kExitNumericalError;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        log << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
}

} // namespace cavityflow
