#include "fgpe/config.hpp"
#include "fgpe/dynamics.hpp"
#include "fgpe/errors.hpp"
#include "fgpe/fft.hpp"
#include "fgpe/groundstate.hpp"
#include "fgpe/io.hpp"
#include "fgpe/nonlocal.hpp"
#include "fgpe/observables.hpp"
#include "fgpe/oracle.hpp"
#include "fgpe/quadrature.hpp"
#include "fgpe/spectral.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace fgpe;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int resolve_threads(int flag_value, const RunConfig& cfg) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("FGPE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw ConfigError("FGPE_THREADS: expected a positive integer, got '" +
                              std::string(env) + "'");
        return static_cast<int>(v);
    }
    return cfg.threads;
}

std::string resolve_out(const std::string& flag_value, const RunConfig& cfg) {
    const std::string& dir = !flag_value.empty() ? flag_value : cfg.out_dir;
    if (dir.empty())
        throw ConfigError("an output directory is required: pass --out or set run.out");
    fs::create_directories(dir);
    return dir;
}

void load_trap(PhysicsParams& p, const RunConfig& cfg, const GridPtr& grid) {
    if (cfg.trap_file.empty()) return;
    Snapshot snap = read_snapshot(cfg.trap_file);
    if (!snap.field.grid->same_layout(*grid))
        throw ConfigError("trap.file: sampled potential grid does not match the run grid");
    RealField v(grid);
    for (std::size_t i = 0; i < v.values.size(); ++i)
        v.values[i] = snap.field.values[i].real();
    p.sampled_potential = std::move(v);
    p.validate(grid->dim());
}

// x0 as whole grid cells per axis; analytic states and loaded fields shift the
// same way so that file-based and generated initial data agree exactly
std::array<int, 3> shift_cells(const RunConfig& cfg, const Grid& grid) {
    std::array<int, 3> cells{};
    for (int a = 0; a < grid.dim(); ++a) {
        const double h = grid.spacing(a);
        const double raw = cfg.initial.shift[static_cast<std::size_t>(a)] / h;
        const double rounded = std::round(raw);
        if (std::abs(raw - rounded) > 1e-9)
            throw ConfigError("initial.x0: each component must be a whole number of grid "
                              "cells (spacing " + fmt(h) + ")");
        cells[static_cast<std::size_t>(a)] = static_cast<int>(rounded);
    }
    return cells;
}

ComplexField roll(const ComplexField& in, const std::array<int, 3>& cells) {
    const Grid& g = *in.grid;
    ComplexField out(in.grid);
    const auto& n = g.shape();
    const auto wrap = [](int i, int m) { return ((i % m) + m) % m; };
    if (g.dim() == 2) {
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j) {
                const int si = wrap(i - cells[0], n[0]);
                const int sj = wrap(j - cells[1], n[1]);
                out.values[static_cast<std::size_t>(i) * n[1] + j] =
                    in.values[static_cast<std::size_t>(si) * n[1] + sj];
            }
    } else {
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j)
                for (int k = 0; k < n[2]; ++k) {
                    const int si = wrap(i - cells[0], n[0]);
                    const int sj = wrap(j - cells[1], n[1]);
                    const int sk = wrap(k - cells[2], n[2]);
                    out.values[(static_cast<std::size_t>(i) * n[1] + j) * n[2] + k] =
                        in.values[(static_cast<std::size_t>(si) * n[1] + sj) * n[2] + sk];
                }
    }
    return out;
}

ComplexField build_initial(const RunConfig& cfg, const GridPtr& grid) {
    ComplexField psi;
    switch (cfg.initial.kind) {
    case InitialKind::guess: psi = initial_guess(grid, cfg.physics.omega); break;
    case InitialKind::gaussian: psi = harmonic_gaussian(grid); break;
    case InitialKind::vortex: psi = central_vortex(grid); break;
    case InitialKind::file: {
        Snapshot snap = read_snapshot(cfg.initial.file);
        if (!snap.field.grid->same_layout(*grid))
            throw ConfigError("initial.file: snapshot grid does not match the run grid");
        psi = std::move(snap.field);
        break;
    }
    }
    const auto cells = shift_cells(cfg, *grid);
    if (cells != std::array<int, 3>{}) psi = roll(psi, cells);
    if (cfg.initial.boost != 0.0) {
        const Grid& g = *grid;
        const auto& n = g.shape();
        const double v0 = cfg.initial.boost;
        std::size_t idx = 0;
        const int nz = g.dim() == 3 ? n[2] : 1;
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j)
                for (int k = 0; k < nz; ++k, ++idx) {
                    (void)k;
                    const double phase = v0 * (0.8 * g.coord(0, i) + 0.5 * g.coord(1, j));
                    psi.values[idx] *= cplx(std::cos(phase), std::sin(phase));
                }
    }
    return psi;
}

void normalize(ComplexField& psi) {
    const double n = std::sqrt(mass(psi));
    if (!(n > 0.0)) throw NumericalError("initial state has zero mass");
    for (cplx& z : psi.values) z /= n;
}

Mat3 identity_matrix() {
    return Mat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
}

void write_effective_config(const RunConfig& cfg, const std::string& out_dir) {
    std::ofstream out(out_dir + "/config.ini", std::ios::binary);
    out << serialize_config(cfg);
}

int cmd_ground(const RunConfig& cfg, const std::string& out_dir) {
    auto grid = make_grid(cfg);
    PhysicsParams p = cfg.physics;
    load_trap(p, cfg, grid);
    auto ws = make_workspace(grid, p);

    ComplexField phi0 = build_initial(cfg, grid);
    normalize(phi0);

    write_effective_config(cfg, out_dir);
    std::ofstream conv(out_dir + "/convergence.csv", std::ios::binary);
    conv << convergence_csv_header() << '\n';

    GroundStateResult result;
    try {
        result = run_ground_state(p, cfg.ground, phi0, ws, [&conv](const OuterRecord& r) {
            conv << convergence_csv_row(r) << '\n';
        });
    } catch (...) {
        conv.flush();
        throw;
    }

    Snapshot snap;
    snap.field = result.phi;
    snap.t = 0.0;
    snap.rotating_frame = false;
    snap.rotation = identity_matrix();
    snap.params_hash = params_fingerprint(p);
    write_snapshot(out_dir + "/ground_state.fgsn", snap);

    std::ofstream sum(out_dir + "/summary.txt", std::ios::binary);
    sum << "converged = " << (result.converged ? "true" : "false") << '\n';
    sum << "iterations = " << result.history.size() << '\n';
    sum << "residual = " << fmt(result.history.empty() ? 0.0 : result.history.back().residual)
        << '\n';
    sum << "mass = " << fmt(mass(result.phi)) << '\n';
    sum << "e_kinetic = " << fmt(result.energy.kinetic) << '\n';
    sum << "e_potential = " << fmt(result.energy.potential) << '\n';
    sum << "e_rotation = " << fmt(result.energy.rotation) << '\n';
    sum << "e_local = " << fmt(result.energy.local) << '\n';
    sum << "e_nonlocal = " << fmt(result.energy.nonlocal) << '\n';
    sum << "e_total = " << fmt(result.energy.total) << '\n';
    return 0;
}

int cmd_dynamics(const RunConfig& cfg, const std::string& out_dir) {
    auto grid = make_grid(cfg);
    PhysicsParams p = cfg.physics;
    load_trap(p, cfg, grid);
    auto ws = make_workspace(grid, p);

    ComplexField psi0 = build_initial(cfg, grid);

    write_effective_config(cfg, out_dir);
    std::ofstream diag(out_dir + "/diagnostics.csv", std::ios::binary);
    diag << diagnostics_csv_header() << '\n';

    const std::uint64_t hash = params_fingerprint(p);
    const bool rotating = p.omega != 0.0;
    int snapshot_index = 0;
    const auto save = [&](const ComplexField& f, double t, const std::string& name) {
        Snapshot snap;
        snap.field = f;
        snap.t = t;
        snap.rotating_frame = rotating;
        snap.rotation = rotation_matrix(p.omega, t, grid->dim());
        snap.params_hash = hash;
        write_snapshot(out_dir + "/" + name, snap);
    };

    DynamicsResult result;
    try {
        result = run_dynamics(
            psi0, p, cfg.dynamics, ws,
            [&diag](const DiagnosticsRecord& r) { diag << diagnostics_csv_row(r) << '\n'; },
            [&](const ComplexField& f, double t) {
                char name[48];
                std::snprintf(name, sizeof name, "snapshot_%06d.fgsn", snapshot_index++);
                save(f, t, name);
            });
    } catch (...) {
        diag.flush();
        throw;
    }

    save(result.phi, result.t, "state_final.fgsn");
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir) {
    auto grid = make_grid(cfg);
    write_effective_config(cfg, out_dir);

    std::vector<double> s_list = cfg.sweep.s_values;
    if (s_list.empty()) s_list.push_back(cfg.physics.s);

    std::ofstream table(out_dir + "/critical_omega.csv", std::ios::binary);
    table << "s,omega_c\n";

    for (double s : s_list) {
        PhysicsParams p = cfg.physics;
        p.s = s;
        load_trap(p, cfg, grid);
        p.validate(grid->dim());

        SweepOptions opts;
        opts.omega_lo = cfg.sweep.omega_lo;
        opts.omega_hi = cfg.sweep.omega_hi;
        opts.resolution = cfg.sweep.resolution;
        const SweepResult result = critical_rotation(p, cfg.ground, grid, opts);

        table << fmt(s) << ',' << fmt(result.omega_c) << '\n';
        table.flush();

        char name[48];
        std::snprintf(name, sizeof name, "probes_s%g.csv", s);
        std::ofstream probes(out_dir + "/" + name, std::ios::binary);
        probes << "omega,energy_plain,energy_vortex\n";
        for (const auto& pr : result.probes)
            probes << fmt(pr.omega) << ',' << fmt(pr.energy_plain) << ','
                   << fmt(pr.energy_vortex) << '\n';
    }
    return 0;
}

// quick built-in fixtures: kernel fit accuracy, spot symbol values, the
// convolution pipeline against the direct oracle, kinetic functional identity
int cmd_verify() {
    int failures = 0;
    const auto report = [&failures](bool ok, const std::string& name, const std::string& detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        if (!ok) ++failures;
    };
    using clock = std::chrono::steady_clock;

    for (int dim : {2, 3}) {
        const auto t0 = clock::now();
        const auto fit = fit_gaussian_sum(KernelSpec::coulomb(1.0), dim);
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        double sup = 0.0;
        for (int i = 0; i <= 4000; ++i) {
            const double r = 1e-3 + (2.0 - 1e-3) * i / 4000.0;
            sup = std::max(sup, std::abs(fit.evaluate(r) - fit.reference(r)));
        }
        report(sup <= 1e-12, "gaussian_sum_fit_" + std::to_string(dim) + "d",
               "terms=" + std::to_string(fit.weights.size()) + " sup_error=" + fmt(sup) +
                   " limit=1e-12 time=" + fmt(secs) + "s");
    }

    {
        const double k1[2] = {2.0, 0.0};
        const double v1 = kernel_fourier_symbol(KernelSpec::coulomb(1.0), {k1, 2}, 2);
        const double k2[2] = {1.0, 0.0};
        const double v2 = kernel_fourier_symbol(KernelSpec::coulomb(0.5), {k2, 2}, 2);
        const double k3[3] = {0.0, 0.0, 2.0};
        const double v3 = kernel_fourier_symbol(KernelSpec::dipole3d({0, 0, 1}), {k3, 3}, 3);
        const double k4[3] = {3.0, 0.0, 0.0};
        const double v4 = kernel_fourier_symbol(KernelSpec::dipole3d({0, 0, 1}), {k4, 3}, 3);
        const double err = std::max({std::abs(v1 - 0.5), std::abs(v2 - 0.477988797486125),
                                     std::abs(v3 - 2.0), std::abs(v4 + 1.0)});
        report(err <= 1e-12, "kernel_symbol_values", "max_error=" + fmt(err) + " limit=1e-12");
    }

    {
        auto grid = std::make_shared<Grid>(Grid::square(2, 8.0, 64));
        RealField rho(grid);
        std::size_t idx = 0;
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j, ++idx) {
                const double x = grid->coord(0, i), y = grid->coord(1, j);
                rho.values[idx] = std::exp(-(x * x + y * y)) / kPi;
            }
        const auto spec = KernelSpec::coulomb(1.0);
        const auto fit = fit_gaussian_sum(spec, 2);
        const auto tables = build_convolution_tables(*grid, fit);
        const RealField phi = evaluate_nonlocal_potential(rho, spec, fit, tables);

        const std::size_t center = 32 * 64 + 32;
        const double phi0_exact = 1.0 / (2.0 * std::sqrt(kPi));
        const double err0 = std::abs(phi.values[center] - phi0_exact);

        OracleOptions oopts;
        oopts.targets = {center, 36 * 64 + 36, 24 * 64 + 40, 48 * 64 + 20};
        const RealField ref = direct_oracle(rho, spec, oopts);
        double scale = 0.0, diff = 0.0;
        for (std::size_t t : oopts.targets) scale = std::max(scale, std::abs(ref.values[t]));
        for (std::size_t t : oopts.targets)
            diff = std::max(diff, std::abs(ref.values[t] - phi.values[t]));
        const bool ok = err0 <= 1e-6 && diff <= 1e-6 * scale;
        report(ok, "nonlocal_pipeline_64",
               "origin_error=" + fmt(err0) + " oracle_rel_error=" + fmt(diff / scale) +
                   " limit=1e-6");
    }

    {
        // E_kin of the unit Gaussian: radial Fourier integral equals
        // Gamma(s+1)/2; exercises the same symbol code the energy uses
        double max_err = 0.0;
        for (double s : {0.5, 1.0, 1.5, 2.0}) {
            const FractionalSymbol sym{s, 0.0};
            const double val = integrate_gl(
                [&sym](double r) { return sym.value(r * r) * r * std::exp(-r * r); }, 0.0,
                12.0, 24);
            max_err = std::max(max_err, std::abs(val - 0.5 * std::tgamma(s + 1.0)));
        }
        report(max_err <= 1e-8, "kinetic_functional_gamma", "max_error=" + fmt(max_err) +
                                                                " limit=1e-8");

        auto grid = std::make_shared<Grid>(Grid::square(2, 12.0, 128));
        PhysicsParams p;
        const auto breakdown =
            energy(harmonic_gaussian(grid), p, trap_potential(grid, p), RealField{});
        const double err = std::abs(breakdown.kinetic - 0.5);
        report(err <= 1e-10, "kinetic_energy_grid_s1", "error=" + fmt(err) + " limit=1e-10");
    }

    if (failures > 0)
        throw NumericalError("verification failed: " + std::to_string(failures) + " check(s)");
    std::cout << "verify: all checks passed\n";
    return 0;
}

int cmd_plot(const std::string& input, const std::string& kind, const std::string& columns,
             const std::string& out_path) {
    std::vector<std::string> cols;
    std::string cur;
    for (char c : columns) {
        if (c == ',') {
            if (!cur.empty()) cols.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) cols.push_back(cur);

    if (out_path.empty()) {
        emit_plot_data(input, kind, std::cout, cols);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open '" + out_path + "' for writing");
        emit_plot_data(input, kind, out, cols);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional Gross-Pitaevskii toolkit: ground states, rotating dynamics, "
                 "critical-frequency sweeps"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    const auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config_path, "run configuration file");
        if (config_required) c->required();
        sub->add_option("--out", out_dir, "output directory (overrides run.out)");
        sub->add_option("--threads", threads,
                        "FFT thread count (overrides FGPE_THREADS and run.threads)");
    };

    auto* ground = app.add_subcommand("ground", "compute a ground state by gradient flow");
    add_common(ground, true);
    auto* dynamics = app.add_subcommand("dynamics", "integrate the time-dependent equation");
    add_common(dynamics, true);
    auto* sweep = app.add_subcommand("sweep", "bisect the critical rotation frequency");
    add_common(sweep, true);
    auto* verify = app.add_subcommand("verify", "run built-in verification fixtures");
    add_common(verify, false);

    std::string plot_input, plot_kind, plot_columns, plot_out;
    auto* plot = app.add_subcommand("plot", "emit plain-text plot tables");
    plot->add_option("--input", plot_input, "snapshot or CSV file")->required();
    plot->add_option("--kind", plot_kind, "slice_x|contour_grid|timeseries")->required();
    plot->add_option("--columns", plot_columns, "comma-separated CSV columns (timeseries)");
    plot->add_option("--out", plot_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 2;
    }

    try {
        if (plot->parsed()) return cmd_plot(plot_input, plot_kind, plot_columns, plot_out);
        if (verify->parsed()) {
            if (!config_path.empty()) {
                const RunConfig cfg = parse_config_file(config_path);
                fft::set_threads(resolve_threads(threads, cfg));
            } else {
                fft::set_threads(threads > 0 ? threads : 1);
            }
            return cmd_verify();
        }

        const RunConfig cfg = parse_config_file(config_path);
        fft::set_threads(resolve_threads(threads, cfg));
        const std::string dir = resolve_out(out_dir, cfg);

        if (ground->parsed()) return cmd_ground(cfg, dir);
        if (dynamics->parsed()) return cmd_dynamics(cfg, dir);
        if (sweep->parsed()) return cmd_sweep(cfg, dir);
        throw ConfigError("no subcommand selected");
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 2;
    } catch (const NonexistenceError& e) {
        std::cerr << "error: nonexistence: " << e.what() << '\n';
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "error: numerical: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 3;
    }
}
