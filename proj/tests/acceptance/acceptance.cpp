// End-to-end checks against analytic targets.  Each criterion prints exactly
// one PASS/FAIL line; the process exits nonzero when the selected criterion
// fails.  Tolerances are pinned here on purpose: loosening them is a
// regression, not a fix.

#include "fgpe/config.hpp"
#include "fgpe/dynamics.hpp"
#include "fgpe/errors.hpp"
#include "fgpe/groundstate.hpp"
#include "fgpe/io.hpp"
#include "fgpe/nonlocal.hpp"
#include "fgpe/observables.hpp"
#include "fgpe/oracle.hpp"
#include "fgpe/quadrature.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace fgpe;
namespace fs = std::filesystem;

namespace {

GridPtr square(double half_width, int n) {
    return std::make_shared<Grid>(Grid::square(2, half_width, n));
}

void normalize(ComplexField& psi) {
    const double n = norm(psi);
    for (auto& v : psi.values) v /= n;
}

double max_diff(const ComplexField& a, const ComplexField& b) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        mx = std::max(mx, std::abs(a.values[i] - b.values[i]));
    return mx;
}

std::string sci(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

// analytic Gaussian centered at (cx, cy) with the momentum kick
// e^{i v0 (0.8 x + 0.5 y)}, L2-normalized on the grid
ComplexField kicked_gaussian(const GridPtr& g, double cx, double cy, double v0) {
    ComplexField f(g);
    const int n = g->points(0);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < g->points(1); ++j, ++idx) {
            const double x = g->coord(0, i), y = g->coord(1, j);
            const double amp = std::exp(-0.5 * ((x - cx) * (x - cx) + (y - cy) * (y - cy)));
            const double ph = v0 * (0.8 * x + 0.5 * y);
            f.values[idx] = amp * cplx(std::cos(ph), std::sin(ph));
        }
    normalize(f);
    return f;
}

// torus roll by whole cells; used to displace computed ground states whose
// support is far from the boundary
ComplexField shift_cells(const ComplexField& f, int di, int dj) {
    ComplexField out(f.grid);
    const int nx = f.grid->points(0), ny = f.grid->points(1);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const int si = ((i - di) % nx + nx) % nx;
            const int sj = ((j - dj) % ny + ny) % ny;
            out.values[static_cast<std::size_t>(i) * ny + j] =
                f.values[static_cast<std::size_t>(si) * ny + sj];
        }
    return out;
}

ComplexField apply_kick(const ComplexField& f, double v0) {
    ComplexField out = f;
    const int ny = f.grid->points(1);
    std::size_t idx = 0;
    for (int i = 0; i < f.grid->points(0); ++i)
        for (int j = 0; j < ny; ++j, ++idx) {
            const double ph =
                v0 * (0.8 * f.grid->coord(0, i) + 0.5 * f.grid->coord(1, j));
            out.values[idx] *= cplx(std::cos(ph), std::sin(ph));
        }
    return out;
}

double fit_sup_error(const GaussianSumFit& fit) {
    double sup = 0.0;
    const double lo = std::log(fit.window_min), hi = std::log(2.0);
    for (int i = 0; i <= 4000; ++i) {
        const double r = std::exp(lo + (hi - lo) * i / 4000.0);
        sup = std::max(sup, std::abs(fit.evaluate(r) - fit.reference(r)));
    }
    return sup;
}

// E_kin of the normalized Gaussian via the kinetic symbol and radial
// quadrature; r = u^2 absorbs the fractional power's derivative singularity
double radial_kinetic(double s) {
    const FractionalSymbol sym{s, 0.0};
    return integrate_gl(
        [&](double u) {
            const double u2 = u * u;
            return 2.0 * sym.value(u2 * u2) * u2 * u * std::exp(-u2 * u2);
        },
        0.0, 3.5, 64, 24);
}

bool criterion_1(std::string& detail) {
    std::ostringstream d;
    bool ok = true;
    for (int dim : {2, 3}) {
        GaussianSumFit fit = fit_gaussian_sum(KernelSpec::coulomb(1.0), dim, 1e-3, 1e-12);
        const double sup = fit_sup_error(fit);
        ok = ok && sup <= 1e-12;
        d << dim << "d sup " << sci(sup) << " with " << fit.taus.size() << " terms; ";
    }
    detail = d.str();
    return ok;
}

bool criterion_2(std::string& detail) {
    auto g = square(8.0, 64);
    RealField rho(g);
    std::size_t idx = 0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j, ++idx) {
            const double x = g->coord(0, i), y = g->coord(1, j);
            rho.values[idx] = std::exp(-(x * x + y * y)) / kPi;
        }

    PhysicsParams p;
    p.lambda = 1.0;
    SolverWorkspace ws = make_workspace(g, p);
    RealField phi = evaluate_nonlocal_potential(rho, p.kernel, ws.fit, ws.tables);
    RealField ref = direct_oracle(rho, p.kernel);

    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < phi.values.size(); ++k) {
        num = std::max(num, std::abs(phi.values[k] - ref.values[k]));
        den = std::max(den, std::abs(ref.values[k]));
    }
    const double rel = num / den;

    const double origin_target = 0.28209479177387814; // 1/(2 sqrt(pi))
    const std::size_t origin = 32 * 64 + 32;
    const double fast_err = std::abs(phi.values[origin] - origin_target);
    const double oracle_err = std::abs(ref.values[origin] - origin_target);

    detail = "rel Linf " + sci(rel) + ", origin err " + sci(fast_err) + ", oracle err " +
             sci(oracle_err);
    return rel <= 1e-6 && fast_err <= 1e-6 && oracle_err <= 2e-4;
}

bool criterion_3(std::string& detail) {
    auto g = square(32.0, 512);
    PhysicsParams p; // s = 1, harmonic unit trap, no interactions
    SolverWorkspace ws = make_workspace(g, p);
    GroundStateRun run;
    run.dt = 1e-3;
    run.stop_eps = 1e-9;
    GroundStateResult res = run_ground_state(p, run, initial_guess(g, 0.0), ws);

    const double e_err = std::abs(res.energy.total - 1.0);
    const double prof_err = max_diff(res.phi, harmonic_gaussian(g));
    detail = "E err " + sci(e_err) + ", profile err " + sci(prof_err) + ", " +
             std::to_string(res.history.size()) + " iterations";
    return res.converged && e_err <= 1e-6 && prof_err <= 1e-6;
}

bool criterion_4(std::string& detail) {
    std::ostringstream d;
    bool ok = true;
    for (double s : {0.5, 1.0, 1.5, 2.0}) {
        const double target = std::tgamma(s + 1.0) / 2.0;
        const double err = std::abs(radial_kinetic(s) - target);
        ok = ok && err <= 1e-8;
        d << "s=" << s << " err " << sci(err) << "; ";
    }
    // the grid functional agrees wherever the symbol is polynomial (no
    // momentum-space cusp), tying the discrete pipeline to the same constant
    auto g = square(8.0, 64);
    for (double s : {1.0, 2.0}) {
        PhysicsParams p;
        p.s = s;
        SolverWorkspace ws = make_workspace(g, p);
        EnergyBreakdown e = energy(harmonic_gaussian(g), p, ws.trap, RealField());
        const double err = std::abs(e.kinetic - std::tgamma(s + 1.0) / 2.0);
        ok = ok && err <= 1e-8;
        d << "grid s=" << s << " err " << sci(err) << "; ";
    }
    detail = d.str();
    return ok;
}

bool criterion_5(std::string& detail) {
    auto g = square(16.0, 256);
    GroundStateRun run;
    run.dt = 0.1;
    run.stop_eps = 1e-9;
    std::ostringstream d;
    double prev = 0.0;
    bool ok = true;
    bool first = true;
    for (double s : {0.6, 0.8, 1.0}) {
        PhysicsParams p;
        p.s = s;
        SolverWorkspace ws = make_workspace(g, p);
        GroundStateResult res = run_ground_state(p, run, harmonic_gaussian(g), ws);
        const double peak = max_abs(res.phi);
        d << "s=" << s << " peak " << peak << "; ";
        if (!first) ok = ok && peak < prev;
        ok = ok && res.converged;
        prev = peak;
        first = false;
    }
    detail = d.str();
    return ok;
}

bool criterion_6(std::string& detail) {
    auto g = square(12.0, 192);
    PhysicsParams p;
    p.beta = 100.0;
    GroundStateRun run;
    run.dt = 0.1;
    run.stop_eps = 1e-7; // branch energies split by O(1e-2) near the crossing
    SweepOptions opts;
    opts.omega_lo = 0.2;
    opts.omega_hi = 0.6;
    opts.resolution = 0.01;
    SweepResult sweep = critical_rotation(p, run, g, opts);
    detail = "omega_c " + std::to_string(sweep.omega_c) + " from " +
             std::to_string(sweep.probes.size()) + " probes";
    return std::abs(sweep.omega_c - 0.378) <= 0.05;
}

bool criterion_7(std::string& detail) {
    auto g = square(8.0, 128);
    PhysicsParams p; // s = 1, linear, harmonic trap
    SolverWorkspace ws = make_workspace(g, p);
    ComplexField psi0 = kicked_gaussian(g, 1.0, 0.5, 1.0);

    const auto evolve = [&](double dt) {
        DynamicsRun run;
        run.dt = dt;
        run.t_final = 1.0;
        run.diagnostics_every = static_cast<int>(std::lround(1.0 / dt));
        return run_dynamics(psi0, p, run, ws).phi;
    };
    ComplexField ref = evolve(1e-5);
    const double e_coarse = max_diff(evolve(2e-3), ref);
    const double e_fine = max_diff(evolve(1e-3), ref);
    const double ratio = e_coarse / e_fine;
    detail = "errors " + sci(e_coarse) + " / " + sci(e_fine) + ", ratio " +
             std::to_string(ratio);
    return ratio >= 3.5 && ratio <= 4.5;
}

bool criterion_8(std::string& detail) {
    auto g = square(16.0, 256);
    std::ostringstream d;
    bool ok = true;
    for (double s : {0.5, 1.0, 1.5}) {
        PhysicsParams p;
        p.s = s;
        p.lambda = -1.0;
        SolverWorkspace ws = make_workspace(g, p);
        GroundStateRun prep;
        prep.dt = 0.1;
        prep.stop_eps = 1e-9;
        GroundStateResult ground = run_ground_state(p, prep, harmonic_gaussian(g), ws);

        DynamicsRun run;
        run.dt = 1e-3;
        run.t_final = 1.0;
        run.diagnostics_every = 10;
        DynamicsResult res = run_dynamics(apply_kick(ground.phi, 1.0), p, run, ws);

        const double n0 = res.series.front().mass;
        const double e0 = res.series.front().energy.total;
        double dn = 0.0, de = 0.0;
        for (const auto& rec : res.series) {
            dn = std::max(dn, std::abs(rec.mass - n0) / n0);
            de = std::max(de, std::abs(rec.energy.total - e0) / std::abs(e0));
        }
        ok = ok && ground.converged && dn <= 1e-12 && de <= 1e-5;
        d << "s=" << s << " dN " << sci(dn) << " dE " << sci(de) << "; ";
    }
    detail = d.str();
    return ok;
}

bool criterion_9(std::string& detail) {
    auto g = square(8.0, 128);
    std::ostringstream d;

    PhysicsParams radial;
    radial.lambda = 1.0;
    SolverWorkspace ws = make_workspace(g, radial);
    DynamicsRun run;
    run.dt = 1e-3;
    run.t_final = 1.0;
    run.diagnostics_every = 10;
    DynamicsResult vort = run_dynamics(central_vortex(g), radial, run, ws);
    const double l0 = vort.series.front().angular_momentum;
    double drift = 0.0;
    for (const auto& rec : vort.series)
        drift = std::max(drift, std::abs(rec.angular_momentum - l0));
    d << "radial drift " << sci(drift);

    PhysicsParams aniso = radial;
    aniso.gamma = {1.0, 1.2, 1.0};
    SolverWorkspace wsa = make_workspace(g, aniso);
    ComplexField psi0 = shift_cells(harmonic_gaussian(g), 8, -4);
    normalize(psi0);
    DynamicsResult prod = run_dynamics(psi0, aniso, run, wsa);

    const double dt = prod.series[1].t - prod.series[0].t;
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 1; k + 1 < prod.series.size(); ++k)
        scale = std::max(scale, std::abs(prod.series[k].ame_production));
    for (std::size_t k = 1; k + 1 < prod.series.size(); ++k) {
        const double fd = (prod.series[k + 1].angular_momentum -
                           prod.series[k - 1].angular_momentum) /
                          (2.0 * dt);
        worst = std::max(worst, std::abs(fd - prod.series[k].ame_production));
    }
    const double rel = worst / scale;
    d << ", production rel err " << sci(rel);
    detail = d.str();
    return drift <= 1e-8 && rel <= 1e-3;
}

bool criterion_10(std::string& detail) {
    auto g = square(8.0, 128);
    std::ostringstream d;

    PhysicsParams p; // s = 1
    SolverWorkspace ws = make_workspace(g, p);
    DynamicsRun run;
    run.dt = 1e-3;
    run.t_final = 6.283; // one trap period to grid resolution in time
    run.diagnostics_every = 10;
    DynamicsResult swing = run_dynamics(kicked_gaussian(g, 1.0, 1.0, 0.0), p, run, ws);
    double classical = 0.0;
    for (const auto& rec : swing.series) {
        const double target = std::cos(rec.t);
        classical = std::max(classical, std::abs(rec.center[0] - target));
        classical = std::max(classical, std::abs(rec.center[1] - target));
    }
    d << "cosine law err " << sci(classical);

    // the fractional momentum integrand has a |k|^{2s-1} cusp at k = 0; the
    // wider box refines the k lattice enough to certify the 1e-3 target
    auto gf = square(16.0, 256);
    PhysicsParams pf;
    pf.s = 0.75;
    SolverWorkspace wsf = make_workspace(gf, pf);
    GroundStateRun prep;
    prep.dt = 0.1;
    prep.stop_eps = 1e-9;
    GroundStateResult ground = run_ground_state(pf, prep, harmonic_gaussian(gf), wsf);
    ComplexField psi0 = shift_cells(ground.phi, 8, 8);
    normalize(psi0);

    DynamicsRun frun;
    frun.dt = 1e-3;
    frun.t_final = 1.0;
    frun.diagnostics_every = 10;
    DynamicsResult res = run_dynamics(psi0, pf, frun, wsf);
    ComLawResiduals laws = com_law_residuals(res.series, pf);
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < laws.first.size(); ++k)
        worst = std::max(worst, laws.first[k]);
    for (const auto& rec : res.series) {
        scale = std::max(scale, std::abs(rec.momentum[0]));
        scale = std::max(scale, std::abs(rec.momentum[1]));
    }
    const double rel = worst / scale;
    d << ", first-order law rel err " << sci(rel);
    detail = d.str();
    return classical <= 1e-4 && rel <= 1e-3;
}

bool criterion_11(const std::string& cli, const std::string& work, std::string& detail) {
    const fs::path dir = fs::path(work) / "nonexistence";
    fs::create_directories(dir);
    const fs::path cfg_path = dir / "config.ini";
    const fs::path out = dir / "out";

    // the energy floor is raised so the diverging flow aborts within seconds;
    // the guard and exit path are identical to the default-floor run.  dt is
    // small enough that the inner solve stays well conditioned while the
    // state collapses
    std::ofstream cfg(cfg_path);
    cfg << "[run]\nmode = ground\n"
        << "[grid]\ndim = 2\nlo = -8\nhi = 8\npoints = 64\n"
        << "[physics]\ns = 0.5\nomega = 0.8\nlambda = 1\n"
        << "[ground]\ndt = 0.01\nenergy_floor = -50\n";
    cfg.close();

    const std::string cmd = "'" + cli + "' ground --config '" + cfg_path.string() +
                            "' --out '" + out.string() + "' 2> '" +
                            (dir / "stderr.log").string() + "'";
    const int raw = std::system(cmd.c_str());
    const int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;

    std::ifstream conv(out / "convergence.csv");
    std::string line;
    std::getline(conv, line); // header
    std::vector<double> trace;
    while (std::getline(conv, line)) {
        std::istringstream cells(line);
        std::string cell;
        double e_total = 0.0;
        for (int col = 0; std::getline(cells, cell, ','); ++col)
            if (col == 6) e_total = std::strtod(cell.c_str(), nullptr);
        trace.push_back(e_total);
    }

    bool monotone = trace.size() >= 8;
    const std::size_t tail = 8;
    for (std::size_t k = trace.size() - tail + 1; monotone && k < trace.size(); ++k)
        monotone = trace[k] < trace[k - 1];
    const bool diverged = !trace.empty() && trace.back() < -10.0;

    detail = "exit code " + std::to_string(code) + ", " + std::to_string(trace.size()) +
             " trace rows, final E " + (trace.empty() ? "n/a" : sci(trace.back()));
    return code == 4 && monotone && diverged;
}

} // namespace

int main(int argc, char** argv) {
    int criterion = 0;
    std::string cli, work;
    CLI::App app{"acceptance checks"};
    app.add_option("--criterion", criterion, "criterion number (1-11)")->required();
    app.add_option("--cli", cli, "path to the command line binary");
    app.add_option("--work", work, "scratch directory");
    CLI11_PARSE(app, argc, argv);

    static const char* labels[] = {
        "kernel fit accuracy",
        "fast convolution vs direct oracle",
        "analytic harmonic ground state",
        "fractional kinetic identity",
        "ground-state peaking trend",
        "critical rotation frequency",
        "second-order splitting convergence",
        "mass and energy conservation",
        "angular momentum law",
        "center-of-mass laws",
        "nonexistence abort",
    };
    if (criterion < 1 || criterion > 11) {
        std::fprintf(stderr, "criterion must be 1-11\n");
        return 2;
    }
    if (!work.empty()) fs::create_directories(work);

    bool ok = false;
    std::string detail;
    try {
        switch (criterion) {
        case 1: ok = criterion_1(detail); break;
        case 2: ok = criterion_2(detail); break;
        case 3: ok = criterion_3(detail); break;
        case 4: ok = criterion_4(detail); break;
        case 5: ok = criterion_5(detail); break;
        case 6: ok = criterion_6(detail); break;
        case 7: ok = criterion_7(detail); break;
        case 8: ok = criterion_8(detail); break;
        case 9: ok = criterion_9(detail); break;
        case 10: ok = criterion_10(detail); break;
        case 11: ok = criterion_11(cli, work, detail); break;
        }
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
        ok = false;
    }

    std::printf("criterion %d (%s): %s (%s)\n", criterion, labels[criterion - 1],
                ok ? "PASS" : "FAIL", detail.c_str());
    return ok ? 0 : 1;
}
