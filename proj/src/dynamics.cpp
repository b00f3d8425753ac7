#include "fgpe/dynamics.hpp"

#include "fgpe/errors.hpp"
#include "fgpe/fft.hpp"
#include "fgpe/quadrature.hpp"
#include "fgpe/spectral.hpp"

#include <cmath>
#include <sstream>

namespace fgpe {

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

} // namespace

Mat3 rotation_matrix(double omega, double t, int dim) {
    if (dim != 2 && dim != 3)
        throw ConfigError("rotation matrix defined for dim 2 or 3");
    const double c = std::cos(omega * t), s = std::sin(omega * t);
    return Mat3{{{c, s, 0.0}, {-s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

TrigIntegrals trig_integrals(double omega, double t0, double t1) {
    const double span = t1 - t0;
    const double sum = omega * (t0 + t1);
    const double half = 0.5 * span;
    // int cos^2 = span/2 + cos(omega(t0+t1)) sin(omega span) / (2 omega), etc.,
    // written with sinc so omega -> 0 stays exact
    const double s1 = half * sinc(omega * span);
    const double s2 = span * sinc(omega * half);
    TrigIntegrals out;
    out.cc = half + std::cos(sum) * s1;
    out.ss = half - std::cos(sum) * s1;
    out.cs = std::sin(sum) * s1;
    out.c = std::cos(0.5 * sum) * s2;
    out.s = std::sin(0.5 * sum) * s2;
    return out;
}

Mat3 axis_autocorrelation(double omega, const std::array<double, 3>& n, double t0,
                          double t1) {
    const TrigIntegrals I = trig_integrals(omega, t0, t1);
    const double n1 = n[0], n2 = n[1], n3 = n[2];
    Mat3 m{};
    m[0][0] = n1 * n1 * I.cc - 2.0 * n1 * n2 * I.cs + n2 * n2 * I.ss;
    m[1][1] = n1 * n1 * I.ss + 2.0 * n1 * n2 * I.cs + n2 * n2 * I.cc;
    m[0][1] = (n1 * n1 - n2 * n2) * I.cs + n1 * n2 * (I.cc - I.ss);
    m[0][2] = n3 * (n1 * I.c - n2 * I.s);
    m[1][2] = n3 * (n1 * I.s + n2 * I.c);
    m[2][2] = n3 * n3 * (t1 - t0);
    m[1][0] = m[0][1];
    m[2][0] = m[0][2];
    m[2][1] = m[1][2];
    return m;
}

TimeKernel time_integrated_kernel(const KernelSpec& spec, double omega, double t0,
                                  double t1) {
    TimeKernel k;
    k.spec = spec;
    k.omega = omega;
    k.t0 = t0;
    k.t1 = t1;
    if (spec.variant != KernelVariant::coulomb)
        k.axis_integral = axis_autocorrelation(omega, spec.axis, t0, t1);
    return k;
}

RealField potential_time_integral(const PhysicsParams& p, const GridPtr& grid, double t0,
                                  double t1) {
    const double span = t1 - t0;
    RealField out(grid);
    const auto& n = grid->shape();

    if (!p.has_sampled_potential()) {
        const TrigIntegrals I = trig_integrals(p.omega, t0, t1);
        const double gx2 = p.gamma[0] * p.gamma[0];
        const double gy2 = p.gamma[1] * p.gamma[1];
        const double gz2 = p.gamma[2] * p.gamma[2];
        const double axx = 0.5 * (gx2 * I.cc + gy2 * I.ss);
        const double ayy = 0.5 * (gx2 * I.ss + gy2 * I.cc);
        const double axy = (gx2 - gy2) * I.cs;
        std::size_t idx = 0;
        if (grid->dim() == 2) {
            for (int i = 0; i < n[0]; ++i) {
                const double x = grid->coord(0, i);
                for (int j = 0; j < n[1]; ++j, ++idx) {
                    const double y = grid->coord(1, j);
                    out.values[idx] = (axx * x + axy * y) * x + ayy * y * y;
                }
            }
        } else {
            for (int i = 0; i < n[0]; ++i) {
                const double x = grid->coord(0, i);
                for (int j = 0; j < n[1]; ++j) {
                    const double y = grid->coord(1, j);
                    const double xy = (axx * x + axy * y) * x + ayy * y * y;
                    for (int k = 0; k < n[2]; ++k, ++idx) {
                        const double z = grid->coord(2, k);
                        out.values[idx] = xy + 0.5 * gz2 * span * z * z;
                    }
                }
            }
        }
        return out;
    }

    if (!grid->same_layout(*p.sampled_potential.grid))
        throw ConfigError("sampled potential grid does not match the run grid");
    if (p.omega == 0.0) {
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = span * p.sampled_potential.values[i];
        return out;
    }
    if (grid->dim() != 2)
        throw ConfigError("rotating sampled traps are only supported in 2D");

    // bilinear lookup with clamped indices; adequate for traps that vary
    // slowly near the box edge
    const auto& v = p.sampled_potential.values;
    auto lookup = [&](double x, double y) {
        double fi = (x - grid->lo(0)) / grid->spacing(0);
        double fj = (y - grid->lo(1)) / grid->spacing(1);
        fi = std::min(std::max(fi, 0.0), static_cast<double>(n[0] - 1));
        fj = std::min(std::max(fj, 0.0), static_cast<double>(n[1] - 1));
        const int i0 = std::min(static_cast<int>(fi), n[0] - 2);
        const int j0 = std::min(static_cast<int>(fj), n[1] - 2);
        const double a = fi - i0, b = fj - j0;
        const std::size_t base = static_cast<std::size_t>(i0) * n[1] + j0;
        return (1 - a) * ((1 - b) * v[base] + b * v[base + 1]) +
               a * ((1 - b) * v[base + n[1]] + b * v[base + n[1] + 1]);
    };
    const auto& [nodes, weights] = gauss_legendre(4);
    std::size_t idx = 0;
    for (int i = 0; i < n[0]; ++i) {
        const double x = grid->coord(0, i);
        for (int j = 0; j < n[1]; ++j, ++idx) {
            const double y = grid->coord(1, j);
            double acc = 0.0;
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                const double tau = 0.5 * (t0 + t1) + 0.5 * span * nodes[q];
                const double c = std::cos(p.omega * tau), s = std::sin(p.omega * tau);
                acc += weights[q] * lookup(c * x + s * y, -s * x + c * y);
            }
            out.values[idx] = 0.5 * span * acc;
        }
    }
    return out;
}

namespace {

// e^{-i dt sigma/4} / N per mode, ready for unnormalized inverse transforms
std::vector<cplx> kinetic_phase_table(const SolverWorkspace& ws, double dt) {
    const std::size_t n = ws.grid->size();
    std::vector<cplx> table(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = -0.25 * dt * ws.kinetic_symbol[i];
        table[i] = cplx(std::cos(phase) * inv_n, std::sin(phase) * inv_n);
    }
    return table;
}

void apply_mode_phases(ComplexField& phi, const std::vector<cplx>& table) {
    const Grid& g = *phi.grid;
    std::vector<cplx> hat(g.size());
    fft::forward(g.dim(), g.shape(), phi.values.data(), hat.data());
    for (std::size_t i = 0; i < hat.size(); ++i)
        hat[i] *= table[i];
    fft::inverse(g.dim(), g.shape(), hat.data(), phi.values.data());
}

} // namespace

void kinetic_half_step(ComplexField& phi, const SolverWorkspace& ws, double dt) {
    apply_mode_phases(phi, kinetic_phase_table(ws, dt));
}

RealField accumulated_nonlocal_potential(const RealField& rho, const TimeKernel& kernel,
                                         const SolverWorkspace& ws) {
    if (!ws.has_nonlocal)
        throw ConfigError("workspace was built without nonlocal tables");
    if (kernel.spec.variant == KernelVariant::coulomb) {
        RealField phi = evaluate_nonlocal_potential(rho, kernel.spec, ws.fit, ws.tables);
        for (double& v : phi.values)
            v *= kernel.span();
        return phi;
    }

    Mat3 coeffs{};
    double local = 0.0;
    const auto& c = kernel.axis_integral;
    if (kernel.spec.variant == KernelVariant::dipole3d) {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                coeffs[a][b] = -3.0 * c[a][b];
        local = -kernel.span();
    } else {
        const double n3 = kernel.spec.axis[2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                coeffs[a][b] = -1.5 * c[a][b];
        coeffs[0][0] += 1.5 * n3 * n3 * kernel.span();
        coeffs[1][1] += 1.5 * n3 * n3 * kernel.span();
    }

    RealField reduced = weighted_second_derivative(rho, coeffs);
    RealField phi = coulomb_convolution(reduced, ws.tables);
    if (local != 0.0)
        for (std::size_t i = 0; i < phi.values.size(); ++i)
            phi.values[i] += local * rho.values[i];
    return phi;
}

void nonlinear_step(ComplexField& phi, const PhysicsParams& p, const SolverWorkspace& ws,
                    double t0, double t1) {
    const std::size_t n = phi.values.size();
    const double span = t1 - t0;

    RealField rho(phi.grid);
    for (std::size_t i = 0; i < n; ++i)
        rho.values[i] = std::norm(phi.values[i]);

    RealField phase = potential_time_integral(p, phi.grid, t0, t1);
    if (p.beta != 0.0)
        for (std::size_t i = 0; i < n; ++i)
            phase.values[i] += span * p.beta * rho.values[i];
    if (p.lambda != 0.0 && ws.has_nonlocal) {
        TimeKernel kernel = time_integrated_kernel(p.kernel, p.omega, t0, t1);
        RealField nl = accumulated_nonlocal_potential(rho, kernel, ws);
        for (std::size_t i = 0; i < n; ++i)
            phase.values[i] += p.lambda * nl.values[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double a = phase.values[i];
        phi.values[i] *= cplx(std::cos(a), -std::sin(a));
    }
}

void ts2_step(ComplexField& phi, const PhysicsParams& p, const SolverWorkspace& ws,
              double t_n, double dt) {
    kinetic_half_step(phi, ws, dt);
    nonlinear_step(phi, p, ws, t_n, t_n + dt);
    kinetic_half_step(phi, ws, dt);
}

void DynamicsRun::validate() const {
    if (dt <= 0.0)
        throw ConfigError("dynamics.dt must be positive");
    if (t_final < 0.0)
        throw ConfigError("dynamics.t_final must be non-negative");
    if (diagnostics_every < 0 || snapshot_every < 0)
        throw ConfigError("dynamics cadences must be non-negative");
}

DiagnosticsRecord diagnostics(const ComplexField& phi, const PhysicsParams& p,
                              const SolverWorkspace& ws, double t) {
    DiagnosticsRecord rec;
    rec.t = t;
    rec.mass = mass(phi);

    RealField pot = interaction_potential(phi, p, ws);

    const bool rotated_trap = p.omega != 0.0 && t != 0.0 && !p.has_sampled_potential() &&
                              p.gamma[0] != p.gamma[1];
    if (rotated_trap) {
        // V(A(t) x~) stays harmonic with mixed terms
        RealField trap(phi.grid);
        const double c = std::cos(p.omega * t), s = std::sin(p.omega * t);
        const double gx2 = p.gamma[0] * p.gamma[0], gy2 = p.gamma[1] * p.gamma[1];
        const double axx = 0.5 * (gx2 * c * c + gy2 * s * s);
        const double ayy = 0.5 * (gx2 * s * s + gy2 * c * c);
        const double axy = (gx2 - gy2) * c * s;
        const double gz2 = p.gamma[2] * p.gamma[2];
        const auto& n = phi.grid->shape();
        std::size_t idx = 0;
        if (phi.grid->dim() == 2) {
            for (int i = 0; i < n[0]; ++i) {
                const double x = phi.grid->coord(0, i);
                for (int j = 0; j < n[1]; ++j, ++idx) {
                    const double y = phi.grid->coord(1, j);
                    trap.values[idx] = (axx * x + axy * y) * x + ayy * y * y;
                }
            }
        } else {
            for (int i = 0; i < n[0]; ++i) {
                const double x = phi.grid->coord(0, i);
                for (int j = 0; j < n[1]; ++j) {
                    const double y = phi.grid->coord(1, j);
                    const double xy = (axx * x + axy * y) * x + ayy * y * y;
                    for (int k = 0; k < n[2]; ++k, ++idx) {
                        const double z = phi.grid->coord(2, k);
                        trap.values[idx] = xy + 0.5 * gz2 * z * z;
                    }
                }
            }
        }
        rec.energy = energy(phi, p, trap, pot);
    } else {
        rec.energy = energy(phi, p, ws.trap, pot);
    }

    rec.angular_momentum = angular_momentum(phi);
    rec.ame_production = ame_production(phi, p, pot, t);

    const Mat3 A = rotation_matrix(p.omega, t, phi.grid->dim());
    const auto xc = center_of_mass(phi);
    const auto g = generalized_momentum(phi, p.s, p.m);
    const auto M = second_moment_matrix(phi);
    for (int a = 0; a < 3; ++a) {
        rec.center[a] = 0.0;
        rec.momentum[a] = 0.0;
        for (int b = 0; b < 3; ++b) {
            rec.center[a] += A[a][b] * xc[b];
            rec.momentum[a] += A[a][b] * g[b];
        }
    }
    // widths are the diagonal of A M A^T
    for (int a = 0; a < 3; ++a) {
        double w = 0.0;
        for (int b = 0; b < 3; ++b)
            for (int c2 = 0; c2 < 3; ++c2)
                w += A[a][b] * M[b][c2] * A[a][c2];
        rec.widths[a] = w;
    }
    return rec;
}

DynamicsResult run_dynamics(const ComplexField& psi0, const PhysicsParams& p,
                            const DynamicsRun& run, const SolverWorkspace& ws,
                            const DiagnosticsCallback& on_diagnostics,
                            const SnapshotCallback& on_snapshot) {
    run.validate();
    p.validate(psi0.grid->dim());
    if (!psi0.grid->same_layout(*ws.grid))
        throw ConfigError("initial state grid does not match the workspace grid");
    if (p.has_sampled_potential() && p.omega != 0.0 && psi0.grid->dim() != 2)
        throw ConfigError("rotating sampled traps are only supported in 2D");

    DynamicsResult result;
    result.phi = psi0;
    result.t = 0.0;

    const double steps_exact = run.t_final / run.dt;
    const long steps = std::lround(steps_exact);
    if (std::abs(steps_exact - static_cast<double>(steps)) > 1e-9 * (steps_exact + 1.0))
        throw ConfigError("dynamics.t_final must be an integer multiple of dynamics.dt");

    auto record = [&](double t) {
        DiagnosticsRecord rec = diagnostics(result.phi, p, ws, t);
        result.series.push_back(rec);
        if (on_diagnostics)
            on_diagnostics(rec);
    };
    record(0.0);
    if (on_snapshot && run.snapshot_every > 0)
        on_snapshot(result.phi, 0.0);
    if (steps == 0)
        return result;

    const std::vector<cplx> half = kinetic_phase_table(ws, run.dt);
    const std::vector<cplx> fused = kinetic_phase_table(ws, 2.0 * run.dt);

    double prev_max = max_abs(result.phi);
    ComplexField last_good = result.phi;
    double last_good_t = 0.0;

    apply_mode_phases(result.phi, half);
    for (long n = 0; n < steps; ++n) {
        const double t0 = static_cast<double>(n) * run.dt;
        const double t1 = static_cast<double>(n + 1) * run.dt;
        nonlinear_step(result.phi, p, ws, t0, t1);

        const bool last = n + 1 == steps;
        const bool diag_due =
            last || (run.diagnostics_every > 0 && (n + 1) % run.diagnostics_every == 0);
        const bool snap_due =
            on_snapshot && run.snapshot_every > 0 &&
            (last || (n + 1) % run.snapshot_every == 0);

        const bool boundary = diag_due || snap_due;
        apply_mode_phases(result.phi, boundary ? half : fused);

        const double peak = max_abs(result.phi);
        if (!std::isfinite(peak) || peak > 1e3 * prev_max) {
            if (on_snapshot)
                on_snapshot(last_good, last_good_t);
            std::ostringstream msg;
            msg << "time integration became unstable at t=" << t1 << " (peak " << peak
                << ", previous " << prev_max << "); last good state at t=" << last_good_t;
            throw NumericalError(msg.str());
        }
        prev_max = peak;

        if (boundary) {
            record(t1);
            if (snap_due)
                on_snapshot(result.phi, t1);
            last_good = result.phi;
            last_good_t = t1;
            if (!last)
                apply_mode_phases(result.phi, half);
        }
    }
    result.t = static_cast<double>(steps) * run.dt;
    return result;
}

} // namespace fgpe
