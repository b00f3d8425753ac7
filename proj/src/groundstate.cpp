#include "fgpe/groundstate.hpp"

#include "fgpe/errors.hpp"
#include "fgpe/fft.hpp"
#include "fgpe/solvers.hpp"
#include "fgpe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace fgpe {

void GroundStateRun::validate() const {
    if (dt <= 0.0)
        throw ConfigError("ground.dt must be positive");
    if (stop_eps <= 0.0 || inner_tol <= 0.0)
        throw ConfigError("ground-state tolerances must be positive");
    if (max_inner < 1 || max_outer < 1)
        throw ConfigError("ground-state iteration limits must be positive");
}

namespace {

void normalize(ComplexField& f) {
    const double n = norm(f);
    if (n == 0.0)
        throw NumericalError("cannot normalize the zero field");
    const double inv = 1.0 / n;
    for (cplx& v : f.values)
        v *= inv;
}

template <typename F>
ComplexField sampled(const GridPtr& grid, F&& f) {
    ComplexField out(grid);
    const auto& n = grid->shape();
    std::size_t idx = 0;
    if (grid->dim() == 2) {
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j)
                out.values[idx++] = f(grid->coord(0, i), grid->coord(1, j), 0.0);
    } else {
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j)
                for (int k = 0; k < n[2]; ++k)
                    out.values[idx++] =
                        f(grid->coord(0, i), grid->coord(1, j), grid->coord(2, k));
    }
    return out;
}

} // namespace

ComplexField harmonic_gaussian(const GridPtr& grid) {
    ComplexField f = sampled(grid, [](double x, double y, double z) {
        return std::exp(-0.5 * (x * x + y * y + z * z));
    });
    normalize(f);
    return f;
}

ComplexField central_vortex(const GridPtr& grid) {
    ComplexField f = sampled(grid, [](double x, double y, double z) {
        return cplx(x, y) * std::exp(-0.5 * (x * x + y * y + z * z));
    });
    normalize(f);
    return f;
}

ComplexField initial_guess(const GridPtr& grid, double omega) {
    if (omega == 0.0)
        return harmonic_gaussian(grid);
    if (omega == 1.0)
        return central_vortex(grid);
    ComplexField g = harmonic_gaussian(grid);
    ComplexField v = central_vortex(grid);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        g.values[i] = (1.0 - omega) * g.values[i] + omega * v.values[i];
    normalize(g);
    return g;
}

void BeOperator::apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const Grid& g = *grid;
    const std::size_t n = g.size();
    hat_.resize(n);
    spec_.resize(n);
    kin_.resize(n);
    out.resize(n);
    fft::forward(g.dim(), g.shape(), in.data(), hat_.data());
    const double inv_n = 1.0 / static_cast<double>(n);

    for (std::size_t i = 0; i < n; ++i)
        spec_[i] = hat_[i] * (*kinetic_symbol)[i];
    fft::inverse(g.dim(), g.shape(), spec_.data(), kin_.data());

    const bool rotating = omega != 0.0;
    if (rotating) {
        dx_.resize(n);
        dy_.resize(n);
        const auto& shape = g.shape();
        std::size_t idx = 0;
        if (g.dim() == 2) {
            for (int i = 0; i < shape[0]; ++i) {
                const cplx ikx(0.0, g.frequency_odd(0, i));
                for (int j = 0; j < shape[1]; ++j, ++idx)
                    spec_[idx] = ikx * hat_[idx];
            }
        } else {
            for (int i = 0; i < shape[0]; ++i) {
                const cplx ikx(0.0, g.frequency_odd(0, i));
                for (int j = 0; j < shape[1]; ++j)
                    for (int k = 0; k < shape[2]; ++k, ++idx)
                        spec_[idx] = ikx * hat_[idx];
            }
        }
        fft::inverse(g.dim(), g.shape(), spec_.data(), dx_.data());
        idx = 0;
        if (g.dim() == 2) {
            for (int i = 0; i < shape[0]; ++i)
                for (int j = 0; j < shape[1]; ++j, ++idx)
                    spec_[idx] = cplx(0.0, g.frequency_odd(1, j)) * hat_[idx];
        } else {
            for (int i = 0; i < shape[0]; ++i)
                for (int j = 0; j < shape[1]; ++j) {
                    const cplx iky(0.0, g.frequency_odd(1, j));
                    for (int k = 0; k < shape[2]; ++k, ++idx)
                        spec_[idx] = iky * hat_[idx];
                }
        }
        fft::inverse(g.dim(), g.shape(), spec_.data(), dy_.data());
    }

    const double inv_dt = 1.0 / dt;
    if (!rotating) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = (inv_dt + w[i]) * in[i] + 0.5 * inv_n * kin_[i];
        return;
    }
    // -Omega Lz = i Omega (x d_y - y d_x)
    const auto& shape = g.shape();
    std::size_t idx = 0;
    if (g.dim() == 2) {
        for (int i = 0; i < shape[0]; ++i) {
            const double x = g.coord(0, i);
            for (int j = 0; j < shape[1]; ++j, ++idx) {
                const double y = g.coord(1, j);
                out[idx] = (inv_dt + w[idx]) * in[idx] + 0.5 * inv_n * kin_[idx] +
                           cplx(0.0, omega) * inv_n * (x * dy_[idx] - y * dx_[idx]);
            }
        }
    } else {
        for (int i = 0; i < shape[0]; ++i) {
            const double x = g.coord(0, i);
            for (int j = 0; j < shape[1]; ++j) {
                const double y = g.coord(1, j);
                for (int k = 0; k < shape[2]; ++k, ++idx)
                    out[idx] = (inv_dt + w[idx]) * in[idx] + 0.5 * inv_n * kin_[idx] +
                               cplx(0.0, omega) * inv_n * (x * dy_[idx] - y * dx_[idx]);
            }
        }
    }
}

BeOperator make_be_operator(const ComplexField& phi_n, const RealField& phi_n_potential,
                            const PhysicsParams& p, const SolverWorkspace& ws, double dt) {
    BeOperator op;
    op.grid = phi_n.grid;
    op.kinetic_symbol = &ws.kinetic_symbol;
    op.dt = dt;
    op.omega = p.omega;
    op.w.resize(phi_n.values.size());
    const bool has_phi = !phi_n_potential.values.empty();
    for (std::size_t i = 0; i < op.w.size(); ++i) {
        double w = ws.trap.values[i] + p.beta * std::norm(phi_n.values[i]);
        if (has_phi)
            w += p.lambda * phi_n_potential.values[i];
        op.w[i] = w;
    }
    return op;
}

ComplexField apply_be_operator(const ComplexField& phi, const ComplexField& phi_n,
                               const RealField& phi_n_potential, const PhysicsParams& p,
                               const SolverWorkspace& ws, double dt) {
    BeOperator op = make_be_operator(phi_n, phi_n_potential, p, ws, dt);
    ComplexField out(phi.grid);
    op.apply(phi.values, out.values);
    return out;
}

void Preconditioner::apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const Grid& g = *grid;
    const std::size_t n = g.size();
    out.resize(n);
    if (kind == PreconditionerKind::potential) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = in[i] * inverse_diagonal[i];
        return;
    }
    std::vector<cplx> hat(n);
    fft::forward(g.dim(), g.shape(), in.data(), hat.data());
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        hat[i] *= inverse_diagonal[i] * inv_n;
    fft::inverse(g.dim(), g.shape(), hat.data(), out.data());
}

Preconditioner make_preconditioner(PreconditionerKind kind, const BeOperator& op) {
    Preconditioner pc;
    pc.kind = kind;
    pc.grid = op.grid;
    const std::size_t n = op.grid->size();
    pc.inverse_diagonal.resize(n);
    const double inv_dt = 1.0 / op.dt;
    if (kind == PreconditionerKind::kinetic) {
        for (std::size_t i = 0; i < n; ++i)
            pc.inverse_diagonal[i] = 1.0 / (inv_dt + 0.5 * (*op.kinetic_symbol)[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = inv_dt + op.w[i];
            if (std::abs(d) < 1e-12 * inv_dt)
                throw NumericalError(
                    "potential preconditioner diagonal is numerically singular");
            pc.inverse_diagonal[i] = 1.0 / d;
        }
    }
    return pc;
}

ComplexField precondition(const ComplexField& phi, PreconditionerKind kind,
                          const PhysicsParams& p, const SolverWorkspace& ws, double dt,
                          const ComplexField& phi_n, const RealField& phi_n_potential) {
    BeOperator op = make_be_operator(phi_n, phi_n_potential, p, ws, dt);
    Preconditioner pc = make_preconditioner(kind, op);
    ComplexField out(phi.grid);
    pc.apply(phi.values, out.values);
    return out;
}

namespace {

// stationary iteration x_{k+1} = D^{-1}(b - R x_k) with the Fourier-diagonal
// D = I/dt + sigma/2; residual bounded by ||D|| ||x_{k+1} - x_k||
SolveStats fixed_point_solve(const BeOperator& op, const std::vector<cplx>& rhs,
                             std::vector<cplx>& x, double tol, int max_iterations) {
    const Grid& g = *op.grid;
    const std::size_t n = g.size();
    const double inv_dt = 1.0 / op.dt;

    double sig_max = 0.0;
    for (double s : *op.kinetic_symbol)
        sig_max = std::max(sig_max, s);
    const double dnorm = inv_dt + 0.5 * sig_max;

    double bnorm = 0.0;
    for (const cplx& v : rhs)
        bnorm += std::norm(v);
    bnorm = std::sqrt(bnorm);

    Preconditioner dinv = make_preconditioner(PreconditionerKind::kinetic, op);

    std::vector<cplx> y(n), xnext(n), lz(n);
    SolveStats stats;
    for (int it = 0; it < max_iterations; ++it) {
        stats.iterations = it + 1;
        // y = b - (W - Omega Lz) x  =  b - w x + Omega Lz x
        if (op.omega != 0.0) {
            ComplexField xf(op.grid, x);
            ComplexField lzf = apply_angular_momentum(xf);
            for (std::size_t i = 0; i < n; ++i)
                y[i] = rhs[i] - op.w[i] * x[i] + op.omega * lzf.values[i];
        } else {
            for (std::size_t i = 0; i < n; ++i)
                y[i] = rhs[i] - op.w[i] * x[i];
        }
        dinv.apply(y, xnext);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            diff += std::norm(xnext[i] - x[i]);
        diff = std::sqrt(diff);
        x.swap(xnext);
        stats.residual = dnorm * diff / std::max(bnorm, 1e-300);
        if (dnorm * diff <= tol * bnorm) {
            stats.converged = true;
            return stats;
        }
        if (!std::isfinite(diff))
            break;
    }
    return stats;
}

std::string trace_tail(const std::vector<OuterRecord>& history) {
    std::ostringstream msg;
    const std::size_t first = history.size() > 8 ? history.size() - 8 : 0;
    for (std::size_t i = first; i < history.size(); ++i) {
        msg << (i > first ? ", " : "") << "E[" << history[i].iteration
            << "]=" << history[i].energy.total;
    }
    return msg.str();
}

} // namespace

ComplexField gfdn_step(const ComplexField& phi_n, const PhysicsParams& p,
                       const GroundStateRun& run, const SolverWorkspace& ws,
                       GfdnStats* stats) {
    RealField phi_pot = interaction_potential(phi_n, p, ws);
    BeOperator op = make_be_operator(phi_n, phi_pot, p, ws, run.dt);

    std::vector<cplx> rhs(phi_n.values.size());
    const double inv_dt = 1.0 / run.dt;
    for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = phi_n.values[i] * inv_dt;

    ComplexField phi1 = phi_n; // warm start
    SolveStats solve_stats;
    if (run.solver == InnerSolver::fixed_point) {
        solve_stats = fixed_point_solve(op, rhs, phi1.values, run.inner_tol, run.max_inner);
    } else {
        const PreconditionerKind kind = run.solver == InnerSolver::krylov_delta
                                            ? PreconditionerKind::kinetic
                                            : PreconditionerKind::potential;
        Preconditioner pc = make_preconditioner(kind, op);
        SolveOptions opts{run.inner_tol, run.max_inner};
        solve_stats = bicgstab(
            [&op](const std::vector<cplx>& in, std::vector<cplx>& out) { op.apply(in, out); },
            rhs, phi1.values,
            [&pc](const std::vector<cplx>& in, std::vector<cplx>& out) { pc.apply(in, out); },
            opts);
    }
    if (!solve_stats.converged) {
        std::ostringstream msg;
        msg << "inner linear solver failed to converge: " << solve_stats.iterations
            << " iterations, relative residual " << solve_stats.residual;
        throw NumericalError(msg.str());
    }
    if (stats) {
        stats->inner_iterations = solve_stats.iterations;
        stats->inner_residual = solve_stats.residual;
    }
    normalize(phi1);
    return phi1;
}

GroundStateResult run_ground_state(const PhysicsParams& p, const GroundStateRun& run,
                                   const ComplexField& phi0, const SolverWorkspace& ws,
                                   const OuterCallback& callback) {
    run.validate();
    p.validate(phi0.grid->dim());

    GroundStateResult result;
    result.phi = phi0;
    normalize(result.phi);

    RealField phi_pot = interaction_potential(result.phi, p, ws);
    EnergyBreakdown prev = energy(result.phi, p, ws.trap, phi_pot);
    bool warned_monotone = false;

    for (int it = 1; it <= run.max_outer; ++it) {
        GfdnStats stats;
        ComplexField next = gfdn_step(result.phi, p, run, ws, &stats);

        double residual = 0.0;
        for (std::size_t i = 0; i < next.values.size(); ++i)
            residual = std::max(residual, std::abs(next.values[i] - result.phi.values[i]));

        phi_pot = interaction_potential(next, p, ws);
        EnergyBreakdown e = energy(next, p, ws.trap, phi_pot);

        OuterRecord rec{it, e, residual, stats.inner_iterations};
        result.history.push_back(rec);
        if (callback)
            callback(rec);

        if (!std::isfinite(e.total) || !std::isfinite(residual))
            throw NumericalError("ground-state flow produced non-finite values");
        if (e.total < run.energy_floor || prev.total - e.total > run.energy_drop_limit) {
            std::ostringstream msg;
            msg << "energy descent crossed the divergence guard (E=" << e.total
                << ", floor=" << run.energy_floor << "): " << trace_tail(result.history);
            if (p.s < 1.0 && p.omega != 0.0)
                throw NonexistenceError("no ground state in this regime; " + msg.str());
            throw NumericalError(msg.str());
        }
        if (!warned_monotone && run.dt <= 1.0001e-3 && e.total > prev.total + 1e-10) {
            std::cerr << "warning: discrete energy increased by " << e.total - prev.total
                      << " at outer step " << it << "\n";
            warned_monotone = true;
        }

        result.phi = std::move(next);
        prev = e;
        if (residual <= run.stop_eps * run.dt) {
            result.converged = true;
            break;
        }
    }
    result.energy = prev;
    if (!result.converged)
        throw NumericalError("ground-state flow did not meet the stopping criterion within "
                             "the outer iteration limit");
    return result;
}

SweepResult critical_rotation(const PhysicsParams& p, const GroundStateRun& run,
                              const GridPtr& grid, const SweepOptions& opts) {
    if (!(opts.omega_lo < opts.omega_hi) || opts.resolution <= 0.0)
        throw ConfigError("sweep bounds must satisfy omega_lo < omega_hi, resolution > 0");

    SweepResult result;
    auto probe = [&](double omega) {
        PhysicsParams pw = p;
        pw.omega = omega;
        SolverWorkspace ws = make_workspace(grid, pw);
        GroundStateResult plain = run_ground_state(pw, run, harmonic_gaussian(grid), ws);
        GroundStateResult vortex = run_ground_state(pw, run, central_vortex(grid), ws);
        result.probes.push_back({omega, plain.energy.total, vortex.energy.total});
        return vortex.energy.total < plain.energy.total;
    };

    double lo = opts.omega_lo, hi = opts.omega_hi;
    if (probe(lo)) {
        result.omega_c = lo;
        return result;
    }
    if (!probe(hi)) {
        result.omega_c = hi;
        return result;
    }
    while (hi - lo > opts.resolution) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid))
            hi = mid;
        else
            lo = mid;
    }
    result.omega_c = 0.5 * (lo + hi);
    return result;
}

} // namespace fgpe
