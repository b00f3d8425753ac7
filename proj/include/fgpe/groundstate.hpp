#pragma once

#include "fgpe/observables.hpp"
#include "fgpe/physics.hpp"

#include <functional>

namespace fgpe {

enum class InnerSolver { fixed_point, krylov_delta, krylov_tf };

struct GroundStateRun {
    double dt = 1e-3;
    // stop when ||phi_n - phi_{n+1}||_inf <= stop_eps * dt
    double stop_eps = 1e-9;
    InnerSolver solver = InnerSolver::krylov_delta;
    double inner_tol = 1e-11;
    int max_inner = 2000;
    int max_outer = 200000;
    // nonexistence guard: abort when E falls below the floor or drops by more
    // than energy_drop_limit within one step
    double energy_floor = -1e6;
    double energy_drop_limit = 1e3;

    void validate() const;
};

// normalized Gaussian, 2D pi^{-1/2} e^{-|x|^2/2}, 3D pi^{-3/4} e^{-|x|^2/2}
ComplexField harmonic_gaussian(const GridPtr& grid);
// normalized (x + iy) e^{-|x|^2/2} central vortex
ComplexField central_vortex(const GridPtr& grid);
// normalized blend (1 - omega) * gaussian + omega * vortex
ComplexField initial_guess(const GridPtr& grid, double omega);

// backward-Euler operator A = I/dt + (1/2)(-lap + m^2)^s + W - Omega Lz with
// the frozen potential W = V + beta |phi_n|^2 + lambda Phi_n
struct BeOperator {
    GridPtr grid;
    std::vector<double> w;
    const std::vector<double>* kinetic_symbol = nullptr;
    double dt = 1.0;
    double omega = 0.0;

    void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const;

private:
    // transform scratch, reused across applications
    mutable std::vector<cplx> hat_, spec_, kin_, dx_, dy_;
};

BeOperator make_be_operator(const ComplexField& phi_n, const RealField& phi_n_potential,
                            const PhysicsParams& p, const SolverWorkspace& ws, double dt);

ComplexField apply_be_operator(const ComplexField& phi, const ComplexField& phi_n,
                               const RealField& phi_n_potential, const PhysicsParams& p,
                               const SolverWorkspace& ws, double dt);

enum class PreconditionerKind { kinetic, potential };

// kinetic: [I/dt + (1/2)(-lap+m^2)^s]^{-1} (Fourier diagonal)
// potential: [I/dt + W]^{-1} (pointwise; throws when the diagonal nears 0)
struct Preconditioner {
    PreconditionerKind kind = PreconditionerKind::kinetic;
    GridPtr grid;
    std::vector<double> inverse_diagonal;

    void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const;
};

Preconditioner make_preconditioner(PreconditionerKind kind, const BeOperator& op);

ComplexField precondition(const ComplexField& phi, PreconditionerKind kind,
                          const PhysicsParams& p, const SolverWorkspace& ws, double dt,
                          const ComplexField& phi_n, const RealField& phi_n_potential);

struct GfdnStats {
    int inner_iterations = 0;
    double inner_residual = 0.0;
};

// one gradient-flow step: solve A phi1 = phi_n / dt, then renormalize
ComplexField gfdn_step(const ComplexField& phi_n, const PhysicsParams& p,
                       const GroundStateRun& run, const SolverWorkspace& ws,
                       GfdnStats* stats = nullptr);

struct OuterRecord {
    int iteration = 0;
    EnergyBreakdown energy;
    double residual = 0.0; // ||phi_n - phi_{n+1}||_inf
    int inner_iterations = 0;
};

struct GroundStateResult {
    ComplexField phi;
    EnergyBreakdown energy;
    std::vector<OuterRecord> history;
    bool converged = false;
};

using OuterCallback = std::function<void(const OuterRecord&)>;

GroundStateResult run_ground_state(const PhysicsParams& p, const GroundStateRun& run,
                                   const ComplexField& phi0, const SolverWorkspace& ws,
                                   const OuterCallback& callback = {});

struct SweepOptions {
    double omega_lo = 0.0;
    double omega_hi = 1.0;
    double resolution = 0.01;
};

struct SweepProbe {
    double omega = 0.0;
    double energy_plain = 0.0;  // converged from the vortex-free seed
    double energy_vortex = 0.0; // converged from the vortex seed
};

struct SweepResult {
    double omega_c = 0.0;
    std::vector<SweepProbe> probes;
};

// bisection for the smallest omega whose vortex-seeded state wins energetically
SweepResult critical_rotation(const PhysicsParams& p, const GroundStateRun& run,
                              const GridPtr& grid, const SweepOptions& opts);

} // namespace fgpe
