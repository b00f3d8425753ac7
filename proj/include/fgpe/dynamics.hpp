#pragma once

#include "fgpe/observables.hpp"
#include "fgpe/physics.hpp"

#include <functional>

namespace fgpe {

using Mat3 = std::array<std::array<double, 3>, 3>;

// lab coordinates of a rotating-frame point: x = A(t) x~; 2D embeds in the
// upper-left block with A33 = 1
Mat3 rotation_matrix(double omega, double t, int dim);

// {int cos^2, int sin^2, int cos*sin, int cos, int sin} of (omega tau) over
// [t0, t1], in cancellation-free product form (valid for any omega, t1 < t0)
struct TrigIntegrals {
    double cc, ss, cs, c, s;
};
TrigIntegrals trig_integrals(double omega, double t0, double t1);

// int_{t0}^{t1} m(tau) m(tau)^T dtau with the rotated dipole axis
// m(tau) = A(tau)^T n
Mat3 axis_autocorrelation(double omega, const std::array<double, 3>& n, double t0,
                          double t1);

// interaction kernel integrated over one splitting interval with the density
// frozen; Coulomb needs only the span, dipolar variants the axis integral
struct TimeKernel {
    KernelSpec spec;
    double omega = 0.0;
    double t0 = 0.0, t1 = 0.0;
    Mat3 axis_integral{};

    double span() const { return t1 - t0; }
};
TimeKernel time_integrated_kernel(const KernelSpec& spec, double omega, double t0,
                                  double t1);

// int_{t0}^{t1} V(A(tau) x~) dtau: closed trigonometric form for harmonic
// traps; sampled traps use 4-point Gauss-Legendre with bilinear lookups
// (exact when omega = 0)
RealField potential_time_integral(const PhysicsParams& p, const GridPtr& grid, double t0,
                                  double t1);

// multiplies each mode by e^{-i dt sigma^s / 4} (the Strang half step)
void kinetic_half_step(ComplexField& phi, const SolverWorkspace& ws, double dt);

// int_{t0}^{t1} Phi(x~, tau) dtau for frozen density (lambda not included)
RealField accumulated_nonlocal_potential(const RealField& rho, const TimeKernel& kernel,
                                         const SolverWorkspace& ws);

// pointwise phase flow over [t0, t1]; |phi| is preserved exactly
void nonlinear_step(ComplexField& phi, const PhysicsParams& p, const SolverWorkspace& ws,
                    double t0, double t1);

// one Strang step t_n -> t_n + dt (kinetic half, phase, kinetic half)
void ts2_step(ComplexField& phi, const PhysicsParams& p, const SolverWorkspace& ws,
              double t_n, double dt);

struct DynamicsRun {
    double dt = 1e-3;
    double t_final = 1.0;
    int diagnostics_every = 10; // steps between records; 0 records ends only
    int snapshot_every = 0;     // 0 disables periodic snapshots

    void validate() const;
};

struct DynamicsResult {
    ComplexField phi; // rotating frame
    double t = 0.0;
    std::vector<DiagnosticsRecord> series;
};

using DiagnosticsCallback = std::function<void(const DiagnosticsRecord&)>;
using SnapshotCallback = std::function<void(const ComplexField&, double)>;

// rotating-frame observables of phi at time t mapped to the lab frame
DiagnosticsRecord diagnostics(const ComplexField& phi, const PhysicsParams& p,
                              const SolverWorkspace& ws, double t);

// TS2 loop from the lab-frame initial state (frames coincide at t = 0);
// adjacent kinetic half steps are fused between diagnostic boundaries
DynamicsResult run_dynamics(const ComplexField& psi0, const PhysicsParams& p,
                            const DynamicsRun& run, const SolverWorkspace& ws,
                            const DiagnosticsCallback& on_diagnostics = {},
                            const SnapshotCallback& on_snapshot = {});

} // namespace fgpe
