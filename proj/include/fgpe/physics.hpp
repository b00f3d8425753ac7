#pragma once

#include "fgpe/grid.hpp"
#include "fgpe/kernels.hpp"
#include "fgpe/nonlocal.hpp"
#include "fgpe/spectral.hpp"

namespace fgpe {

// Model parameters of i dt psi = [1/2 (-lap + m^2)^s + V + beta|psi|^2
//                                 + lambda Phi - Omega Lz] psi.
// The trap is harmonic by default; a sampled potential takes precedence
// when present (its grid must match the run grid).
struct PhysicsParams {
    double s = 1.0;
    double m = 0.0;
    double beta = 0.0;
    double lambda = 0.0;
    double omega = 0.0;
    std::array<double, 3> gamma{1.0, 1.0, 1.0};
    RealField sampled_potential;
    KernelSpec kernel = KernelSpec::coulomb(1.0);
    double kernel_delta = 1e-3;
    double kernel_eps = 1e-12;

    bool has_sampled_potential() const { return sampled_potential.grid != nullptr; }
    FractionalSymbol symbol() const { return FractionalSymbol{s, m}; }

    void validate(int dim) const;
};

double harmonic_potential_value(const PhysicsParams& p, double x, double y, double z);

// V sampled on the grid (harmonic closed form or the stored field)
RealField trap_potential(const GridPtr& grid, const PhysicsParams& p);

// Everything reusable across solver steps on one grid: the sampled trap, the
// Gaussian-sum fit and its spectral tables (skipped when lambda == 0), and the
// kinetic symbol values per mode.
struct SolverWorkspace {
    GridPtr grid;
    RealField trap;
    GaussianSumFit fit;
    ConvolutionTables tables;
    std::vector<double> kinetic_symbol;
    bool has_nonlocal = false;
};

SolverWorkspace make_workspace(const GridPtr& grid, const PhysicsParams& p);

// Phi = U * |phi|^2, or an all-zero field when lambda == 0
RealField interaction_potential(const ComplexField& phi, const PhysicsParams& p,
                                const SolverWorkspace& ws);

} // namespace fgpe
