#include "fgpe/physics.hpp"

#include "fgpe/errors.hpp"

namespace fgpe {

void PhysicsParams::validate(int dim) const {
    if (s <= 0.0)
        throw ConfigError("physics.s must be positive");
    if (m < 0.0)
        throw ConfigError("physics.m must be non-negative");
    for (int a = 0; a < dim; ++a)
        if (!has_sampled_potential() && gamma[a] < 0.0)
            throw ConfigError("physics.gamma entries must be non-negative");
    kernel.validate(dim);
    if (kernel_delta <= 0.0 || kernel_delta >= 1.0)
        throw ConfigError("kernel.delta must lie in (0, 1)");
    if (kernel_eps <= 0.0)
        throw ConfigError("kernel.eps must be positive");
}

double harmonic_potential_value(const PhysicsParams& p, double x, double y, double z) {
    return 0.5 * (p.gamma[0] * p.gamma[0] * x * x + p.gamma[1] * p.gamma[1] * y * y +
                  p.gamma[2] * p.gamma[2] * z * z);
}

RealField trap_potential(const GridPtr& grid, const PhysicsParams& p) {
    if (p.has_sampled_potential()) {
        if (!grid->same_layout(*p.sampled_potential.grid))
            throw ConfigError("sampled potential grid does not match the run grid");
        return p.sampled_potential;
    }
    RealField v(grid);
    const auto& n = grid->shape();
    if (grid->dim() == 2) {
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j)
                v.values[static_cast<std::size_t>(i) * n[1] + j] =
                    harmonic_potential_value(p, grid->coord(0, i), grid->coord(1, j), 0.0);
    } else {
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j)
                for (int k = 0; k < n[2]; ++k)
                    v.values[(static_cast<std::size_t>(i) * n[1] + j) * n[2] + k] =
                        harmonic_potential_value(p, grid->coord(0, i), grid->coord(1, j),
                                                 grid->coord(2, k));
    }
    return v;
}

SolverWorkspace make_workspace(const GridPtr& grid, const PhysicsParams& p) {
    p.validate(grid->dim());
    SolverWorkspace ws;
    ws.grid = grid;
    ws.trap = trap_potential(grid, p);
    if (p.lambda != 0.0) {
        ws.fit = fit_gaussian_sum(p.kernel, grid->dim(), p.kernel_delta, p.kernel_eps);
        ws.tables = build_convolution_tables(*grid, ws.fit);
        ws.has_nonlocal = true;
    }
    const FractionalSymbol sym = p.symbol();
    ws.kinetic_symbol.resize(grid->size());
    const auto& n = grid->shape();
    std::size_t idx = 0;
    if (grid->dim() == 2) {
        for (int i = 0; i < n[0]; ++i) {
            const double kx2 = grid->frequency(0, i) * grid->frequency(0, i);
            for (int j = 0; j < n[1]; ++j) {
                const double ky = grid->frequency(1, j);
                ws.kinetic_symbol[idx++] = sym.value(kx2 + ky * ky);
            }
        }
    } else {
        for (int i = 0; i < n[0]; ++i) {
            const double kx2 = grid->frequency(0, i) * grid->frequency(0, i);
            for (int j = 0; j < n[1]; ++j) {
                const double ky = grid->frequency(1, j);
                const double kxy2 = kx2 + ky * ky;
                for (int k = 0; k < n[2]; ++k) {
                    const double kz = grid->frequency(2, k);
                    ws.kinetic_symbol[idx++] = sym.value(kxy2 + kz * kz);
                }
            }
        }
    }
    return ws;
}

RealField interaction_potential(const ComplexField& phi, const PhysicsParams& p,
                                const SolverWorkspace& ws) {
    if (!phi.grid->same_layout(*ws.grid))
        throw ConfigError("field grid does not match the workspace grid");
    if (!ws.has_nonlocal)
        return RealField(phi.grid);
    RealField rho(phi.grid);
    for (std::size_t i = 0; i < rho.values.size(); ++i)
        rho.values[i] = std::norm(phi.values[i]);
    return evaluate_nonlocal_potential(rho, p.kernel, ws.fit, ws.tables);
}

} // namespace fgpe
