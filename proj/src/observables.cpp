#include "fgpe/observables.hpp"

#include "fgpe/errors.hpp"
#include "fgpe/spectral.hpp"

#include <cmath>

namespace fgpe {

namespace {

// visits every point with its coordinates; f(index, x, y, z)
template <typename F>
void for_each_point(const Grid& g, F&& f) {
    const auto& n = g.shape();
    std::size_t idx = 0;
    if (g.dim() == 2) {
        for (int i = 0; i < n[0]; ++i) {
            const double x = g.coord(0, i);
            for (int j = 0; j < n[1]; ++j)
                f(idx++, x, g.coord(1, j), 0.0);
        }
    } else {
        for (int i = 0; i < n[0]; ++i) {
            const double x = g.coord(0, i);
            for (int j = 0; j < n[1]; ++j) {
                const double y = g.coord(1, j);
                for (int k = 0; k < n[2]; ++k)
                    f(idx++, x, y, g.coord(2, k));
            }
        }
    }
}

} // namespace

double mass(const ComplexField& psi) {
    double s = 0.0;
    for (const cplx& v : psi.values)
        s += std::norm(v);
    return s * psi.grid->cell_volume();
}

EnergyBreakdown energy(const ComplexField& psi, const PhysicsParams& p,
                       const RealField& trap, const RealField& phi) {
    const Grid& g = *psi.grid;
    const double hvol = g.cell_volume();
    EnergyBreakdown e;

    const FractionalSymbol sym = p.symbol();
    auto coeffs = spectral_coefficients(psi);
    const auto& n = g.shape();
    double kin = 0.0;
    std::size_t idx = 0;
    if (g.dim() == 2) {
        for (int i = 0; i < n[0]; ++i) {
            const double kx2 = g.frequency(0, i) * g.frequency(0, i);
            for (int j = 0; j < n[1]; ++j) {
                const double ky = g.frequency(1, j);
                kin += sym.value(kx2 + ky * ky) * std::norm(coeffs[idx++]);
            }
        }
    } else {
        for (int i = 0; i < n[0]; ++i) {
            const double kx2 = g.frequency(0, i) * g.frequency(0, i);
            for (int j = 0; j < n[1]; ++j) {
                const double kxy2 = kx2 + g.frequency(1, j) * g.frequency(1, j);
                for (int k = 0; k < n[2]; ++k) {
                    const double kz = g.frequency(2, k);
                    kin += sym.value(kxy2 + kz * kz) * std::norm(coeffs[idx++]);
                }
            }
        }
    }
    e.kinetic = 0.5 * kin * hvol / static_cast<double>(g.size());

    double pot = 0.0, loc = 0.0, non = 0.0;
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double rho = std::norm(psi.values[i]);
        pot += trap.values[i] * rho;
        loc += rho * rho;
        if (!phi.values.empty())
            non += phi.values[i] * rho;
    }
    e.potential = pot * hvol;
    e.local = 0.5 * p.beta * loc * hvol;
    e.nonlocal = 0.5 * p.lambda * non * hvol;
    if (p.omega != 0.0)
        e.rotation = -p.omega * angular_momentum(psi);
    e.total = e.kinetic + e.potential + e.rotation + e.local + e.nonlocal;
    return e;
}

double angular_momentum(const ComplexField& psi) {
    ComplexField lz = apply_angular_momentum(psi);
    return std::real(inner_product(psi, lz));
}

std::array<double, 3> center_of_mass(const ComplexField& psi) {
    std::array<double, 3> c{};
    for_each_point(*psi.grid, [&](std::size_t idx, double x, double y, double z) {
        const double rho = std::norm(psi.values[idx]);
        c[0] += x * rho;
        c[1] += y * rho;
        c[2] += z * rho;
    });
    const double hvol = psi.grid->cell_volume();
    for (double& v : c)
        v *= hvol;
    return c;
}

std::array<double, 3> condensate_widths(const ComplexField& psi) {
    std::array<double, 3> w{};
    for_each_point(*psi.grid, [&](std::size_t idx, double x, double y, double z) {
        const double rho = std::norm(psi.values[idx]);
        w[0] += x * x * rho;
        w[1] += y * y * rho;
        w[2] += z * z * rho;
    });
    const double hvol = psi.grid->cell_volume();
    for (double& v : w)
        v *= hvol;
    return w;
}

std::array<std::array<double, 3>, 3> second_moment_matrix(const ComplexField& psi) {
    std::array<std::array<double, 3>, 3> m{};
    for_each_point(*psi.grid, [&](std::size_t idx, double x, double y, double z) {
        const double rho = std::norm(psi.values[idx]);
        const double v[3] = {x, y, z};
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b)
                m[a][b] += v[a] * v[b] * rho;
    });
    const double hvol = psi.grid->cell_volume();
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            m[a][b] *= hvol;
            m[b][a] = m[a][b];
        }
    return m;
}

std::array<double, 3> generalized_momentum(const ComplexField& psi, double s, double m) {
    const Grid& g = *psi.grid;
    auto coeffs = spectral_coefficients(psi);
    const auto& n = g.shape();
    const double m2 = m * m;
    std::array<double, 3> out{};
    std::size_t idx = 0;
    auto accumulate = [&](double base, double kx, double ky, double kz, double w) {
        if (base == 0.0)
            return; // k = 0, m = 0: the odd factor k vanishes on the grid
        const double f = std::pow(base, s - 1.0) * w;
        out[0] += f * kx;
        out[1] += f * ky;
        out[2] += f * kz;
    };
    if (g.dim() == 2) {
        for (int i = 0; i < n[0]; ++i) {
            const double kx = g.frequency_odd(0, i);
            const double kx2 = g.frequency(0, i) * g.frequency(0, i);
            for (int j = 0; j < n[1]; ++j) {
                const double ky = g.frequency(1, j);
                accumulate(kx2 + ky * ky + m2, kx, g.frequency_odd(1, j), 0.0,
                           std::norm(coeffs[idx++]));
            }
        }
    } else {
        for (int i = 0; i < n[0]; ++i) {
            const double kx = g.frequency_odd(0, i);
            const double kx2 = g.frequency(0, i) * g.frequency(0, i);
            for (int j = 0; j < n[1]; ++j) {
                const double ky = g.frequency(1, j);
                const double kxy2 = kx2 + ky * ky;
                for (int k = 0; k < n[2]; ++k) {
                    const double kz = g.frequency(2, k);
                    accumulate(kxy2 + kz * kz + m2, kx, g.frequency_odd(1, j),
                               g.frequency_odd(2, k), std::norm(coeffs[idx++]));
                }
            }
        }
    }
    const double scale = s * g.cell_volume() / static_cast<double>(g.size());
    for (double& v : out)
        v *= scale;
    return out;
}

double ame_production(const ComplexField& psi, const PhysicsParams& p,
                      const RealField& phi, double t) {
    const Grid& g = *psi.grid;
    if (p.has_sampled_potential() && p.omega != 0.0 && t != 0.0)
        throw ConfigError("angular-momentum production with a sampled trap requires omega = 0");

    // spectral part: (y d_x - x d_y) of the decaying potentials
    RealField w(psi.grid);
    bool any_spectral = false;
    if (!phi.values.empty() && p.lambda != 0.0) {
        for (std::size_t i = 0; i < w.values.size(); ++i)
            w.values[i] = p.lambda * phi.values[i];
        any_spectral = true;
    }
    if (p.has_sampled_potential()) {
        for (std::size_t i = 0; i < w.values.size(); ++i)
            w.values[i] += p.sampled_potential.values[i];
        any_spectral = true;
    }

    ComplexField dx, dy;
    if (any_spectral) {
        ComplexField wc(psi.grid);
        for (std::size_t i = 0; i < w.values.size(); ++i)
            wc.values[i] = w.values[i];
        dx = spectral_derivative(wc, 0);
        dy = spectral_derivative(wc, 1);
    }

    const bool harmonic = !p.has_sampled_potential();
    const double dg2 = p.gamma[0] * p.gamma[0] - p.gamma[1] * p.gamma[1];
    const double c = std::cos(p.omega * t), s = std::sin(p.omega * t);

    double sum = 0.0;
    for_each_point(g, [&](std::size_t idx, double x, double y, double) {
        const double rho = std::norm(psi.values[idx]);
        double integrand = 0.0;
        if (any_spectral)
            integrand += y * std::real(dx.values[idx]) - x * std::real(dy.values[idx]);
        if (harmonic && dg2 != 0.0) {
            // (y d_x - x d_y)V at the lab point A(t) x
            const double xl = c * x + s * y;
            const double yl = -s * x + c * y;
            integrand += dg2 * xl * yl;
        }
        sum += rho * integrand;
    });
    return sum * g.cell_volume();
}

ComLawResiduals com_law_residuals(const std::vector<DiagnosticsRecord>& series,
                                  const PhysicsParams& p) {
    if (series.size() < 3)
        throw ConfigError("center-of-mass law check needs at least 3 trajectory samples");
    const std::size_t n = series.size();
    const double dt = series[1].t - series[0].t;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (std::abs((series[i + 1].t - series[i].t) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw ConfigError("center-of-mass law check needs uniform sampling");

    ComLawResiduals res;
    res.t.assign(n, 0.0);
    res.first.assign(n, 0.0);
    res.second.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        res.t[i] = series[i].t;

    auto J = [&](const std::array<double, 3>& v) {
        return std::array<double, 3>{v[1], -v[0], 0.0};
    };

    for (std::size_t i = 1; i + 1 < n; ++i) {
        std::array<double, 3> xdot{}, xddot{};
        for (int a = 0; a < 3; ++a) {
            xdot[a] = (series[i + 1].center[a] - series[i - 1].center[a]) / (2.0 * dt);
            xddot[a] = (series[i + 1].center[a] - 2.0 * series[i].center[a] +
                        series[i - 1].center[a]) /
                       (dt * dt);
        }
        const auto& x = series[i].center;
        const auto jx = J(x);
        const auto jxdot = J(xdot);
        const auto jjx = J(jx);
        double r1 = 0.0, r2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double e1 = xdot[a] - p.omega * jx[a] - series[i].momentum[a];
            const double lam = p.gamma[a] * p.gamma[a];
            const double e2 = xddot[a] - 2.0 * p.omega * jxdot[a] +
                              p.omega * p.omega * jjx[a] + lam * x[a];
            r1 += e1 * e1;
            r2 += e2 * e2;
        }
        res.first[i] = std::sqrt(r1);
        res.second[i] = std::sqrt(r2);
    }
    return res;
}

} // namespace fgpe
