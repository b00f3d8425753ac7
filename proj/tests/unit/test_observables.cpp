#include "doctest.h"

#include "fgpe/dynamics.hpp"
#include "fgpe/groundstate.hpp"
#include "fgpe/observables.hpp"
#include "fgpe/quadrature.hpp"

#include <cmath>

using namespace fgpe;

namespace {

GridPtr square(double half_width, int n) {
    return std::make_shared<Grid>(Grid::square(2, half_width, n));
}

// pi^{-1/2} e^{-|x-x0|^2/2} e^{i k0.x}
ComplexField boosted_gaussian(const GridPtr& g, double x0, double y0, double k0x, double k0y) {
    ComplexField f(g);
    std::size_t idx = 0;
    for (int i = 0; i < g->points(0); ++i)
        for (int j = 0; j < g->points(1); ++j, ++idx) {
            const double x = g->coord(0, i), y = g->coord(1, j);
            const double dx = x - x0, dy = y - y0;
            const double env = std::pow(kPi, -0.5) * std::exp(-0.5 * (dx * dx + dy * dy));
            const double ph = k0x * x + k0y * y;
            f.values[idx] = env * cplx(std::cos(ph), std::sin(ph));
        }
    return f;
}

} // namespace

TEST_SUITE("observables") {

TEST_CASE("mass is the squared norm") {
    auto g = square(8.0, 64);
    ComplexField psi = boosted_gaussian(g, 0, 0, 0, 0);
    CHECK(mass(psi) == doctest::Approx(1.0).epsilon(1e-13));
    for (auto& v : psi.values) v *= 2.0;
    CHECK(mass(psi) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("harmonic Gaussian has unit energy split evenly") {
    auto g = square(16.0, 256);
    PhysicsParams p;
    p.omega = 0.3; // radial state: the rotation term must vanish
    SolverWorkspace ws = make_workspace(g, p);
    ComplexField psi = harmonic_gaussian(g);
    EnergyBreakdown e = energy(psi, p, ws.trap, RealField());
    CHECK(std::abs(e.kinetic - 0.5) <= 1e-12);
    CHECK(std::abs(e.potential - 0.5) <= 1e-12);
    CHECK(std::abs(e.rotation) <= 1e-12);
    CHECK(e.local == 0.0);
    CHECK(e.nonlocal == 0.0);
    CHECK(std::abs(e.total - 1.0) <= 1e-12);
}

TEST_CASE("fractional kinetic energy approaches Gamma(s+1)/2") {
    // the |k|^{2s} cusp at k = 0 limits lattice accuracy for fractional s;
    // these bounds are the measured bias on this box
    auto g = square(8.0, 64);
    PhysicsParams p;
    SolverWorkspace ws = make_workspace(g, p);
    ComplexField psi = harmonic_gaussian(g);
    for (auto [s, tol] : {std::pair{0.5, 5e-3}, {1.0, 1e-12}, {1.5, 2e-4}, {2.0, 1e-12}}) {
        p.s = s;
        SolverWorkspace wss = make_workspace(g, p);
        EnergyBreakdown e = energy(psi, p, wss.trap, RealField());
        CHECK(std::abs(e.kinetic - std::tgamma(s + 1.0) / 2.0) <= tol);
    }
}

TEST_CASE("radial symbol quadrature reaches the exact kinetic values") {
    // E_kin = int_0^inf sigma(k^2)^s k e^{-k^2} dk = Gamma(s+1)/2; r = u^2
    // removes the fractional endpoint singularity
    for (double s : {0.5, 0.75, 1.0, 1.5, 2.0}) {
        FractionalSymbol sym{s, 0.0};
        const double val = integrate_gl(
            [&](double u) {
                const double r2 = u * u * u * u;
                return 2.0 * sym.value(r2) * u * u * u * std::exp(-r2);
            },
            0.0, 3.5, 32, 24);
        CHECK(std::abs(val - std::tgamma(s + 1.0) / 2.0) <= 1e-12);
    }
}

TEST_CASE("angular momentum of radial and vortex states") {
    auto g = square(8.0, 64);
    CHECK(std::abs(angular_momentum(harmonic_gaussian(g))) <= 1e-12);
    CHECK(angular_momentum(central_vortex(g)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("center of mass and widths of a shifted Gaussian") {
    auto g = square(8.0, 64);
    ComplexField psi = boosted_gaussian(g, 1.0, -0.5, 0, 0);
    auto c = center_of_mass(psi);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c[1] == doctest::Approx(-0.5).epsilon(1e-10));

    // raw second moments: 1/2 + x0^2 per axis
    auto w = condensate_widths(psi);
    CHECK(w[0] == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(w[1] == doctest::Approx(0.75).epsilon(1e-10));

    auto m = second_moment_matrix(psi);
    CHECK(m[0][0] == doctest::Approx(w[0]).epsilon(1e-13));
    CHECK(m[1][1] == doctest::Approx(w[1]).epsilon(1e-13));
    CHECK(m[0][1] == doctest::Approx(m[1][0]).epsilon(1e-13));
    CHECK(m[0][1] == doctest::Approx(1.0 * -0.5).epsilon(1e-9)); // <xy> = x0 y0
}

TEST_CASE("generalized momentum of a boosted Gaussian") {
    auto g = square(10.0, 160);
    const double k0x = 1.5, k0y = -0.75;
    ComplexField psi = boosted_gaussian(g, 0, 0, k0x, k0y);

    // s = 1 is the plain momentum k0
    auto g1 = generalized_momentum(psi, 1.0, 0.0);
    CHECK(std::abs(g1[0] - k0x) <= 1e-12);
    CHECK(std::abs(g1[1] - k0y) <= 1e-12);

    // s = 1 equals Re<psi, -i grad psi> = Im<psi, grad psi> in real space
    ComplexField dx = spectral_derivative(psi, 0), dy = spectral_derivative(psi, 1);
    CHECK(std::abs(g1[0] - inner_product(psi, dx).imag()) <= 1e-12);
    CHECK(std::abs(g1[1] - inner_product(psi, dy).imag()) <= 1e-12);

    // fractional s against the radial Bessel reduction
    // g = 4 s e^{-k0^2} khat int_0^inf u^{4s+1} I1(2 u^2 |k0|) e^{-u^4} du
    const double k0 = std::hypot(k0x, k0y);
    for (double s : {0.75, 1.2}) {
        auto gs = generalized_momentum(psi, s, 0.0);
        const double q = integrate_gl(
            [&](double u) {
                return std::pow(u, 4.0 * s + 1.0) * std::cyl_bessel_i(1.0, 2.0 * u * u * k0) *
                       std::exp(-u * u * u * u);
            },
            0.0, 3.5, 64, 24);
        const double mag = 4.0 * s * std::exp(-k0 * k0) * q;
        CHECK(std::abs(gs[0] - mag * k0x / k0) <= 1e-4);
        CHECK(std::abs(gs[1] - mag * k0y / k0) <= 1e-4);
    }

    // phase invariance and reality
    ComplexField rotated = psi;
    for (auto& v : rotated.values) v *= cplx(std::cos(0.9), std::sin(0.9));
    auto gr = generalized_momentum(rotated, 0.75, 0.0);
    auto gp = generalized_momentum(psi, 0.75, 0.0);
    CHECK(std::abs(gr[0] - gp[0]) <= 1e-13);
    CHECK(std::abs(gr[1] - gp[1]) <= 1e-13);

    auto gz = generalized_momentum(harmonic_gaussian(g), 0.75, 0.0);
    CHECK(std::abs(gz[0]) <= 1e-13);
    CHECK(std::abs(gz[1]) <= 1e-13);
}

TEST_CASE("angular momentum production") {
    auto g = square(8.0, 64);

    // radial state, isotropic trap: no torque
    PhysicsParams p;
    SolverWorkspace ws = make_workspace(g, p);
    CHECK(std::abs(ame_production(harmonic_gaussian(g), p, RealField(), 0.0)) <= 1e-12);

    // anisotropic harmonic trap: torque = (gamma_x^2 - gamma_y^2) int |psi|^2 xy
    p.gamma = {1.0, 1.2, 1.0};
    ComplexField psi = boosted_gaussian(g, 0.8, 0.6, 0, 0);
    double ref = 0.0;
    std::size_t idx = 0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j, ++idx) {
            const double x = g->coord(0, i), y = g->coord(1, j);
            ref += std::norm(psi.values[idx]) * x * y;
        }
    ref *= (1.0 - 1.44) * g->cell_volume();
    CHECK(ame_production(psi, p, RealField(), 0.0) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("center-of-mass law residuals on a short trajectory") {
    auto g = square(8.0, 64);
    PhysicsParams p;
    SolverWorkspace ws = make_workspace(g, p);

    DynamicsRun run;
    run.dt = 1e-3;
    run.t_final = 0.05;
    run.diagnostics_every = 10;
    auto res = run_dynamics(boosted_gaussian(g, 1.0, 0.0, 0, 0), p, run, ws);
    auto r = com_law_residuals(res.series, p);
    REQUIRE(r.t.size() == res.series.size());
    CHECK(r.first.front() == 0.0);
    CHECK(r.first.back() == 0.0);
    for (std::size_t i = 1; i + 1 < r.t.size(); ++i) {
        CHECK(r.first[i] <= 1e-3);  // centered-difference truncation
        CHECK(r.second[i] <= 1e-2);
    }

    // a stationary state has vanishing residuals
    auto stat = run_dynamics(harmonic_gaussian(g), p, run, ws);
    auto rs = com_law_residuals(stat.series, p);
    for (std::size_t i = 1; i + 1 < rs.t.size(); ++i) {
        CHECK(rs.first[i] <= 1e-9);
        CHECK(rs.second[i] <= 1e-9);
    }
}

} // TEST_SUITE
