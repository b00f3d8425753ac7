#include "doctest.h"

#include "fgpe/groundstate.hpp"
#include "fgpe/solvers.hpp"

#include <cmath>
#include <random>

using namespace fgpe;

namespace {

// dense Hermitian diagonally dominant test matrix
struct DenseOp {
    std::vector<cplx> a;
    std::size_t n;

    explicit DenseOp(std::size_t size, unsigned seed) : a(size * size), n(size) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const cplx v(u(rng), u(rng));
                a[i * n + j] = v;
                a[j * n + i] = std::conj(v);
            }
            a[i * n + i] = static_cast<double>(n); // dominance
        }
    }

    void operator()(const std::vector<cplx>& x, std::vector<cplx>& y) const {
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
            y[i] = s;
        }
    }
};

double residual_norm(const LinearOp& apply, const std::vector<cplx>& b,
                     const std::vector<cplx>& x) {
    std::vector<cplx> r(b.size());
    apply(x, r);
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        rn += std::norm(b[i] - r[i]);
        bn += std::norm(b[i]);
    }
    return std::sqrt(rn / bn);
}

} // namespace

TEST_SUITE("solvers") {

TEST_CASE("identity system converges immediately") {
    std::vector<cplx> b{cplx(1, 2), cplx(-3, 0.5), cplx(0, -1)};
    std::vector<cplx> x(3, 0.0);
    auto stats = bicgstab([](const std::vector<cplx>& in, std::vector<cplx>& out) { out = in; },
                          b, x);
    CHECK(stats.converged);
    CHECK(stats.iterations <= 2);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(x[i] - b[i]) <= 1e-12);
}

TEST_CASE("diagonal complex system is solved exactly") {
    const std::vector<cplx> d{cplx(2, 1), cplx(5, -2), cplx(3, 0), cplx(1, 4)};
    std::vector<cplx> b{cplx(1, 0), cplx(0, 1), cplx(-2, 3), cplx(4, -1)};
    std::vector<cplx> x(4, 0.0);
    auto apply = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = d[i] * in[i];
    };
    auto stats = bicgstab(apply, b, x);
    CHECK(stats.converged);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(x[i] - b[i] / d[i]) <= 1e-11);
}

TEST_CASE("dense Hermitian system meets the residual target") {
    DenseOp op(60, 2024);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> b(60);
    for (auto& v : b) v = cplx(u(rng), u(rng));
    std::vector<cplx> x(60, 0.0);

    auto apply = [&](const std::vector<cplx>& in, std::vector<cplx>& out) { op(in, out); };
    auto stats = bicgstab(apply, b, x);
    CHECK(stats.converged);
    CHECK(residual_norm(apply, b, x) <= 1e-10);
    CHECK(stats.residual <= 1e-11);
}

TEST_CASE("zero right-hand side returns zero") {
    std::vector<cplx> b(8, 0.0), x(8, cplx(3, -1));
    auto stats = bicgstab([](const std::vector<cplx>& in, std::vector<cplx>& out) { out = in; },
                          b, x);
    CHECK(stats.converged);
    CHECK(stats.iterations == 0);
    for (const cplx& v : x) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("warm start skips the iteration") {
    DenseOp op(40, 99);
    std::vector<cplx> b(40, cplx(1, 1)), x(40, 0.0);
    auto apply = [&](const std::vector<cplx>& in, std::vector<cplx>& out) { op(in, out); };
    auto first = bicgstab(apply, b, x);
    REQUIRE(first.converged);
    std::vector<cplx> x2 = x;
    auto second = bicgstab(apply, b, x2);
    CHECK(second.converged);
    CHECK(second.iterations <= 1);
}

TEST_CASE("iteration cap reports failure") {
    DenseOp op(60, 5);
    for (std::size_t i = 0; i < 60; ++i) op.a[i * 60 + i] = cplx(0.9, 0.0); // weakly dominant
    std::vector<cplx> b(60, cplx(1, 0)), x(60, 0.0);
    SolveOptions opts;
    opts.max_iterations = 2;
    opts.rel_tol = 1e-14;
    auto stats = bicgstab([&](const std::vector<cplx>& in, std::vector<cplx>& out) { op(in, out); },
                          b, x, {}, opts);
    CHECK_FALSE(stats.converged);
    CHECK(stats.iterations == 2);
}

TEST_CASE("kinetic preconditioner halves the backward-Euler iteration count") {
    auto g = std::make_shared<Grid>(Grid::square(2, 8.0, 64));
    PhysicsParams p;
    p.s = 1.2;
    p.beta = 100.0;
    p.omega = 0.5;
    SolverWorkspace ws = make_workspace(g, p);
    ComplexField phi = initial_guess(g, p.omega);
    RealField pot = interaction_potential(phi, p, ws);
    BeOperator op = make_be_operator(phi, pot, p, ws, 0.1);

    std::vector<cplx> rhs(phi.values.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = phi.values[i] * 10.0;

    auto apply = [&op](const std::vector<cplx>& in, std::vector<cplx>& out) { op.apply(in, out); };
    std::vector<cplx> x0(rhs.size(), 0.0), x1 = x0, x2 = x0;

    auto plain = bicgstab(apply, rhs, x0);
    Preconditioner kin = make_preconditioner(PreconditionerKind::kinetic, op);
    auto with_kin = bicgstab(apply, rhs, x1,
                             [&kin](const std::vector<cplx>& in, std::vector<cplx>& out) {
                                 kin.apply(in, out);
                             });
    Preconditioner pot_pc = make_preconditioner(PreconditionerKind::potential, op);
    auto with_pot = bicgstab(apply, rhs, x2,
                             [&pot_pc](const std::vector<cplx>& in, std::vector<cplx>& out) {
                                 pot_pc.apply(in, out);
                             });

    CHECK(plain.converged);
    CHECK(with_kin.converged);
    CHECK(with_pot.converged);
    CHECK(2 * with_kin.iterations <= plain.iterations);
    CHECK(with_pot.iterations <= plain.iterations + 10);

    // all three agree on the solution
    double mx = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i)
        mx = std::max({mx, std::abs(x0[i] - x1[i]), std::abs(x0[i] - x2[i])});
    CHECK(mx <= 1e-8);
}

} // TEST_SUITE
