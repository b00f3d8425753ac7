#include "fgpe/solvers.hpp"

#include <cmath>

namespace fgpe {

namespace {

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::conj(a[i]) * b[i];
    return s;
}

double norm2(const std::vector<cplx>& a) {
    double s = 0.0;
    for (const cplx& v : a)
        s += std::norm(v);
    return std::sqrt(s);
}

} // namespace

SolveStats bicgstab(const LinearOp& apply, const std::vector<cplx>& rhs,
                    std::vector<cplx>& x, const LinearOp& precondition,
                    const SolveOptions& opts) {
    const std::size_t n = rhs.size();
    SolveStats stats;

    std::vector<cplx> r(n), rhat(n), p(n, 0.0), v(n, 0.0), s(n), t(n);
    std::vector<cplx> phat(n), shat(n);

    const double bnorm = norm2(rhs);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), cplx(0.0));
        stats.converged = true;
        return stats;
    }
    const double target = opts.rel_tol * bnorm;

    apply(x, r);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = rhs[i] - r[i];
    rhat = r;

    double rnorm = norm2(r);
    stats.residual = rnorm / bnorm;
    if (rnorm <= target) {
        stats.converged = true;
        return stats;
    }

    cplx rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        stats.iterations = it + 1;
        const cplx rho_next = dot(rhat, r);
        if (std::abs(rho_next) < 1e-290 * bnorm * bnorm)
            break; // Lanczos breakdown
        if (it == 0) {
            p = r;
        } else {
            const cplx beta = (rho_next / rho) * (alpha / omega);
            for (std::size_t i = 0; i < n; ++i)
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_next;

        if (precondition)
            precondition(p, phat);
        else
            phat = p;
        apply(phat, v);

        const cplx denom = dot(rhat, v);
        if (std::abs(denom) < 1e-290 * bnorm)
            break;
        alpha = rho / denom;

        for (std::size_t i = 0; i < n; ++i)
            s[i] = r[i] - alpha * v[i];
        if (norm2(s) <= target) {
            for (std::size_t i = 0; i < n; ++i)
                x[i] += alpha * phat[i];
            stats.converged = true;
            stats.residual = norm2(s) / bnorm;
            return stats;
        }

        if (precondition)
            precondition(s, shat);
        else
            shat = s;
        apply(shat, t);

        const double tt = std::real(dot(t, t));
        if (tt <= 0.0)
            break;
        omega = dot(t, s) / tt;

        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        rnorm = norm2(r);
        stats.residual = rnorm / bnorm;
        if (rnorm <= target) {
            stats.converged = true;
            return stats;
        }
        if (std::abs(omega) < 1e-290)
            break;
    }
    return stats;
}

} // namespace fgpe
