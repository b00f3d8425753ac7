#include "fgpe/kernels.hpp"

#include "fgpe/errors.hpp"

#include <cmath>
#include <numbers>

namespace fgpe {

namespace {

constexpr double pi = std::numbers::pi;

double axis_norm(const std::array<double, 3>& n) {
    return std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
}

} // namespace

KernelSpec KernelSpec::coulomb(double mu) {
    KernelSpec s;
    s.variant = KernelVariant::coulomb;
    s.exponent = mu;
    return s;
}

KernelSpec KernelSpec::dipole3d(std::array<double, 3> n) {
    KernelSpec s;
    s.variant = KernelVariant::dipole3d;
    s.axis = n;
    return s;
}

KernelSpec KernelSpec::dipole2d(std::array<double, 3> n) {
    KernelSpec s;
    s.variant = KernelVariant::dipole2d;
    s.axis = n;
    return s;
}

void KernelSpec::validate(int dim) const {
    switch (variant) {
        case KernelVariant::coulomb:
            if (!(exponent > 0.0) || exponent > dim - 1)
                throw ConfigError("kernel: Coulomb exponent must satisfy 0 < mu <= d-1");
            break;
        case KernelVariant::dipole3d:
            if (dim != 3) throw ConfigError("kernel: dipole3d requires a 3D grid");
            if (std::abs(axis_norm(axis) - 1.0) > 1e-10)
                throw ConfigError("kernel: dipole axis must be a unit vector");
            break;
        case KernelVariant::dipole2d:
            if (dim != 2) throw ConfigError("kernel: dipole2d requires a 2D grid");
            if (std::abs(axis_norm(axis) - 1.0) > 1e-10)
                throw ConfigError("kernel: dipole axis must be a unit vector");
            break;
    }
}

double kernel_fourier_symbol(const KernelSpec& spec, std::span<const double> k, int dim) {
    double k2 = 0.0;
    for (int a = 0; a < dim; ++a) k2 += k[a] * k[a];
    switch (spec.variant) {
        case KernelVariant::coulomb: {
            if (k2 == 0.0)
                throw std::domain_error("kernel symbol: Coulomb is singular at k = 0");
            const double mu = spec.exponent;
            const double c = std::pow(pi, 0.5 * dim - 1.0) * std::pow(2.0, 1.0 - mu) *
                             std::tgamma(0.5 * (dim - mu)) / std::tgamma(0.5 * mu);
            return c * std::pow(k2, -0.5 * (dim - mu));
        }
        case KernelVariant::dipole3d: {
            if (k2 == 0.0) return 0.0; // angular mean of -1 + 3 cos^2
            const double nk = spec.axis[0] * k[0] + spec.axis[1] * k[1] + spec.axis[2] * k[2];
            return -1.0 + 3.0 * nk * nk / k2;
        }
        case KernelVariant::dipole2d: {
            if (k2 == 0.0)
                throw std::domain_error("kernel symbol: 2D dipolar is singular at k = 0");
            const double np_k = spec.axis[0] * k[0] + spec.axis[1] * k[1];
            const double n3 = spec.axis[2];
            return 3.0 * (np_k * np_k - n3 * n3 * k2) / (2.0 * std::sqrt(k2));
        }
    }
    return 0.0;
}

double GaussianSumFit::reference(double r) const {
    if (exponent == 0.0) return coeff;
    return coeff * std::pow(r, -exponent);
}

double GaussianSumFit::evaluate(double r) const {
    // Kahan sum: hundreds of positive terms totalling ~1e2 near r = window_min;
    // plain summation roundoff alone would exceed the 1e-12 budget there
    const double r2 = r * r;
    double s = 0.0, c = 0.0;
    for (std::size_t q = 0; q < weights.size(); ++q) {
        const double t = weights[q] * std::exp(-taus[q] * taus[q] * r2);
        const double y = t - c;
        const double u = s + y;
        c = (u - s) - y;
        s = u;
    }
    return s;
}

namespace {

double sup_error(const GaussianSumFit& f, double rmax) {
    // dense sampling, geometric near the singular end plus uniform coverage
    const int ng = 3001, nl = 2001;
    double sup = 0.0;
    const double lr0 = std::log(f.window_min), lr1 = std::log(rmax);
    for (int i = 0; i < ng; ++i) {
        const double r = std::exp(lr0 + (lr1 - lr0) * i / (ng - 1));
        sup = std::max(sup, std::abs(f.reference(r) - f.evaluate(r)));
    }
    for (int i = 0; i < nl; ++i) {
        const double r = f.window_min + (rmax - f.window_min) * i / (nl - 1);
        sup = std::max(sup, std::abs(f.reference(r) - f.evaluate(r)));
    }
    return sup;
}

GaussianSumFit build_trapezoid(double mu, double coeff, double delta, double eps0, double h) {
    const double pref = 2.0 / std::tgamma(0.5 * mu);
    const double eps_t = eps0 / 4.0;

    const double u_lo = std::log(eps_t * mu / (pref * coeff)) / mu;
    // upper truncation: coeff*pref*0.5*delta^-mu * Gamma(mu/2, x^2) <= eps_t,
    // with Gamma(a, z) <= 2 z^{a-1} e^{-z} once z >= 2a + 2
    double x = std::sqrt(mu + 2.0);
    auto tail = [&](double xx) {
        const double z = xx * xx;
        return coeff * pref * std::pow(delta, -mu) * std::pow(z, 0.5 * mu - 1.0) *
               std::exp(-z);
    };
    while (x * x < mu + 2.0 || tail(x) > eps_t) x *= 1.05;
    const double u_hi = std::log(x / delta);

    const int n = static_cast<int>(std::ceil((u_hi - u_lo) / h)) + 1;
    std::vector<double> w(n), tau(n);
    for (int q = 0; q < n; ++q) {
        const double u = u_lo + q * h;
        tau[q] = std::exp(u);
        w[q] = coeff * pref * h * std::exp(mu * u);
    }
    // trim terms whose total possible contribution on [delta, rmax] is negligible
    auto bound = [&](int q) { return w[q] * std::exp(-tau[q] * tau[q] * delta * delta); };
    int lo = 0, hi = n;
    double acc = 0.0;
    while (lo < hi - 1 && acc + bound(lo) < eps0 / 5.0) acc += bound(lo++);
    acc = 0.0;
    while (hi > lo + 1 && acc + bound(hi - 1) < eps0 / 5.0) acc += bound(--hi);

    GaussianSumFit fit;
    fit.weights.assign(w.begin() + lo, w.begin() + hi);
    fit.taus.assign(tau.begin() + lo, tau.begin() + hi);
    fit.window_min = delta;
    fit.target_error = eps0;
    fit.exponent = mu;
    fit.coeff = coeff;
    return fit;
}

} // namespace

GaussianSumFit fit_gaussian_sum_radial(double mu, double coeff, double delta,
                                       double eps0, int max_terms) {
    if (mu == 0.0) {
        // constant profile: a single almost-flat Gaussian is exact to eps
        GaussianSumFit fit;
        fit.weights = {coeff};
        fit.taus = {1e-9};
        fit.window_min = delta;
        fit.target_error = eps0;
        fit.exponent = 0.0;
        fit.coeff = coeff;
        fit.achieved_error = 0.0;
        return fit;
    }
    if (!(mu > 0.0) || !(delta > 0.0) || !(delta < 2.0) || !(eps0 > 0.0))
        throw ConfigError("gaussian-sum fit: need mu >= 0, 0 < delta < 2, eps0 > 0");

    double h = 0.35;
    GaussianSumFit fit;
    while (true) {
        fit = build_trapezoid(mu, coeff, delta, eps0, h);
        fit.achieved_error = sup_error(fit, 2.0);
        if (fit.achieved_error <= 0.8 * eps0) return fit;
        if (static_cast<int>(fit.weights.size()) >= max_terms)
            throw NumericalError("gaussian-sum fit: term ceiling reached at error " +
                                 std::to_string(fit.achieved_error));
        h *= 0.93;
    }
}

GaussianSumFit fit_gaussian_sum(const KernelSpec& spec, int dim, double delta,
                                double eps0, int max_terms) {
    spec.validate(dim);
    switch (spec.variant) {
        case KernelVariant::coulomb:
            return fit_gaussian_sum_radial(spec.exponent,
                                           1.0 / (std::pow(2.0, dim - 1) * pi), delta,
                                           eps0, max_terms);
        case KernelVariant::dipole3d:
            // reduced to a mu=1 Coulomb convolution of a modified density
            return fit_gaussian_sum_radial(1.0, 1.0 / (4.0 * pi), delta, eps0, max_terms);
        case KernelVariant::dipole2d:
            return fit_gaussian_sum_radial(1.0, 1.0 / (2.0 * pi), delta, eps0, max_terms);
    }
    throw ConfigError("gaussian-sum fit: unknown kernel variant");
}

} // namespace fgpe
