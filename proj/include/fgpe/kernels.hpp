#pragma once

#include <array>
#include <span>
#include <vector>

namespace fgpe {

enum class KernelVariant { coulomb, dipole3d, dipole2d };

// Interaction kernel selector.  Coulomb means U(x) = 1/(2^{d-1} pi |x|^mu);
// the dipolar variants take a unit dipole axis n.
struct KernelSpec {
    KernelVariant variant = KernelVariant::coulomb;
    double exponent = 1.0;                    // mu, Coulomb only
    std::array<double, 3> axis{0.0, 0.0, 1.0}; // n, dipolar only

    static KernelSpec coulomb(double mu);
    static KernelSpec dipole3d(std::array<double, 3> n);
    static KernelSpec dipole2d(std::array<double, 3> n);

    // throws on invalid (d, mu) combinations or non-unit axis
    void validate(int dim) const;
};

// Fourier transform of the kernel at wave vector k (size = dim).
// Singular variants reject k = 0; the 3D dipolar zero mode is its angular
// mean, which vanishes.
double kernel_fourier_symbol(const KernelSpec& spec, std::span<const double> k, int dim);

// U(r) ~ sum_q w_q exp(-tau_q^2 r^2) on [window_min, 2], unit-box coordinates
struct GaussianSumFit {
    std::vector<double> weights;
    std::vector<double> taus;
    double window_min = 1e-3;   // delta
    double target_error = 1e-12;
    double exponent = 1.0;      // mu of the radial profile coeff * r^-mu
    double coeff = 1.0;
    double achieved_error = 0.0;

    double reference(double r) const; // coeff * r^-mu
    double evaluate(double r) const;  // compensated sum of the Gaussian terms
};

// Sinc-quadrature fit of coeff * r^-mu; throws if max_terms is hit before
// reaching eps0 on a dense sample of [delta, 2].
GaussianSumFit fit_gaussian_sum_radial(double mu, double coeff, double delta,
                                       double eps0, int max_terms = 512);

// fit for the Coulomb reduction of the given kernel in dimension dim
GaussianSumFit fit_gaussian_sum(const KernelSpec& spec, int dim, double delta = 1e-3,
                                double eps0 = 1e-12, int max_terms = 512);

} // namespace fgpe
