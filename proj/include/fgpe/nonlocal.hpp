#pragma once

#include "fgpe/grid.hpp"
#include "fgpe/kernels.hpp"

#include <cstdint>
#include <string>

namespace fgpe {

// Precomputed spectral weights for the Gaussian-sum convolution: the density
// lives on a centered cube rescaled to the unit box B1, the Fourier series
// runs on the 3x zero-padded box B3, and each Gaussian term contributes a
// tensor product of 1D integrals 2*int_0^2 exp(-tau^2 y^2) cos(pi k y / 3) dy.
struct ConvolutionTables {
    int dim = 0;
    std::array<int, 3> grid_n{};
    std::array<int, 3> padded_n{};
    std::uint64_t grid_fingerprint = 0;
    // identity of the fit the tables were built from
    double delta = 0.0, target_error = 0.0, exponent = 0.0, coeff = 0.0;
    std::uint32_t terms = 0;
    // real multiplier on the padded half-complex spectrum
    std::vector<double> spectral_weights;
    // moments of (U - U_GS) over the ball of radius delta: int {1, r^2}
    double moment0 = 0.0, moment2 = 0.0;
};

ConvolutionTables build_convolution_tables(const Grid& grid, const GaussianSumFit& fit);

// versioned binary cache with a crc32 trailer
void save_convolution_tables(const ConvolutionTables& tables, const std::string& path);
// throws ConfigError when the file does not match (grid, fit)
ConvolutionTables load_convolution_tables(const std::string& path, const Grid& grid,
                                          const GaussianSumFit& fit);

// far-field part I1 in unit-box coordinates (input values are reinterpreted
// on B1; output values likewise)
RealField regular_integral(const RealField& rho, const ConvolutionTables& tables);

// near-field Taylor correction I2 = m0*rho + m2*lap(rho)/(2 d), unit coordinates
RealField nearfield_correction(const RealField& rho, const ConvolutionTables& tables);

// spectral d^2/dn^2 along a fixed unit direction (multiplier -(n.k)^2)
RealField directional_second_derivative(const RealField& rho, const std::array<double, 3>& n);

// sum_ij C[i][j] d_i d_j rho, spectral; cross terms use the odd-frequency
// convention, diagonal terms the full one
RealField weighted_second_derivative(const RealField& rho,
                                     const std::array<std::array<double, 3>, 3>& coeffs);

RealField laplacian_xy(const RealField& rho);

// dipolar variants reduce to a mu=1 Coulomb convolution of this density plus
// local_coeff * rho added pointwise
struct DipolarReduction {
    RealField density;
    double local_coeff = 0.0;
};
DipolarReduction dipolar_reduction(const RealField& rho, const KernelSpec& spec);

// physically rescaled (I1 + I2) of an arbitrary signed density against the
// fitted radial kernel; input sanity checks and the dipolar local term live
// in evaluate_nonlocal_potential
RealField coulomb_convolution(const RealField& density, const ConvolutionTables& tables);

// full potential Phi = U * rho on the physical grid
RealField evaluate_nonlocal_potential(const RealField& rho, const KernelSpec& spec,
                                      const GaussianSumFit& fit,
                                      const ConvolutionTables& tables);

} // namespace fgpe
