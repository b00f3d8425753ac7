#pragma once

#include "fgpe/grid.hpp"

namespace fgpe {

// sigma(k)^s with sigma(k) = |k|^2 + m^2; order s in (0,2], mass m >= 0
struct FractionalSymbol {
    double order = 1.0;
    double mass = 0.0;

    double value(double k_squared) const;
};

// unnormalized DFT coefficients, FFTW frequency ordering
std::vector<cplx> spectral_coefficients(const ComplexField& f);
// inverse of spectral_coefficients (applies the 1/N normalization)
ComplexField field_from_coefficients(GridPtr grid, const std::vector<cplx>& coeffs);

// (-Laplacian + m^2)^s via Fourier multiplier
void apply_fractional(const ComplexField& in, const FractionalSymbol& sym, ComplexField& out);
ComplexField apply_fractional(const ComplexField& in, const FractionalSymbol& sym);

// d/dx_axis with the unpaired Nyquist multiplier zeroed
void spectral_derivative(const ComplexField& in, int axis, ComplexField& out);
ComplexField spectral_derivative(const ComplexField& in, int axis);

// L_z = -i (x d_y - y d_x); grid coordinates multiply pointwise
void apply_angular_momentum(const ComplexField& in, ComplexField& out);
ComplexField apply_angular_momentum(const ComplexField& in);

// discrete L2 inner product sum conj(a) b * cell_volume
cplx inner_product(const ComplexField& a, const ComplexField& b);
double norm(const ComplexField& f);
double max_abs(const ComplexField& f);

} // namespace fgpe
