#pragma once

#include <array>
#include <complex>

namespace fgpe::fft {

using cplx = std::complex<double>;

// Unnormalized DFTs with an internal plan cache (FFTW_ESTIMATE only, so plans
// and therefore outputs are reproducible run to run).  All entry points are
// serialized on one mutex; fields stay caller-owned plain arrays.

void forward(int rank, const std::array<int, 3>& n, const cplx* in, cplx* out);
void inverse(int rank, const std::array<int, 3>& n, const cplx* in, cplx* out);

// real-to-half-complex and back; complex side has n2/2+1 (last axis) entries
void forward_r2c(int rank, const std::array<int, 3>& n, const double* in, cplx* out);
void inverse_c2r(int rank, const std::array<int, 3>& n, const cplx* in, double* out);

std::size_t complex_size(int rank, const std::array<int, 3>& n);
std::size_t half_complex_size(int rank, const std::array<int, 3>& n);

// >1 enables FFTW threading for subsequently created plans
void set_threads(int n_threads);

} // namespace fgpe::fft
