#pragma once

#include "fgpe/grid.hpp"
#include "fgpe/kernels.hpp"

#include <vector>

namespace fgpe {

// Direct convolution quadrature, independent of the Gaussian-sum fast path.
// The density is spectrally upsampled 4x and read through local Lagrange
// interpolation; the convolution is integrated in polar/spherical shells
// around each target, with the singular radial weight absorbed exactly by the
// substitution r = u^2.  Cost is O(N * quadrature), so grids are capped at
// 64 points per axis.
struct OracleOptions {
    int radial_panels = 16;     // composite GL panels in the substituted radius
    int angular_points = 128;   // trapezoid points on the circle (2D) / azimuth (3D)
    int polar_points = 24;      // GL points in cos(theta), 3D only
    // when non-empty, only these flat indices are evaluated (others stay 0)
    std::vector<std::size_t> targets;
};

RealField direct_oracle(const RealField& rho, const KernelSpec& spec,
                        const OracleOptions& opts = {});

} // namespace fgpe
