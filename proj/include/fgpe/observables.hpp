#pragma once

#include "fgpe/physics.hpp"

#include <array>
#include <vector>

namespace fgpe {

struct EnergyBreakdown {
    double kinetic = 0.0;   // <(-lap+m^2)^s psi, psi>/2
    double potential = 0.0; // <V psi, psi>
    double rotation = 0.0;  // -Omega Re<Lz psi, psi>
    double local = 0.0;     // beta/2 int |psi|^4
    double nonlocal = 0.0;  // lambda/2 <Phi, |psi|^2>
    double total = 0.0;
};

// one diagnostics sample; center/widths/momentum are lab-frame values
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    EnergyBreakdown energy;
    double angular_momentum = 0.0;
    std::array<double, 3> center{};
    std::array<double, 3> widths{};
    std::array<double, 3> momentum{};
    double ame_production = 0.0;
};

double mass(const ComplexField& psi);

// trap is the sampled V on the same grid; phi the nonlocal potential (pass a
// default-constructed field when lambda == 0)
EnergyBreakdown energy(const ComplexField& psi, const PhysicsParams& p,
                       const RealField& trap, const RealField& phi);

// Re<psi, Lz psi>
double angular_momentum(const ComplexField& psi);

std::array<double, 3> center_of_mass(const ComplexField& psi);
// raw second moments int v^2 |psi|^2 per axis
std::array<double, 3> condensate_widths(const ComplexField& psi);
// full moment matrix int x_i x_j |psi|^2 (needed for lab-frame widths)
std::array<std::array<double, 3>, 3> second_moment_matrix(const ComplexField& psi);

// s (2pi)^-d <(|k|^2+m^2)^{s-1} k psi_hat, psi_hat> discretized; the k = 0
// mode contributes 0 by the odd factor k
std::array<double, 3> generalized_momentum(const ComplexField& psi, double s, double m);

// d<Lz>/dt production integral: int |psi|^2 (y d_x - x d_y)(V + lambda Phi).
// Evaluated in the rotating frame at time t (t = 0 or omega = 0 recovers the
// lab frame): the harmonic trap's angular derivative is analytic, the Phi and
// sampled-V parts are spectral (sampled V only supported at omega = 0).
double ame_production(const ComplexField& psi, const PhysicsParams& p,
                      const RealField& phi, double t);

// residuals of the first- and second-order center-of-mass laws on a uniformly
// sampled trajectory; first[i] = |d/dt x_c - Omega J x_c - g| by centered
// differences, second[i] the harmonic-trap ODE residual (s = 1 law).
// Interior samples only; endpoints carry 0.
struct ComLawResiduals {
    std::vector<double> t;
    std::vector<double> first;
    std::vector<double> second;
};
ComLawResiduals com_law_residuals(const std::vector<DiagnosticsRecord>& series,
                                  const PhysicsParams& p);

} // namespace fgpe
