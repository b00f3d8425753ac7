#include "fgpe/oracle.hpp"

#include "fgpe/errors.hpp"
#include "fgpe/fft.hpp"
#include "fgpe/nonlocal.hpp"
#include "fgpe/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace fgpe {

namespace {

constexpr double pi = std::numbers::pi;

// uniform-grid samples with 8-point Lagrange interpolation; zero outside
class FineSampler {
public:
    FineSampler(const RealField& rho, int factor)
        : grid_(*rho.grid), factor_(factor) {
        const int d = grid_.dim();
        for (int a = 0; a < d; ++a) {
            nf_[a] = grid_.points(a) * factor;
            hf_[a] = grid_.spacing(a) / factor;
        }
        // zero-pad the spectrum; the original Nyquist mode is split between
        // +n/2 and -n/2 on the fine grid
        const auto& n = grid_.shape();
        std::vector<cplx> coarse(grid_.size());
        for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = rho.values[i];
        std::vector<cplx> hat(grid_.size());
        fft::forward(d, n, coarse.data(), hat.data());

        std::size_t fine_total = 1;
        for (int a = 0; a < d; ++a) fine_total *= static_cast<std::size_t>(nf_[a]);
        std::vector<cplx> fine_hat(fine_total, cplx(0.0, 0.0));

        auto map_indices = [&](int a, int i) {
            // returns up to two (fine index, weight) pairs
            const int half = n[a] / 2;
            const int p = (i < half) ? i : i - n[a];
            std::array<std::pair<int, double>, 2> out{{{0, 0.0}, {0, 0.0}}};
            if (p == -half) {
                out[0] = {half, 0.5};
                out[1] = {nf_[a] - half, 0.5};
                return std::pair<int, std::array<std::pair<int, double>, 2>>(2, out);
            }
            out[0] = {p >= 0 ? p : nf_[a] + p, 1.0};
            return std::pair<int, std::array<std::pair<int, double>, 2>>(1, out);
        };

        const double scale = 1.0 / static_cast<double>(grid_.size());
        if (d == 2) {
            for (int i = 0; i < n[0]; ++i) {
                auto [ci, mi] = map_indices(0, i);
                for (int j = 0; j < n[1]; ++j) {
                    auto [cj, mj] = map_indices(1, j);
                    const cplx v = hat[static_cast<std::size_t>(i) * n[1] + j] * scale;
                    for (int a = 0; a < ci; ++a)
                        for (int b = 0; b < cj; ++b)
                            fine_hat[static_cast<std::size_t>(mi[a].first) * nf_[1] +
                                     mj[b].first] += v * mi[a].second * mj[b].second;
                }
            }
        } else {
            for (int i = 0; i < n[0]; ++i) {
                auto [ci, mi] = map_indices(0, i);
                for (int j = 0; j < n[1]; ++j) {
                    auto [cj, mj] = map_indices(1, j);
                    for (int k = 0; k < n[2]; ++k) {
                        auto [ck, mk] = map_indices(2, k);
                        const cplx v =
                            hat[(static_cast<std::size_t>(i) * n[1] + j) * n[2] + k] * scale;
                        for (int a = 0; a < ci; ++a)
                            for (int b = 0; b < cj; ++b)
                                for (int c = 0; c < ck; ++c)
                                    fine_hat[(static_cast<std::size_t>(mi[a].first) * nf_[1] +
                                              mj[b].first) *
                                                 nf_[2] +
                                             mk[c].first] +=
                                        v * mi[a].second * mj[b].second * mk[c].second;
                    }
                }
            }
        }
        std::vector<cplx> fine(fine_total);
        std::array<int, 3> nf = nf_;
        fft::inverse(d, nf, fine_hat.data(), fine.data());
        values_.resize(fine_total);
        for (std::size_t i = 0; i < fine_total; ++i) values_[i] = fine[i].real();
    }

    double operator()(double x, double y, double z) const {
        constexpr int P = 8;
        const int d = grid_.dim();
        std::array<double, 3> pos{x, y, z};
        std::array<int, 3> base{};
        std::array<std::array<double, P>, 3> w{};
        for (int a = 0; a < d; ++a) {
            const double s = (pos[a] - grid_.lo(a)) / hf_[a];
            const int i0 = static_cast<int>(std::floor(s)) - (P / 2 - 1);
            if (i0 < 0 || i0 + P - 1 >= nf_[a]) return 0.0; // outside (density ~ 0)
            base[a] = i0;
            const double t = s - i0;
            for (int p = 0; p < P; ++p) {
                double num = 1.0, den = 1.0;
                for (int q = 0; q < P; ++q) {
                    if (q == p) continue;
                    num *= t - q;
                    den *= p - q;
                }
                w[a][p] = num / den;
            }
        }
        double acc = 0.0;
        if (d == 2) {
            for (int p = 0; p < P; ++p) {
                const std::size_t row = static_cast<std::size_t>(base[0] + p) * nf_[1];
                double rowsum = 0.0;
                for (int q = 0; q < P; ++q) rowsum += w[1][q] * values_[row + base[1] + q];
                acc += w[0][p] * rowsum;
            }
        } else {
            for (int p = 0; p < P; ++p)
                for (int q = 0; q < P; ++q) {
                    const std::size_t row =
                        (static_cast<std::size_t>(base[0] + p) * nf_[1] + base[1] + q) * nf_[2];
                    double rowsum = 0.0;
                    for (int r = 0; r < P; ++r) rowsum += w[2][r] * values_[row + base[2] + r];
                    acc += w[0][p] * w[1][q] * rowsum;
                }
        }
        return acc;
    }

private:
    const Grid& grid_;
    int factor_;
    std::array<int, 3> nf_{1, 1, 1};
    std::array<double, 3> hf_{1.0, 1.0, 1.0};
    std::vector<double> values_;
};

double coulomb_oracle_point(const FineSampler& rho, const Grid& g, double mu, double coeff,
                            double x, double y, double z, const OracleOptions& opts) {
    const int d = g.dim();
    // farthest corner distance bounds the support of the shell integrand
    double rmax2 = 0.0;
    for (int cx = 0; cx < 2; ++cx)
        for (int cy = 0; cy < 2; ++cy)
            for (int cz = 0; cz < (d == 3 ? 2 : 1); ++cz) {
                const double dx = (cx ? g.hi(0) : g.lo(0)) - x;
                const double dy = (cy ? g.hi(1) : g.lo(1)) - y;
                const double dz = d == 3 ? ((cz ? g.hi(2) : g.lo(2)) - z) : 0.0;
                rmax2 = std::max(rmax2, dx * dx + dy * dy + dz * dz);
            }
    const double umax = std::sqrt(std::sqrt(rmax2));
    const double alpha = d - 1 - mu;

    const int nang = opts.angular_points;
    std::vector<double> cth(nang), sth(nang);
    for (int j = 0; j < nang; ++j) {
        cth[j] = std::cos(2.0 * pi * j / nang);
        sth[j] = std::sin(2.0 * pi * j / nang);
    }

    auto shell = [&](double r) {
        if (d == 2) {
            double s = 0.0;
            for (int j = 0; j < nang; ++j) s += rho(x + r * cth[j], y + r * sth[j], 0.0);
            return 2.0 * pi * s / nang;
        }
        const auto& [gx, gw] = gauss_legendre(opts.polar_points);
        double s = 0.0;
        for (std::size_t p = 0; p < gx.size(); ++p) {
            const double c = gx[p];
            const double sq = std::sqrt(std::max(0.0, 1.0 - c * c));
            double ring = 0.0;
            for (int j = 0; j < nang; ++j)
                ring += rho(x + r * sq * cth[j], y + r * sq * sth[j], z + r * c);
            s += gw[p] * ring;
        }
        return 2.0 * pi * s / nang;
    };

    // r = u^2 absorbs the fractional weight: r^{d-1-mu} dr = 2 u^{2 alpha + 1} du
    const double val = integrate_gl(
        [&](double u) {
            const double r = u * u;
            return 2.0 * std::pow(u, 2.0 * alpha + 1.0) * shell(r);
        },
        0.0, umax, opts.radial_panels, 16);
    return coeff * val;
}

} // namespace

RealField direct_oracle(const RealField& rho, const KernelSpec& spec,
                        const OracleOptions& opts) {
    const Grid& g = *rho.grid;
    const int d = g.dim();
    spec.validate(d);
    for (int a = 0; a < d; ++a)
        if (g.points(a) > 64)
            throw ConfigError("direct_oracle: grid exceeds 64 points per axis "
                              "(cost grows as N^2); use the fast path instead");

    double mu = 1.0, coeff = 1.0 / (std::pow(2.0, d - 1) * pi);
    const RealField* source = &rho;
    RealField reduced;
    double local_coeff = 0.0;
    if (spec.variant == KernelVariant::coulomb) {
        mu = spec.exponent;
    } else {
        // the spectral density reduction is shared with the fast path; the
        // convolution quadrature itself stays independent
        DipolarReduction r = dipolar_reduction(rho, spec);
        reduced = std::move(r.density);
        local_coeff = r.local_coeff;
        source = &reduced;
    }

    std::size_t fine_total = g.size();
    int factor = 4;
    for (int a = 0; a < d; ++a) fine_total *= 4;
    if (fine_total > (std::size_t)1 << 23) factor = 2;
    FineSampler sampler(*source, factor);

    RealField out(rho.grid);
    auto eval_at = [&](std::size_t idx) {
        const auto& n = g.shape();
        double x, y, z = 0.0;
        if (d == 2) {
            x = g.coord(0, static_cast<int>(idx / n[1]));
            y = g.coord(1, static_cast<int>(idx % n[1]));
        } else {
            const std::size_t plane = idx / n[2];
            x = g.coord(0, static_cast<int>(plane / n[1]));
            y = g.coord(1, static_cast<int>(plane % n[1]));
            z = g.coord(2, static_cast<int>(idx % n[2]));
        }
        out.values[idx] = coulomb_oracle_point(sampler, g, mu, coeff, x, y, z, opts) +
                          local_coeff * rho.values[idx];
    };

    if (!opts.targets.empty()) {
        for (std::size_t idx : opts.targets) eval_at(idx);
    } else {
        for (std::size_t idx = 0; idx < g.size(); ++idx) eval_at(idx);
    }
    return out;
}

} // namespace fgpe
