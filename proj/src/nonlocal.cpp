#include "fgpe/nonlocal.hpp"

#include "fgpe/errors.hpp"
#include "fgpe/fft.hpp"
#include "fgpe/quadrature.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>

namespace fgpe {

namespace {

constexpr double pi = std::numbers::pi;

// 1D factor int_{-2}^{2} exp(-tau^2 y^2) cos(b y) dy of one Gaussian term
double tensor_factor(double tau, double b) {
    if (tau >= 5.0) {
        // whole-line value; the clipped tails are below exp(-4 tau^2) <= e^-100
        return std::sqrt(pi) / tau * std::exp(-b * b / (4.0 * tau * tau));
    }
    const int panels = std::max({6, static_cast<int>(std::abs(b) / pi) + 2,
                                 static_cast<int>(tau) + 2});
    const double v = integrate_gl(
        [&](double y) { return std::exp(-tau * tau * y * y) * std::cos(b * y); }, 0.0,
        2.0, panels, 16);
    return 2.0 * v;
}

// int_0^delta r^j exp(-a^2 r^2) dr, stable across tiny and large a*delta
double radial_gaussian_moment(int j, double a, double delta) {
    const double x = a * delta;
    if (x < 0.5) {
        double sum = 0.0, pw = 1.0;
        for (int m = 0;; ++m) {
            const double term = pw / (2.0 * m + j + 1.0);
            sum += term;
            if (std::abs(term) < 1e-18) break;
            pw *= -x * x / (m + 1.0);
        }
        return std::pow(delta, j + 1) * sum;
    }
    const double a2 = a * a;
    switch (j) {
        case 1:
            return -std::expm1(-x * x) / (2.0 * a2);
        case 2:
            return std::sqrt(pi) * std::erf(x) / (4.0 * a2 * a) -
                   delta * std::exp(-x * x) / (2.0 * a2);
        case 3:
            return (1.0 - (1.0 + x * x) * std::exp(-x * x)) / (2.0 * a2 * a2);
        case 4:
            return 3.0 * std::sqrt(pi) * std::erf(x) / (8.0 * a2 * a2 * a) -
                   std::exp(-x * x) * (3.0 * delta / (4.0 * a2 * a2) +
                                       delta * delta * delta / (2.0 * a2));
        default:
            throw std::logic_error("radial_gaussian_moment: unsupported power");
    }
}

int wrapped_abs(int i, int n) { return i <= n / 2 ? i : n - i; }

void check_tables(const Grid& grid, const ConvolutionTables& t) {
    if (t.grid_fingerprint != grid.fingerprint())
        throw ConfigError("convolution tables were built for a different grid");
}

void warn_once(const char* tag, const std::string& message) {
    static bool warned_negative = false, warned_support = false;
    bool& flag = std::strcmp(tag, "negative") == 0 ? warned_negative : warned_support;
    if (!flag) {
        std::cerr << "warning: " << message << "\n";
        flag = true;
    }
}

// padded half-complex pipeline shared by I1 and its serialization tests
std::vector<cplx> padded_half_spectrum(const RealField& rho, const ConvolutionTables& t) {
    const Grid& g = *rho.grid;
    const int d = g.dim();
    std::size_t padded_total = 1;
    for (int a = 0; a < d; ++a) padded_total *= static_cast<std::size_t>(t.padded_n[a]);
    std::vector<double> pad(padded_total, 0.0);
    const auto& n = t.grid_n;
    const auto& N = t.padded_n;
    if (d == 2) {
        for (int i = 0; i < n[0]; ++i)
            std::memcpy(&pad[static_cast<std::size_t>(i + n[0]) * N[1] + n[1]],
                        &rho.values[static_cast<std::size_t>(i) * n[1]],
                        sizeof(double) * n[1]);
    } else {
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j)
                std::memcpy(&pad[(static_cast<std::size_t>(i + n[0]) * N[1] + (j + n[1])) *
                                     N[2] +
                                 n[2]],
                            &rho.values[(static_cast<std::size_t>(i) * n[1] + j) * n[2]],
                            sizeof(double) * n[2]);
    }
    std::vector<cplx> hat(fft::half_complex_size(d, t.padded_n));
    fft::forward_r2c(d, t.padded_n, pad.data(), hat.data());
    return hat;
}

RealField extract_center(const std::vector<double>& pad, const RealField& like,
                         const ConvolutionTables& t) {
    const Grid& g = *like.grid;
    const int d = g.dim();
    RealField out(like.grid);
    const auto& n = t.grid_n;
    const auto& N = t.padded_n;
    std::size_t padded_total = 1;
    for (int a = 0; a < d; ++a) padded_total *= static_cast<std::size_t>(N[a]);
    const double scale = 1.0 / static_cast<double>(padded_total);
    if (d == 2) {
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j)
                out.values[static_cast<std::size_t>(i) * n[1] + j] =
                    scale * pad[static_cast<std::size_t>(i + n[0]) * N[1] + (j + n[1])];
    } else {
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j < n[1]; ++j)
                for (int k = 0; k < n[2]; ++k)
                    out.values[(static_cast<std::size_t>(i) * n[1] + j) * n[2] + k] =
                        scale *
                        pad[(static_cast<std::size_t>(i + n[0]) * N[1] + (j + n[1])) * N[2] +
                            (k + n[2])];
    }
    return out;
}

} // namespace

ConvolutionTables build_convolution_tables(const Grid& grid, const GaussianSumFit& fit) {
    if (!grid.centered_uniform())
        throw ConfigError("convolution tables require a centered cube grid "
                          "(equal half-widths on every axis)");
    ConvolutionTables t;
    const int d = grid.dim();
    t.dim = d;
    t.grid_fingerprint = grid.fingerprint();
    t.delta = fit.window_min;
    t.target_error = fit.target_error;
    t.exponent = fit.exponent;
    t.coeff = fit.coeff;
    t.terms = static_cast<std::uint32_t>(fit.weights.size());
    for (int a = 0; a < d; ++a) {
        t.grid_n[a] = grid.points(a);
        t.padded_n[a] = 3 * grid.points(a);
    }
    for (int a = d; a < 3; ++a) t.grid_n[a] = t.padded_n[a] = 1;

    const std::size_t q_count = fit.weights.size();
    // per-axis 1D factor tables g[q][|k|]
    std::array<std::vector<double>, 3> g1d;
    for (int a = 0; a < d; ++a) {
        const int half = t.padded_n[a] / 2;
        g1d[a].resize(q_count * (half + 1));
        for (std::size_t q = 0; q < q_count; ++q)
            for (int k = 0; k <= half; ++k)
                g1d[a][q * (half + 1) + k] = tensor_factor(fit.taus[q], pi * k / 3.0);
    }

    t.spectral_weights.assign(fft::half_complex_size(d, t.padded_n), 0.0);
    const auto& N = t.padded_n;
    if (d == 2) {
        const int h0 = N[0] / 2, h1 = N[1] / 2;
        for (std::size_t q = 0; q < q_count; ++q) {
            const double wq = fit.weights[q];
            const double* gx = &g1d[0][q * (h0 + 1)];
            const double* gy = &g1d[1][q * (h1 + 1)];
            std::size_t idx = 0;
            for (int i = 0; i < N[0]; ++i) {
                const double fx = wq * gx[wrapped_abs(i, N[0])];
                for (int j = 0; j <= h1; ++j, ++idx) t.spectral_weights[idx] += fx * gy[j];
            }
        }
    } else {
        const int h0 = N[0] / 2, h1 = N[1] / 2, h2 = N[2] / 2;
        for (std::size_t q = 0; q < q_count; ++q) {
            const double wq = fit.weights[q];
            const double* gx = &g1d[0][q * (h0 + 1)];
            const double* gy = &g1d[1][q * (h1 + 1)];
            const double* gz = &g1d[2][q * (h2 + 1)];
            std::size_t idx = 0;
            for (int i = 0; i < N[0]; ++i) {
                const double fx = wq * gx[wrapped_abs(i, N[0])];
                for (int j = 0; j < N[1]; ++j) {
                    const double fxy = fx * gy[wrapped_abs(j, N[1])];
                    for (int k = 0; k <= h2; ++k, ++idx)
                        t.spectral_weights[idx] += fxy * gz[k];
                }
            }
        }
    }

    // near-field moments of U - U_GS over B_delta
    const double surface = d == 2 ? 2.0 * pi : 4.0 * pi;
    const double mu = fit.exponent;
    double m0 = surface * fit.coeff * std::pow(t.delta, d - mu) / (d - mu);
    double m2 = surface * fit.coeff * std::pow(t.delta, d + 2 - mu) / (d + 2 - mu);
    for (std::size_t q = 0; q < q_count; ++q) {
        m0 -= surface * fit.weights[q] * radial_gaussian_moment(d - 1, fit.taus[q], t.delta);
        m2 -= surface * fit.weights[q] * radial_gaussian_moment(d + 1, fit.taus[q], t.delta);
    }
    t.moment0 = m0;
    t.moment2 = m2;
    return t;
}

RealField regular_integral(const RealField& rho, const ConvolutionTables& tables) {
    check_tables(*rho.grid, tables);
    const int d = rho.grid->dim();
    auto hat = padded_half_spectrum(rho, tables);
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= tables.spectral_weights[i];
    std::size_t padded_total = 1;
    for (int a = 0; a < d; ++a) padded_total *= static_cast<std::size_t>(tables.padded_n[a]);
    std::vector<double> pad(padded_total);
    fft::inverse_c2r(d, tables.padded_n, hat.data(), pad.data());
    return extract_center(pad, rho, tables);
}

RealField nearfield_correction(const RealField& rho, const ConvolutionTables& tables) {
    check_tables(*rho.grid, tables);
    const Grid& g = *rho.grid;
    const int d = g.dim();
    // Laplacian in unit-box coordinates: the unit box has length 2 per axis,
    // so the mode-k frequency is pi*k
    std::vector<cplx> hat(fft::half_complex_size(d, g.shape()));
    fft::forward_r2c(d, g.shape(), rho.values.data(), hat.data());
    const auto& n = g.shape();
    const double inv_total = 1.0 / static_cast<double>(g.size());
    if (d == 2) {
        const int h1 = n[1] / 2;
        std::size_t idx = 0;
        for (int i = 0; i < n[0]; ++i) {
            const double kx = pi * wrapped_abs(i, n[0]);
            for (int j = 0; j <= h1; ++j, ++idx) {
                const double ky = pi * j;
                hat[idx] *= -(kx * kx + ky * ky) * inv_total;
            }
        }
    } else {
        const int h2 = n[2] / 2;
        std::size_t idx = 0;
        for (int i = 0; i < n[0]; ++i) {
            const double kx = pi * wrapped_abs(i, n[0]);
            for (int j = 0; j < n[1]; ++j) {
                const double ky = pi * wrapped_abs(j, n[1]);
                for (int k = 0; k <= h2; ++k, ++idx) {
                    const double kz = pi * k;
                    hat[idx] *= -(kx * kx + ky * ky + kz * kz) * inv_total;
                }
            }
        }
    }
    RealField lap(rho.grid);
    fft::inverse_c2r(d, g.shape(), hat.data(), lap.values.data());

    RealField out(rho.grid);
    const double c2 = tables.moment2 / (2.0 * d);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = tables.moment0 * rho.values[i] + c2 * lap.values[i];
    return out;
}

RealField weighted_second_derivative(const RealField& rho,
                                     const std::array<std::array<double, 3>, 3>& coeffs) {
    const Grid& g = *rho.grid;
    const int d = g.dim();
    std::vector<cplx> hat(fft::half_complex_size(d, g.shape()));
    fft::forward_r2c(d, g.shape(), rho.values.data(), hat.data());
    const auto& n = g.shape();
    const double inv_total = 1.0 / static_cast<double>(g.size());

    // half-complex loop over the last axis; diagonal terms use the full
    // frequency, cross terms the odd convention
    auto mult2d = [&](int i, int j) {
        const double kx = g.frequency(0, i), ky = g.frequency(1, j);
        const double ox = g.frequency_odd(0, i), oy = g.frequency_odd(1, j);
        return -(coeffs[0][0] * kx * kx + coeffs[1][1] * ky * ky +
                 (coeffs[0][1] + coeffs[1][0]) * ox * oy);
    };
    if (d == 2) {
        const int h1 = n[1] / 2;
        std::size_t idx = 0;
        for (int i = 0; i < n[0]; ++i)
            for (int j = 0; j <= h1; ++j, ++idx) hat[idx] *= mult2d(i, j) * inv_total;
    } else {
        const int h2 = n[2] / 2;
        std::size_t idx = 0;
        for (int i = 0; i < n[0]; ++i) {
            const double kx = g.frequency(0, i), ox = g.frequency_odd(0, i);
            for (int j = 0; j < n[1]; ++j) {
                const double ky = g.frequency(1, j), oy = g.frequency_odd(1, j);
                for (int k = 0; k <= h2; ++k, ++idx) {
                    const double kz = g.frequency(2, k), oz = g.frequency_odd(2, k);
                    const double m = coeffs[0][0] * kx * kx + coeffs[1][1] * ky * ky +
                                     coeffs[2][2] * kz * kz +
                                     (coeffs[0][1] + coeffs[1][0]) * ox * oy +
                                     (coeffs[0][2] + coeffs[2][0]) * ox * oz +
                                     (coeffs[1][2] + coeffs[2][1]) * oy * oz;
                    hat[idx] *= -m * inv_total;
                }
            }
        }
    }
    RealField out(rho.grid);
    fft::inverse_c2r(d, g.shape(), hat.data(), out.values.data());
    return out;
}

RealField directional_second_derivative(const RealField& rho, const std::array<double, 3>& n) {
    std::array<std::array<double, 3>, 3> c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c[i][j] = n[i] * n[j];
    return weighted_second_derivative(rho, c);
}

RealField laplacian_xy(const RealField& rho) {
    std::array<std::array<double, 3>, 3> c{};
    c[0][0] = c[1][1] = 1.0;
    return weighted_second_derivative(rho, c);
}

DipolarReduction dipolar_reduction(const RealField& rho, const KernelSpec& spec) {
    const int d = rho.grid->dim();
    spec.validate(d);
    DipolarReduction r;
    std::array<std::array<double, 3>, 3> c{};
    if (spec.variant == KernelVariant::dipole3d) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) c[i][j] = -3.0 * spec.axis[i] * spec.axis[j];
        r.local_coeff = -1.0;
    } else if (spec.variant == KernelVariant::dipole2d) {
        const double n3 = spec.axis[2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) c[i][j] = -1.5 * spec.axis[i] * spec.axis[j];
        c[0][0] += 1.5 * n3 * n3;
        c[1][1] += 1.5 * n3 * n3;
        r.local_coeff = 0.0;
    } else {
        throw ConfigError("dipolar_reduction: kernel is not dipolar");
    }
    r.density = weighted_second_derivative(rho, c);
    return r;
}

RealField evaluate_nonlocal_potential(const RealField& rho, const KernelSpec& spec,
                                      const GaussianSumFit& fit,
                                      const ConvolutionTables& tables) {
    const Grid& g = *rho.grid;
    const int d = g.dim();
    spec.validate(d);
    check_tables(g, tables);
    if (tables.terms != fit.weights.size() || tables.delta != fit.window_min ||
        tables.exponent != fit.exponent || tables.coeff != fit.coeff)
        throw ConfigError("convolution tables do not match the supplied fit");

    double max_abs = 0.0, min_val = 0.0;
    for (double v : rho.values) {
        max_abs = std::max(max_abs, std::abs(v));
        min_val = std::min(min_val, v);
    }
    if (min_val < -1e-10 * max_abs)
        warn_once("negative", "nonlocal potential: density has negative values");

    // the rescaled density must effectively vanish at the box faces
    double edge = 0.0;
    const auto& n = g.shape();
    if (d == 2) {
        for (int i = 0; i < n[0]; ++i) {
            edge = std::max(edge, std::abs(rho.values[static_cast<std::size_t>(i) * n[1]]));
            edge = std::max(edge, std::abs(rho.values[static_cast<std::size_t>(i) * n[1] +
                                                      n[1] - 1]));
        }
        for (int j = 0; j < n[1]; ++j) {
            edge = std::max(edge, std::abs(rho.values[j]));
            edge = std::max(edge,
                            std::abs(rho.values[static_cast<std::size_t>(n[0] - 1) * n[1] + j]));
        }
    } else {
        // sampling the six faces densely is unnecessary; probe the corners plus
        // face centers of the x-faces
        for (int j = 0; j < n[1]; j += std::max(1, n[1] / 16))
            for (int k = 0; k < n[2]; k += std::max(1, n[2] / 16)) {
                edge = std::max(edge, std::abs(rho.values[(std::size_t)j * n[2] + k]));
                edge = std::max(edge,
                                std::abs(rho.values[((std::size_t)(n[0] - 1) * n[1] + j) * n[2] +
                                                    k]));
            }
    }
    if (edge > 1e-8 * std::max(max_abs, 1e-300))
        warn_once("support", "nonlocal potential: density does not vanish at the box "
                             "boundary; convolution accuracy degrades");

    const RealField* source = &rho;
    RealField reduced;
    double local_coeff = 0.0;
    if (spec.variant != KernelVariant::coulomb) {
        DipolarReduction r = dipolar_reduction(rho, spec);
        reduced = std::move(r.density);
        local_coeff = r.local_coeff;
        source = &reduced;
    }

    RealField out = coulomb_convolution(*source, tables);
    if (local_coeff != 0.0)
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += local_coeff * rho.values[i];
    return out;
}

RealField coulomb_convolution(const RealField& density, const ConvolutionTables& tables) {
    const Grid& g = *density.grid;
    check_tables(g, tables);
    RealField far = regular_integral(density, tables);
    RealField near = nearfield_correction(density, tables);
    const double scale = std::pow(g.half_width(), g.dim() - tables.exponent);
    RealField out(density.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = scale * (far.values[i] + near.values[i]);
    return out;
}

namespace {

constexpr std::uint32_t kTablesMagic = 0x46474354u; // "FGCT"
constexpr std::uint32_t kTablesVersion = 1;

template <typename T>
void put(std::string& buf, const T& v) {
    buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& off) {
    if (off + sizeof(T) > buf.size())
        throw ConfigError("convolution table file is truncated");
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

} // namespace

void save_convolution_tables(const ConvolutionTables& t, const std::string& path) {
    std::string payload;
    put(payload, t.dim);
    for (int a = 0; a < 3; ++a) put(payload, t.grid_n[a]);
    for (int a = 0; a < 3; ++a) put(payload, t.padded_n[a]);
    put(payload, t.grid_fingerprint);
    put(payload, t.delta);
    put(payload, t.target_error);
    put(payload, t.exponent);
    put(payload, t.coeff);
    put(payload, t.terms);
    put(payload, t.moment0);
    put(payload, t.moment2);
    put(payload, static_cast<std::uint64_t>(t.spectral_weights.size()));
    payload.append(reinterpret_cast<const char*>(t.spectral_weights.data()),
                   t.spectral_weights.size() * sizeof(double));

    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
              static_cast<uInt>(payload.size())));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open convolution table file for writing: " + path);
    out.write(reinterpret_cast<const char*>(&kTablesMagic), sizeof kTablesMagic);
    out.write(reinterpret_cast<const char*>(&kTablesVersion), sizeof kTablesVersion);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.write(reinterpret_cast<const char*>(&crc), sizeof crc);
    if (!out) throw ConfigError("write failed for convolution table file: " + path);
}

ConvolutionTables load_convolution_tables(const std::string& path, const Grid& grid,
                                          const GaussianSumFit& fit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open convolution table file: " + path);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() < 12) throw ConfigError("convolution table file is truncated");

    std::uint32_t magic, version;
    std::memcpy(&magic, raw.data(), 4);
    std::memcpy(&version, raw.data() + 4, 4);
    if (magic != kTablesMagic) throw ConfigError("not a convolution table file: " + path);
    if (version != kTablesVersion)
        throw ConfigError("unsupported convolution table version in " + path);

    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, raw.data() + raw.size() - 4, 4);
    const std::string payload = raw.substr(8, raw.size() - 12);
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
              static_cast<uInt>(payload.size())));
    if (crc != stored_crc)
        throw ConfigError("convolution table file failed its checksum: " + path);

    std::size_t off = 0;
    ConvolutionTables t;
    t.dim = take<int>(payload, off);
    for (int a = 0; a < 3; ++a) t.grid_n[a] = take<int>(payload, off);
    for (int a = 0; a < 3; ++a) t.padded_n[a] = take<int>(payload, off);
    t.grid_fingerprint = take<std::uint64_t>(payload, off);
    t.delta = take<double>(payload, off);
    t.target_error = take<double>(payload, off);
    t.exponent = take<double>(payload, off);
    t.coeff = take<double>(payload, off);
    t.terms = take<std::uint32_t>(payload, off);
    t.moment0 = take<double>(payload, off);
    t.moment2 = take<double>(payload, off);
    const auto count = take<std::uint64_t>(payload, off);
    if (payload.size() - off != count * sizeof(double))
        throw ConfigError("convolution table file has a bad payload length");
    t.spectral_weights.resize(count);
    std::memcpy(t.spectral_weights.data(), payload.data() + off, count * sizeof(double));

    if (t.grid_fingerprint != grid.fingerprint() || t.dim != grid.dim())
        throw ConfigError("convolution table file does not match the grid");
    if (t.terms != fit.weights.size() || t.delta != fit.window_min ||
        t.exponent != fit.exponent || t.coeff != fit.coeff ||
        t.target_error != fit.target_error)
        throw ConfigError("convolution table file does not match the kernel fit");
    return t;
}

} // namespace fgpe
