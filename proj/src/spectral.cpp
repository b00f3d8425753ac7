#include "fgpe/spectral.hpp"

#include "fgpe/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace fgpe {

double FractionalSymbol::value(double k_squared) const {
    const double base = k_squared + mass * mass;
    if (order == 1.0) return base;
    if (order == 2.0) return base * base;
    if (base == 0.0) return 0.0;
    return std::pow(base, order);
}

std::vector<cplx> spectral_coefficients(const ComplexField& f) {
    std::vector<cplx> out(f.values.size());
    fft::forward(f.grid->dim(), f.grid->shape(), f.values.data(), out.data());
    return out;
}

ComplexField field_from_coefficients(GridPtr grid, const std::vector<cplx>& coeffs) {
    if (coeffs.size() != grid->size())
        throw std::invalid_argument("field_from_coefficients: size mismatch");
    ComplexField out(grid);
    fft::inverse(grid->dim(), grid->shape(), coeffs.data(), out.values.data());
    const double inv_n = 1.0 / static_cast<double>(grid->size());
    for (auto& v : out.values) v *= inv_n;
    return out;
}

namespace {

// multiply coefficient array in place by mult(k_vector), then inverse + 1/N
template <typename Mult>
void spectral_multiply(const ComplexField& in, ComplexField& out, Mult&& mult) {
    const Grid& g = *in.grid;
    if (!out.grid || !out.grid->same_layout(g)) out = ComplexField(in.grid);
    std::vector<cplx> hat(g.size());
    fft::forward(g.dim(), g.shape(), in.values.data(), hat.data());
    const int nx = g.points(0), ny = g.points(1);
    if (g.dim() == 2) {
        std::size_t idx = 0;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j, ++idx) hat[idx] *= mult(i, j, 0);
    } else {
        const int nz = g.points(2);
        std::size_t idx = 0;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < nz; ++k, ++idx) hat[idx] *= mult(i, j, k);
    }
    fft::inverse(g.dim(), g.shape(), hat.data(), out.values.data());
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (auto& v : out.values) v *= inv_n;
}

} // namespace

void apply_fractional(const ComplexField& in, const FractionalSymbol& sym, ComplexField& out) {
    const Grid& g = *in.grid;
    // per-axis |k|^2 tables keep the hot loop to one pow per point
    const auto& kx = g.frequencies(0);
    const auto& ky = g.frequencies(1);
    if (g.dim() == 2) {
        spectral_multiply(in, out, [&](int i, int j, int) {
            return sym.value(kx[i] * kx[i] + ky[j] * ky[j]);
        });
    } else {
        const auto& kz = g.frequencies(2);
        spectral_multiply(in, out, [&](int i, int j, int k) {
            return sym.value(kx[i] * kx[i] + ky[j] * ky[j] + kz[k] * kz[k]);
        });
    }
}

ComplexField apply_fractional(const ComplexField& in, const FractionalSymbol& sym) {
    ComplexField out;
    apply_fractional(in, sym, out);
    return out;
}

void spectral_derivative(const ComplexField& in, int axis, ComplexField& out) {
    const Grid& g = *in.grid;
    if (axis < 0 || axis >= g.dim())
        throw std::invalid_argument("spectral_derivative: axis out of range");
    const auto& k = g.frequencies_odd(axis);
    const cplx iu(0.0, 1.0);
    if (g.dim() == 2) {
        if (axis == 0)
            spectral_multiply(in, out, [&](int i, int, int) { return iu * k[i]; });
        else
            spectral_multiply(in, out, [&](int, int j, int) { return iu * k[j]; });
    } else {
        if (axis == 0)
            spectral_multiply(in, out, [&](int i, int, int) { return iu * k[i]; });
        else if (axis == 1)
            spectral_multiply(in, out, [&](int, int j, int) { return iu * k[j]; });
        else
            spectral_multiply(in, out, [&](int, int, int kk) { return iu * k[kk]; });
    }
}

ComplexField spectral_derivative(const ComplexField& in, int axis) {
    ComplexField out;
    spectral_derivative(in, axis, out);
    return out;
}

void apply_angular_momentum(const ComplexField& in, ComplexField& out) {
    const Grid& g = *in.grid;
    ComplexField dx = spectral_derivative(in, 0);
    ComplexField dy = spectral_derivative(in, 1);
    if (!out.grid || !out.grid->same_layout(g)) out = ComplexField(in.grid);
    const cplx mi(0.0, -1.0);
    const auto& xs = g.coords(0);
    const auto& ys = g.coords(1);
    const int nx = g.points(0), ny = g.points(1);
    const int nz = g.dim() == 3 ? g.points(2) : 1;
    std::size_t idx = 0;
    for (int i = 0; i < nx; ++i) {
        const double x = xs[i];
        for (int j = 0; j < ny; ++j) {
            const double y = ys[j];
            for (int k = 0; k < nz; ++k, ++idx)
                out.values[idx] = mi * (x * dy.values[idx] - y * dx.values[idx]);
        }
    }
}

ComplexField apply_angular_momentum(const ComplexField& in) {
    ComplexField out;
    apply_angular_momentum(in, out);
    return out;
}

cplx inner_product(const ComplexField& a, const ComplexField& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("inner_product: size mismatch");
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        s += std::conj(a.values[i]) * b.values[i];
    return s * a.grid->cell_volume();
}

double norm(const ComplexField& f) {
    double s = 0.0;
    for (const auto& v : f.values) s += std::norm(v);
    return std::sqrt(s * f.grid->cell_volume());
}

double max_abs(const ComplexField& f) {
    // NaN must poison the result (std::max would drop it) so stability
    // guards keyed on this value can trip
    double m = 0.0;
    for (const auto& v : f.values) {
        const double a = std::abs(v);
        if (std::isnan(a)) return a;
        m = std::max(m, a);
    }
    return m;
}

} // namespace fgpe
