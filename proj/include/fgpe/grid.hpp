#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace fgpe {

inline constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

// Uniform tensor grid on [lo, hi) per axis, periodic spectral convention.
// Axis 0 is the slowest-varying index (row-major layout, FFTW native).
class Grid {
public:
    Grid(int dim, std::array<double, 3> lo, std::array<double, 3> hi,
         std::array<int, 3> n);

    static Grid square(int dim, double half_width, int points_per_axis);

    int dim() const { return dim_; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    double length(int axis) const { return hi_[axis] - lo_[axis]; }
    int points(int axis) const { return n_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    std::size_t size() const { return size_; }
    const std::array<int, 3>& shape() const { return n_; }

    // volume element h_0*h_1*... used by all quadrature-style sums
    double cell_volume() const { return cell_volume_; }

    double coord(int axis, int i) const { return coords_[axis][i]; }
    // FFTW-ordered angular frequency 2*pi*p/L, p = i for i < n/2, i-n otherwise
    double frequency(int axis, int i) const { return freqs_[axis][i]; }
    // same, but the unpaired Nyquist mode is zeroed (odd-symbol convention)
    double frequency_odd(int axis, int i) const { return freqs_odd_[axis][i]; }

    const std::vector<double>& coords(int axis) const { return coords_[axis]; }
    const std::vector<double>& frequencies(int axis) const { return freqs_[axis]; }
    const std::vector<double>& frequencies_odd(int axis) const { return freqs_odd_[axis]; }

    // true when every axis spans [-L, L] with the same L (required by the
    // unit-box rescaling of the convolution machinery)
    bool centered_uniform() const;
    double half_width() const { return 0.5 * length(0); }

    std::uint64_t fingerprint() const;

    bool same_layout(const Grid& other) const;

private:
    int dim_;
    std::array<double, 3> lo_{}, hi_{};
    std::array<int, 3> n_{};
    std::array<double, 3> spacing_{};
    std::size_t size_ = 0;
    double cell_volume_ = 1.0;
    std::array<std::vector<double>, 3> coords_, freqs_, freqs_odd_;
};

using GridPtr = std::shared_ptr<const Grid>;

struct ComplexField {
    GridPtr grid;
    std::vector<cplx> values;

    ComplexField() = default;
    explicit ComplexField(GridPtr g) : grid(std::move(g)), values(grid->size()) {}
    ComplexField(GridPtr g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {}
};

struct RealField {
    GridPtr grid;
    std::vector<double> values;

    RealField() = default;
    explicit RealField(GridPtr g) : grid(std::move(g)), values(grid->size()) {}
    RealField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {}
};

} // namespace fgpe
