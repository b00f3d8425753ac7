#include "fgpe/grid.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace fgpe {

Grid::Grid(int dim, std::array<double, 3> lo, std::array<double, 3> hi,
           std::array<int, 3> n)
    : dim_(dim), lo_(lo), hi_(hi), n_(n) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("grid: dim must be 2 or 3");
    size_ = 1;
    for (int a = 0; a < dim_; ++a) {
        if (n_[a] < 4 || n_[a] % 2 != 0)
            throw std::invalid_argument("grid: points per axis must be even and >= 4");
        if (!(hi_[a] > lo_[a]))
            throw std::invalid_argument("grid: hi must exceed lo on every axis");
        spacing_[a] = (hi_[a] - lo_[a]) / n_[a];
        cell_volume_ *= spacing_[a];
        size_ *= static_cast<std::size_t>(n_[a]);

        coords_[a].resize(n_[a]);
        freqs_[a].resize(n_[a]);
        freqs_odd_[a].resize(n_[a]);
        const double dk = 2.0 * kPi / (hi_[a] - lo_[a]);
        for (int i = 0; i < n_[a]; ++i) {
            coords_[a][i] = lo_[a] + i * spacing_[a];
            const int p = (i < n_[a] / 2) ? i : i - n_[a];
            freqs_[a][i] = dk * p;
            freqs_odd_[a][i] = (i == n_[a] / 2) ? 0.0 : dk * p;
        }
    }
    for (int a = dim_; a < 3; ++a) {
        n_[a] = 1;
        lo_[a] = hi_[a] = 0.0;
        spacing_[a] = 1.0;
    }
}

Grid Grid::square(int dim, double half_width, int points_per_axis) {
    std::array<double, 3> lo{}, hi{};
    std::array<int, 3> n{};
    for (int a = 0; a < dim; ++a) {
        lo[a] = -half_width;
        hi[a] = half_width;
        n[a] = points_per_axis;
    }
    return Grid(dim, lo, hi, n);
}

bool Grid::centered_uniform() const {
    const double L = length(0);
    for (int a = 0; a < dim_; ++a) {
        if (std::abs(lo_[a] + hi_[a]) > 1e-12 * L) return false;
        if (std::abs(length(a) - L) > 1e-12 * L) return false;
    }
    return true;
}

std::uint64_t Grid::fingerprint() const {
    // FNV-1a over the defining parameters
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* p, std::size_t bytes) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < bytes; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    mix(&dim_, sizeof dim_);
    for (int a = 0; a < dim_; ++a) {
        mix(&lo_[a], sizeof(double));
        mix(&hi_[a], sizeof(double));
        mix(&n_[a], sizeof(int));
    }
    return h;
}

bool Grid::same_layout(const Grid& other) const {
    if (dim_ != other.dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        if (n_[a] != other.n_[a]) return false;
        if (lo_[a] != other.lo_[a] || hi_[a] != other.hi_[a]) return false;
    }
    return true;
}

} // namespace fgpe
