#pragma once

#include <utility>
#include <vector>

namespace fgpe {

// Gauss-Legendre nodes/weights on [-1, 1]; cached per order
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

// integrate f over [a, b] with npanels composite GL of given order
template <typename F>
double integrate_gl(F&& f, double a, double b, int npanels, int order = 16) {
    const auto& [xs, ws] = gauss_legendre(order);
    double total = 0.0;
    const double w = (b - a) / npanels;
    for (int p = 0; p < npanels; ++p) {
        const double mid = a + (p + 0.5) * w;
        double s = 0.0;
        for (std::size_t q = 0; q < xs.size(); ++q) s += ws[q] * f(mid + 0.5 * w * xs[q]);
        total += 0.5 * w * s;
    }
    return total;
}

} // namespace fgpe
