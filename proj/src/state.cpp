#include "kslab/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kslab {

std::vector<double> cumulative_radial_integral(const RadialGrid& grid,
                                               std::span<const double> field) {
    if (field.size() != grid.s.size())
        throw std::invalid_argument("cumulative_radial_integral: field size mismatch");
    const int J = grid.cells();
    std::vector<double> acc(J + 1, 0.0);
    // rho^{N-1} drho = ds / N turns the radial integral into a plain
    // s-trapezoid, exact for constant fields (w = c s / N node for node)
    for (int j = 1; j <= J; ++j)
        acc[j] = acc[j - 1] +
                 0.5 * (grid.s[j] - grid.s[j - 1]) * (field[j - 1] + field[j]) / grid.N;
    return acc;
}

std::vector<double> compute_w(const RadialGrid& grid, std::span<const double> u) {
    return cumulative_radial_integral(grid, u);
}

std::vector<double> compute_z(const RadialGrid& grid, std::span<const double> v) {
    return cumulative_radial_integral(grid, v);
}

std::vector<double> derivative_3pt(std::span<const double> s, std::span<const double> y) {
    const size_t n = s.size();
    if (y.size() != n || n < 3) throw std::invalid_argument("derivative_3pt: need >= 3 nodes");
    std::vector<double> d(n);
    for (size_t j = 1; j + 1 < n; ++j) {
        const double hm = s[j] - s[j - 1];
        const double hp = s[j + 1] - s[j];
        d[j] = -hp / (hm * (hm + hp)) * y[j - 1] + (hp - hm) / (hm * hp) * y[j] +
               hm / (hp * (hm + hp)) * y[j + 1];
    }
    {   // one-sided quadratic fits at the ends
        const double h1 = s[1] - s[0], h2 = s[2] - s[1];
        d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] -
               h1 / (h2 * (h1 + h2)) * y[2];
        const double g1 = s[n - 1] - s[n - 2], g2 = s[n - 2] - s[n - 3];
        d[n - 1] = (2.0 * g1 + g2) / (g1 * (g1 + g2)) * y[n - 1] -
                   (g1 + g2) / (g1 * g2) * y[n - 2] + g1 / (g2 * (g1 + g2)) * y[n - 3];
    }
    return d;
}

std::vector<double> node_density(const RadialGrid& grid, std::span<const double> w,
                                 double tol_neg) {
    std::vector<double> u = derivative_3pt(grid.s, w);
    for (double& x : u) {
        x *= grid.N;
        if (x < 0.0 && x >= -tol_neg) x = 0.0;
    }
    return u;
}

double lerp_at(std::span<const double> xs, std::span<const double> ys, double x) {
    if (xs.size() < 2 || xs.size() != ys.size())
        throw std::invalid_argument("lerp_at: bad arrays");
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const size_t j = static_cast<size_t>(it - xs.begin());
    const double lambda = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return (1.0 - lambda) * ys[j - 1] + lambda * ys[j];
}

double radial_mass(const RadialGrid& grid, std::span<const double> u) {
    if (u.size() != grid.s.size()) throw std::invalid_argument("radial_mass: size mismatch");
    // piecewise-linear u integrated exactly against the rho^{N-1} weight;
    // independent of the w/s-form accounting
    double acc = 0.0;
    const double N = grid.N;
    for (int j = 1; j <= grid.cells(); ++j) {
        const double ra = grid.r[j - 1], rb = grid.r[j];
        const double pa = std::pow(ra, grid.N), pb = std::pow(rb, grid.N);
        const double mono_n = (pb - pa) / N;
        const double mono_n1 = (rb * pb - ra * pa) / (N + 1.0);
        const double slope = (u[j] - u[j - 1]) / (rb - ra);
        acc += u[j - 1] * mono_n + slope * (mono_n1 - ra * mono_n);
    }
    return acc;
}

}  // namespace kslab
