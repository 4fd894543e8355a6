#pragma once

#include <span>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

// Fields at one time level, all on the grid nodes.
//   w = cumulative radial mass / omega_{N-1} (in s), u = N dw/ds,
//   v = chemical field, z = cumulative int rho^{N-1} v.
struct State {
    double t = 0.0;
    std::vector<double> w;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> z;
};

// Cumulative integral of rho^{N-1} * field, evaluated as a trapezoid in the
// volume coordinate (rho^{N-1} drho = ds/N) so constants integrate exactly.
std::vector<double> cumulative_radial_integral(const RadialGrid& grid,
                                               std::span<const double> field);

// w from nodal u (cumulative trapezoid in rho).
std::vector<double> compute_w(const RadialGrid& grid, std::span<const double> u);

// z from nodal v (same rule).
std::vector<double> compute_z(const RadialGrid& grid, std::span<const double> v);

// Nodal density u = N dw/ds via the nonuniform three-point formula
// (one-sided at the endpoints), clipped at -tol_neg -> 0.
std::vector<double> node_density(const RadialGrid& grid, std::span<const double> w,
                                 double tol_neg = 0.0);

// Nonuniform three-point first derivative of y(s) at every node.
std::vector<double> derivative_3pt(std::span<const double> s, std::span<const double> y);

// Linear interpolation of (xs, ys) at x; xs increasing. Clamps to the ends.
double lerp_at(std::span<const double> xs, std::span<const double> ys, double x);

// Trapezoidal r-space mass integral  int_0^R rho^{N-1} u(rho) drho
// (multiply by omega_{N-1} for the physical mass).
double radial_mass(const RadialGrid& grid, std::span<const double> u);

}  // namespace kslab
