#include "kslab/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kslab/elliptic.hpp"
#include "kslab/special.hpp"

namespace kslab {

double inner_mass(const RadialGrid& grid, std::span<const double> u, double rcut) {
    if (u.size() != grid.r.size()) throw std::invalid_argument("inner_mass: size mismatch");
    // omega * w(rcut^N), so the mass accounting matches the w representation
    const std::vector<double> w = compute_w(grid, u);
    const double scut = std::pow(std::min(rcut, grid.R), grid.N);
    return sphere_measure(grid.N) * lerp_at(grid.s, w, scut);
}

namespace {

// cos^2 taper: 1 below r_t0, 0 above r1, C^1 across both joints.
double taper(double r, double r_t0, double r1) {
    if (r <= r_t0) return 1.0;
    if (r >= r1) return 0.0;
    const double x = (r - r_t0) / (r1 - r_t0);
    const double c = std::cos(0.5 * M_PI * x);
    return c * c;
}

double bump_shape(double r, double b0, double b1) {
    if (r <= b0 || r >= b1) return 0.0;
    const double x = (2.0 * r - (b0 + b1)) / (b1 - b0);
    const double c = std::cos(0.5 * M_PI * x);
    return c * c;
}

}  // namespace

State build_initial_data(const ModelParams& params, double p, double r1,
                         const RadialGrid& grid) {
    params.validate();
    if (!(p > 0.0)) throw std::invalid_argument("build_initial_data: p must be > 0");
    if (!(r1 > 0.0 && r1 < params.R))
        throw std::invalid_argument("build_initial_data: r1 must lie in (0, R)");

    const int J = grid.cells();
    int inside = 0;
    for (int j = 1; j <= J; ++j)
        if (grid.r[j] < r1) ++inside;
    if (inside < 4)
        throw std::runtime_error("build_initial_data: grid too coarse to resolve r1 "
                                 "(fewer than 4 nodes inside)");

    const double r_t0 = 0.8 * r1;
    const double L = params.L;
    // smooth-min blend of cap and envelope: always <= min(A, L r^-p), so the
    // decay constraint holds by construction, and the profile stays C^2 for
    // clean trapezoid mass accounting
    auto core_at = [&](double A, double r) {
        double blend = A;
        if (r > 0.0) {
            const double envelope = L * std::pow(r, -p);
            const double ratio = A / envelope;
            if (ratio > 1e30)
                blend = envelope;
            else if (ratio > 1e-30)
                blend = A / std::pow(1.0 + std::pow(ratio, 6.0), 1.0 / 6.0);
        }
        return blend * taper(r, r_t0, r1);
    };
    auto core_mass = [&](double A) {
        std::vector<double> u(J + 1);
        for (int j = 0; j <= J; ++j) u[j] = core_at(A, grid.r[j]);
        return inner_mass(grid, u, r1);
    };

    // target strictly inside [M1, M0]; bisection is on the discrete mass
    const double target = params.M1 + 1e-3 * (params.M0 - params.M1);

    // the discrete capacity saturates once A dominates the envelope at every
    // positive node, so [0, A_sat] brackets any feasible target
    const double A_sat = L * std::pow(grid.r[1], -p);
    const double capacity = core_mass(A_sat);
    if (capacity < target)
        throw std::runtime_error(
            "build_initial_data: infeasible, envelope-capped mass inside B_r1 is " +
            std::to_string(capacity) + " < required " + std::to_string(target) +
            " (binding constraint: decay envelope L r^-p within B_r1)");

    double lo = 0.0, hi = A_sat;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (core_mass(mid) < target ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    const double A = hi;

    std::vector<double> u(J + 1);
    for (int j = 0; j <= J; ++j) u[j] = core_at(A, grid.r[j]);
    const double core_total = inner_mass(grid, u, params.R);

    // remainder goes into the bump
    const double remainder = params.M0 - core_total;
    if (remainder < 0.0)
        throw std::runtime_error("build_initial_data: infeasible, core mass overshoots M0 "
                                 "(binding constraint: remainder nonnegative)");
    const double b0 = r1 + 0.05 * (params.R - r1);
    const double b1 = params.R - 0.05 * (params.R - r1);
    std::vector<double> shape(J + 1);
    for (int j = 0; j <= J; ++j) shape[j] = bump_shape(grid.r[j], b0, b1);
    const double unit = inner_mass(grid, shape, params.R);  // same rule as the w endpoint
    if (!(unit > 0.0))
        throw std::runtime_error("build_initial_data: bump support unresolved on this grid");
    const double B = remainder / unit;
    for (int j = 0; j <= J; ++j) u[j] += B * shape[j];

    State st;
    st.t = 0.0;
    st.w = compute_w(grid, u);
    // hand back u in the same derived representation every later state uses
    st.u = node_density(grid, st.w, 1e-12 * params.M0);
    st.u.front() = std::max(st.u.front(), 0.0);
    st.u.back() = std::max(st.u.back(), 0.0);

    for (int j = 1; j <= J; ++j) {
        const double envelope = L * std::pow(grid.r[j], -p);
        if (st.u[j] > envelope * (1.0 + 1e-9))
            throw std::runtime_error(
                "build_initial_data: infeasible, profile exceeds the decay envelope at r = " +
                std::to_string(grid.r[j]) + " (binding constraint: bump amplitude)");
    }
    if (inner_mass(grid, st.u, r1) < params.M1)
        throw std::runtime_error(
            "build_initial_data: infeasible, inner mass fell below M1 after discretization");

    EllipticResult ell = solve_elliptic(grid, st.u);
    st.v = std::move(ell.v);
    st.z = std::move(ell.z);
    return st;
}

}  // namespace kslab
