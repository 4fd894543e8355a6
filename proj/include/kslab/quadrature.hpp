#pragma once

#include <functional>
#include <span>
#include <vector>

namespace kslab {

// Quadrature rule for integrals  int_0^{s0} s^{-gamma} (s0 - s) f(s) ds.
// The substitution s = s0 * sigma^{1/(1-gamma)} removes the endpoint
// singularity exactly; composite Gauss panels (geometrically graded toward
// sigma = 0) then integrate monomials f = s^j to ~1e-14 relative.
struct SingularWeightRule {
    double gamma = 0.0;     // weight exponent in [0,1)
    double s0 = 1.0;        // upper endpoint > 0
    std::vector<double> nodes;    // abscissae in (0, s0)
    std::vector<double> weights;  // positive; absorb s^{-gamma}(s0-s)

    SingularWeightRule(double gamma, double s0, int points_per_panel = 16);

    // Apply to a callable f.
    double apply(const std::function<double(double)>& f) const;

    // Apply to values sampled on grid_s (linear interpolation between
    // samples). grid_s must be increasing and cover [0, s0].
    double apply_gridded(std::span<const double> grid_s,
                         std::span<const double> values) const;
};

// int_0^{s0} s^a (s0-s)^b ds = B(a+1, b+1) s0^{a+b+1}, for a,b > -1.
double beta_integral(double a, double b, double s0);

// int_0^{s0} s^{-gamma}(s0-s) f(s) ds for f given at grid nodes.
double singular_moment_quad(std::span<const double> grid_s,
                            std::span<const double> values,
                            double gamma, double s0);

// int_0^inf (4 pi t)^{-N/2} exp(-(t + d^2/(4t))) dt, absolute error <= 1e-12
// and relative error ~1e-13 (the integrand is split at t = 1 and the tail
// mapped back to (0,1] by t -> 1/t). Throws on non-convergence.
double heat_kernel_integral(int N, double d);

// sup over sampled s in (0, s0) of
//   [ int_0^s int_sigma^{s0} xi^{-a} (s0-xi)^{-b} dxi dsigma ] / (s0^{-b} s^{2-a})
// for a in (1,2), b in [0,1). The double integral collapses to
//   int_0^s xi^{1-a}(s0-xi)^{-b} dxi + s * int_s^{s0} xi^{-a}(s0-xi)^{-b} dxi,
// each endpoint singularity removed by a power substitution.
double lemma38_ratio(double a, double b, double s0, int samples);

}  // namespace kslab
