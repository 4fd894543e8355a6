#pragma once

#include <functional>
#include <vector>

namespace kslab {

// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on
// the Legendre recurrence (machine precision for n up to a few hundred).
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
    explicit GaussLegendre(int n);
};

// Shared fixed-size rules so composite integrators don't rebuild tables.
const GaussLegendre& gl16();
const GaussLegendre& gl32();

// Integrate f over [a,b] with an n-point Gauss-Legendre rule.
double gl_integrate(const GaussLegendre& rule, const std::function<double(double)>& f,
                    double a, double b);

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

// Adaptive bisection quadrature; error estimated by comparing one panel
// against its two halves. `tol` is absolute on the whole interval.
QuadResult adaptive_quad(const std::function<double(double)>& f, double a, double b,
                         double tol, int max_depth = 52);

// Euler beta function via log-gamma, B(x,y) = G(x)G(y)/G(x+y), x,y > 0.
double beta_function(double x, double y);

// Modified Bessel function K_nu(x) for nu >= 0, x > 0.
// Temme series for x <= 2, Steed continued fraction beyond, upward
// recurrence in the order. Good to ~1e-14 relative.
double bessel_k(double nu, double x);

// (N-1)-dimensional measure of the unit sphere in R^N: 2 pi^{N/2} / Gamma(N/2).
double sphere_measure(int N);

}  // namespace kslab
