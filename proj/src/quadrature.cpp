#include "kslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kslab/special.hpp"

namespace kslab {

namespace {

// sigma-panel layout: a geometric cascade toward 0 (down to 2^-48, so the
// weight's full dynamic range is covered) plus uniform panels on [1/16, 1].
std::vector<double> sigma_breakpoints() {
    std::vector<double> b{0.0};
    for (int e = 48; e >= 4; --e) b.push_back(std::ldexp(1.0, -e));
    for (int i = 2; i <= 16; ++i) b.push_back(i / 16.0);
    return b;
}

}  // namespace

SingularWeightRule::SingularWeightRule(double gamma_, double s0_, int points_per_panel)
    : gamma(gamma_), s0(s0_) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::domain_error("SingularWeightRule: gamma must lie in [0,1)");
    if (!(s0 > 0.0)) throw std::domain_error("SingularWeightRule: s0 must be > 0");
    const GaussLegendre gl(points_per_panel);
    const double q = 1.0 / (1.0 - gamma);
    const double scale = std::pow(s0, 1.0 - gamma) / (1.0 - gamma);
    const auto breaks = sigma_breakpoints();
    nodes.reserve((breaks.size() - 1) * gl.x.size());
    weights.reserve(nodes.capacity());
    for (size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double mid = 0.5 * (breaks[p] + breaks[p + 1]);
        const double half = 0.5 * (breaks[p + 1] - breaks[p]);
        for (size_t i = 0; i < gl.x.size(); ++i) {
            const double sigma = mid + half * gl.x[i];
            // sigma^q can underflow for gamma close to 1; keep nodes strictly
            // inside (0, s0)
            const double s = s0 * std::max(std::pow(sigma, q), 1e-300);
            nodes.push_back(s);
            weights.push_back(gl.w[i] * half * scale * (s0 - s));
        }
    }
}

double SingularWeightRule::apply(const std::function<double(double)>& f) const {
    double acc = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
}

double SingularWeightRule::apply_gridded(std::span<const double> grid_s,
                                         std::span<const double> values) const {
    if (grid_s.size() != values.size() || grid_s.size() < 2)
        throw std::invalid_argument("apply_gridded: mismatched or too-short arrays");
    if (grid_s.front() > 0.0 || grid_s.back() < s0 * (1.0 - 1e-12))
        throw std::invalid_argument("apply_gridded: f not defined on [0, s0]");
    double acc = 0.0;
    size_t cell = 0;
    // rule nodes are increasing, so the bracketing cell only moves right
    for (size_t i = 0; i < nodes.size(); ++i) {
        const double s = std::min(nodes[i], grid_s.back());
        while (cell + 2 < grid_s.size() && grid_s[cell + 1] < s) ++cell;
        const double h = grid_s[cell + 1] - grid_s[cell];
        const double lambda = (s - grid_s[cell]) / h;
        acc += weights[i] * ((1.0 - lambda) * values[cell] + lambda * values[cell + 1]);
    }
    return acc;
}

double beta_integral(double a, double b, double s0) {
    if (!(a > -1.0) || !(b > -1.0))
        throw std::domain_error("beta_integral: requires a > -1 and b > -1");
    if (s0 < 0.0) throw std::domain_error("beta_integral: s0 must be >= 0");
    return beta_function(a + 1.0, b + 1.0) * std::pow(s0, a + b + 1.0);
}

double singular_moment_quad(std::span<const double> grid_s, std::span<const double> values,
                            double gamma, double s0) {
    const SingularWeightRule rule(gamma, s0);
    return rule.apply_gridded(grid_s, values);
}

double heat_kernel_integral(int N, double d) {
    if (N < 1) throw std::domain_error("heat_kernel_integral: N must be >= 1");
    if (!(d > 0.0)) throw std::domain_error("heat_kernel_integral: d must be > 0");
    const double d2 = d * d;
    auto f = [N, d2](double t) {
        return std::pow(4.0 * M_PI * t, -0.5 * N) * std::exp(-(t + d2 / (4.0 * t)));
    };
    auto tail = [&f](double tau) {  // t -> 1/t on [1, inf)
        return f(1.0 / tau) / (tau * tau);
    };
    // first pass pins the magnitude, second pass enforces a relative target
    const double rough = gl_integrate(gl32(), f, 0.0, 1.0) + gl_integrate(gl32(), tail, 0.0, 1.0);
    const double tol = std::max(1e-305, std::min(1e-13, 1e-13 * std::abs(rough)));
    const QuadResult head = adaptive_quad(f, 0.0, 1.0, 0.5 * tol);
    const QuadResult back = adaptive_quad(tail, 0.0, 1.0, 0.5 * tol);
    if (!head.converged || !back.converged)
        throw std::runtime_error("heat_kernel_integral: quadrature did not converge, error ~" +
                                 std::to_string(head.error_estimate + back.error_estimate));
    return head.value + back.value;
}

namespace {

// int_0^s xi^{1-a} (s0-xi)^{-b} dxi via xi = s u^{1/(2-a)}.
double lem38_inner_head(double a, double b, double s, double s0) {
    const double q = 1.0 / (2.0 - a);
    auto g = [&](double u) {
        const double xi = s * std::pow(u, q);
        return std::pow(s0 - xi, -b);
    };
    double acc = 0.0;
    for (int p = 0; p < 8; ++p)
        acc += gl_integrate(gl32(), g, p / 8.0, (p + 1) / 8.0);
    return acc * std::pow(s, 2.0 - a) / (2.0 - a);
}

// int_s^{s0} xi^{-a} (s0-xi)^{-b} dxi via s0 - xi = (s0-s) v^{1/(1-b)}.
double lem38_inner_tail(double a, double b, double s, double s0) {
    const double q = 1.0 / (1.0 - b);
    auto g = [&](double v) {
        const double xi = s0 - (s0 - s) * std::pow(v, q);
        return std::pow(xi, -a);
    };
    double acc = 0.0;
    for (int p = 0; p < 8; ++p)
        acc += gl_integrate(gl32(), g, p / 8.0, (p + 1) / 8.0);
    return acc * std::pow(s0 - s, 1.0 - b) / (1.0 - b);
}

}  // namespace

double lemma38_ratio(double a, double b, double s0, int samples) {
    if (!(a > 1.0 && a < 2.0) || !(b >= 0.0 && b < 1.0))
        throw std::domain_error("lemma38_ratio: needs a in (1,2) and b in [0,1) "
                                "(inner integral diverges otherwise)");
    if (!(s0 > 0.0)) throw std::domain_error("lemma38_ratio: s0 must be > 0");
    if (samples < 2) throw std::invalid_argument("lemma38_ratio: samples must be >= 2");
    // geometric sweep of s; the sup typically sits at s -> 0+
    const double lo = std::log(1e-6), hi = std::log(1.0 - 1e-6);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = s0 * std::exp(lo + (hi - lo) * i / (samples - 1));
        const double lhs = lem38_inner_head(a, b, s, s0) + s * lem38_inner_tail(a, b, s, s0);
        const double ratio = lhs / (std::pow(s0, -b) * std::pow(s, 2.0 - a));
        worst = std::max(worst, ratio);
    }
    return worst;
}

}  // namespace kslab
