#include "kslab/special.hpp"

#include <cmath>
#include <stdexcept>

namespace kslab {

GaussLegendre::GaussLegendre(int n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: n must be >= 1");
    x.resize(n);
    w.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-angle initial guess, then Newton on P_n.
        double root = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double deriv = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = root;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * root * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            deriv = n * (root * p1 - p0) / (root * root - 1.0);
            double delta = p1 / deriv;
            root -= delta;
            if (std::abs(delta) < 1e-16) break;
        }
        x[i] = -root;
        x[n - 1 - i] = root;
        double wi = 2.0 / ((1.0 - root * root) * deriv * deriv);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
}

const GaussLegendre& gl16() {
    static const GaussLegendre rule(16);
    return rule;
}

const GaussLegendre& gl32() {
    static const GaussLegendre rule(32);
    return rule;
}

double gl_integrate(const GaussLegendre& rule, const std::function<double(double)>& f,
                    double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * f(mid + half * rule.x[i]);
    return acc * half;
}

namespace {

void adapt(const std::function<double(double)>& f, double a, double b, double whole,
           double tol, int depth, QuadResult& out) {
    const double mid = 0.5 * (a + b);
    const double left = gl_integrate(gl16(), f, a, mid);
    const double right = gl_integrate(gl16(), f, mid, b);
    const double err = std::abs(left + right - whole);
    if (err <= tol || depth <= 0) {
        out.value += left + right;
        out.error_estimate += err;
        if (err > tol) out.converged = false;
        return;
    }
    adapt(f, a, mid, left, 0.5 * tol, depth - 1, out);
    adapt(f, mid, b, right, 0.5 * tol, depth - 1, out);
}

}  // namespace

QuadResult adaptive_quad(const std::function<double(double)>& f, double a, double b,
                         double tol, int max_depth) {
    QuadResult out;
    adapt(f, a, b, gl_integrate(gl16(), f, a, b), tol, max_depth, out);
    return out;
}

double beta_function(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("beta_function: arguments must be > 0");
    return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;

// Temme's Gamma1/Gamma2 plus the reciprocal gammas. mu in [-1/2, 1/2];
// the analytic limit covers mu -> 0 (integer orders).
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    if (std::abs(mu) < 1e-8) {
        gam1 = -kEulerGamma;
        gam2 = 1.0;
        gampl = 1.0;
        gammi = 1.0;
        return;
    }
    gampl = 1.0 / std::tgamma(1.0 + mu);
    gammi = 1.0 / std::tgamma(1.0 - mu);
    gam1 = (gammi - gampl) / (2.0 * mu);
    gam2 = (gammi + gampl) / 2.0;
}

}  // namespace

double bessel_k(double nu, double x) {
    if (!(nu >= 0.0)) throw std::domain_error("bessel_k: order must be >= 0");
    if (!(x > 0.0)) throw std::domain_error("bessel_k: argument must be > 0");
    constexpr double kEps = 1e-16;
    constexpr int kMaxIter = 10000;

    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;  // in [-1/2, 1/2]
    const double mu2 = mu * mu;
    const double xi = 1.0 / x;
    double kmu, k1;

    if (x <= 2.0) {
        // Temme series.
        const double x2 = 0.5 * x;
        const double pimu = M_PI * mu;
        const double fact = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
        double d = -std::log(x2);
        double e = mu * d;
        const double fact2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
        double gam1, gam2, gampl, gammi;
        temme_gammas(mu, gam1, gam2, gampl, gammi);
        double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
        double sum = ff;
        e = std::exp(e);
        double p = 0.5 * e / gampl;
        double q = 0.5 / (e * gammi);
        double c = 1.0;
        d = x2 * x2;
        double sum1 = p;
        int i = 1;
        for (; i <= kMaxIter; ++i) {
            ff = (i * ff + p + q) / (i * i - mu2);
            c *= d / i;
            p /= (i - mu);
            q /= (i + mu);
            const double del = c * ff;
            sum += del;
            sum1 += c * (p - i * ff);
            if (std::abs(del) < std::abs(sum) * kEps) break;
        }
        if (i > kMaxIter) throw std::runtime_error("bessel_k: series failed to converge");
        kmu = sum;
        k1 = sum1 * 2.0 * xi;
    } else {
        // Steed's continued fraction (CF2).
        double b = 2.0 * (1.0 + x);
        double d = 1.0 / b;
        double h = d, delh = d;
        double q1 = 0.0, q2 = 1.0;
        const double a1 = 0.25 - mu2;
        double q = a1, c = a1, a = -a1;
        double s = 1.0 + q * delh;
        int i = 2;
        for (; i <= kMaxIter; ++i) {
            a -= 2.0 * (i - 1);
            c = -a * c / i;
            const double qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            const double dels = q * delh;
            s += dels;
            if (std::abs(dels / s) <= kEps) break;
        }
        if (i > kMaxIter) throw std::runtime_error("bessel_k: continued fraction failed to converge");
        h = a1 * h;
        kmu = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) / s;
        k1 = kmu * (mu + x + 0.5 - h) * xi;
    }

    // K grows with the order, so upward recurrence is stable.
    for (int i = 1; i <= nl; ++i) {
        const double knext = (mu + i) * 2.0 * xi * k1 + kmu;
        kmu = k1;
        k1 = knext;
    }
    return kmu;
}

double sphere_measure(int N) {
    if (N < 1) throw std::invalid_argument("sphere_measure: N must be >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

}  // namespace kslab
