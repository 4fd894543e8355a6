#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kslab {

// Physical and analytic parameters of the radially symmetric system
//   u_t = Delta (u+1)^m - div(u chi(v) grad v),  0 = Delta v - v + u
// on the ball B_R(0) in R^N with Neumann boundary conditions and
// sensitivity chi(v) >= chi0 (a+v)^{-k}.
struct ModelParams {
    int N = 3;          // space dimension, >= 3
    double R = 1.0;     // ball radius
    double m = 1.0;     // diffusion exponent, >= 1
    double chi0 = 1.0;  // sensitivity amplitude > 0
    double a = 0.0;     // sensitivity shift >= 0
    double k = 0.5;     // sensitivity decay exponent > 0
    double M0 = 1.0;    // total mass of u0
    double M1 = 0.5;    // inner mass threshold, in (0, M0)
    double L = 1.0;     // initial-decay amplitude > 0

    // Throws std::invalid_argument when an invariant fails.
    void validate() const;
};

// Derived analytic quantities steering the moment functional.
struct MomentConfig {
    double eps0 = 1.0;
    double p = 0.0;      // decay exponent p(eps0)
    double gamma = 0.5;  // weight exponent, inside the admissible interval
    double alpha = 0.5;  // gamma - (1-2/N) k
    double theta1 = 0.0;
    double s0 = 0.5;     // moment window in (0, R^N), volume coordinate
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(lo < hi); }
};

// "unbounded" when m = 1 (any eps0 > 0 works).
struct Eps0Bound {
    bool unbounded = false;
    double value = 0.0;  // meaningful only when !unbounded
};

struct AdmissibilityReport {
    bool admissible = false;
    double m_upper = 0.0;                  // 2 - 2/N
    double k_upper = 0.0;                  // min of the two bracket terms
    std::optional<Eps0Bound> eps0_max;     // absent when the regime is empty
    std::optional<Interval> gamma_interval;  // at the default eps0
    std::vector<std::string> messages;     // violated conditions
};

// 2 - 2/N, the exclusive upper bound for m.
double m_upper(int N);

// min{ 2/(N-2), (N-2-N(m-1)) / ((m-1)N+1)(N-2) }. Requires 1 <= m < 2-2/N.
double k_threshold(int N, double m);

// p(eps) = N(N-1)/((m-1)N+1) + eps.
double p_of_eps(int N, double m, double eps);

// Supremum of valid eps0: unbounded for m = 1, otherwise
// (N-2)/(m-1) * (k_upper_second_term - k). Requires admissible (m,k).
Eps0Bound eps0_max(int N, double m, double k);

// Default eps0 choice: 1 for m = 1, min(1, eps0_max/2) for m > 1.
double default_eps0(int N, double m, double k);

// ( 1 - 2/N - p(eps0)(m-1)/N ,  min{ 2 - 4/N - 2p(eps0)(m-1)/N - (1-2/N)k, 1 } ).
// Throws when the interval is empty (eps0 >= eps0_max).
Interval gamma_interval(int N, double m, double k, double eps0);

// alpha = gamma - (1-2/N) k; must land in (0,1).
double alpha_of_gamma(double gamma, int N, double k);

// theta1 = max{ 4/N + 2p(eps0)(m-1)/N + (1-2/N)k, 2 - 4/N + (1-2/N)k, 2/N }.
double theta1_of(int N, double m, double k, double eps0);

// eta = M0 * int_0^inf (4 pi t)^{-N/2} exp(-(t + diam^2/(4t))) dt.
double eta_lower_bound(double M0, int N, double diam);

// Blow-up time of y' = C1 y^2 - C2, y(0) = phi0: finite iff
// phi0 > sqrt(C2/C1); then T = 1/(2 C1 c) * ln((phi0+c)/(phi0-c)),
// c = sqrt(C2/C1) (limit 1/(C1 phi0) as C2 -> 0).
std::optional<double> blowup_time_bound(double phi0, double C1, double C2);

// Evaluates the full admissibility arithmetic. Throws for N < 3.
AdmissibilityReport check_conditions(const ModelParams& params);

// MomentConfig from defaults: gamma = interval midpoint (or explicit),
// s0 = s0_fraction * R^N. Requires admissible parameters for "auto" gamma.
MomentConfig make_moment_config(const ModelParams& params, double s0_fraction,
                                std::optional<double> gamma_override = std::nullopt);

}  // namespace kslab
