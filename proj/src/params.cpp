#include "kslab/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kslab/quadrature.hpp"
#include "kslab/special.hpp"

namespace kslab {

void ModelParams::validate() const {
    std::ostringstream bad;
    if (N < 3) bad << "N must be >= 3 (theorem scope); ";
    if (!(R > 0.0)) bad << "R must be > 0; ";
    if (!(m >= 1.0)) bad << "m must be >= 1; ";
    if (!(chi0 > 0.0)) bad << "chi0 must be > 0; ";
    if (!(a >= 0.0)) bad << "a must be >= 0; ";
    if (!(k > 0.0)) bad << "k must be > 0; ";
    if (!(M0 > 0.0 && M1 > 0.0 && M1 < M0)) bad << "need 0 < M1 < M0; ";
    if (!(L > 0.0)) bad << "L must be > 0; ";
    const std::string msg = bad.str();
    if (!msg.empty()) throw std::invalid_argument("ModelParams: " + msg);
}

double m_upper(int N) {
    if (N < 3) throw std::domain_error("m_upper: N must be >= 3");
    // (2N-2)/N rather than 2 - 2/N: keeps the excluded endpoint (e.g. 4/3
    // for N = 3) on the representable double
    return (2.0 * N - 2.0) / N;
}

namespace {

// second bracket term of the k threshold
double k_bracket(int N, double m) {
    return (N - 2.0 - N * (m - 1.0)) / (((m - 1.0) * N + 1.0) * (N - 2.0));
}

// strict admissibility with a roundoff guard at the k boundary
bool k_admissible(int N, double m, double k) {
    if (!(k > 0.0) || !(k < std::min(2.0 / (N - 2.0), k_bracket(N, m)))) return false;
    if (m == 1.0) return true;
    const double second = k_bracket(N, m);
    return second - k > 1e-12 * std::max(1.0, second);
}

}  // namespace

double k_threshold(int N, double m) {
    if (N < 3) throw std::domain_error("k_threshold: N must be >= 3");
    if (!(m >= 1.0 && m < m_upper(N)))
        throw std::domain_error("k_threshold: requires 1 <= m < 2 - 2/N (regime empty otherwise)");
    return std::min(2.0 / (N - 2.0), k_bracket(N, m));
}

double p_of_eps(int N, double m, double eps) {
    if (N < 3) throw std::domain_error("p_of_eps: N must be >= 3");
    if (!(m >= 1.0)) throw std::domain_error("p_of_eps: m must be >= 1");
    if (!(eps >= 0.0)) throw std::domain_error("p_of_eps: eps must be >= 0");
    return N * (N - 1.0) / ((m - 1.0) * N + 1.0) + eps;
}

Eps0Bound eps0_max(int N, double m, double k) {
    k_threshold(N, m);  // validates the m regime
    if (!k_admissible(N, m, k))
        throw std::domain_error("eps0_max: (m,k) inadmissible (need 0 < k < k_threshold)");
    if (m == 1.0) return {.unbounded = true, .value = 0.0};
    return {.unbounded = false, .value = (N - 2.0) / (m - 1.0) * (k_bracket(N, m) - k)};
}

double default_eps0(int N, double m, double k) {
    const Eps0Bound bound = eps0_max(N, m, k);
    if (bound.unbounded) return 1.0;
    return std::min(1.0, 0.5 * bound.value);
}

Interval gamma_interval(int N, double m, double k, double eps0) {
    const Eps0Bound bound = eps0_max(N, m, k);
    if (!(eps0 > 0.0) || (!bound.unbounded && eps0 >= bound.value))
        throw std::domain_error("gamma_interval: eps0 outside (0, eps0_max), interval empty");
    const double p = p_of_eps(N, m, eps0);
    const double slope = p / N * (m - 1.0);  // vanishes identically for m = 1
    Interval iv;
    iv.lo = 1.0 - 2.0 / N - slope;
    iv.hi = std::min(2.0 - 4.0 / N - 2.0 * slope - (1.0 - 2.0 / N) * k, 1.0);
    if (iv.empty()) throw std::domain_error("gamma_interval: empty interval");
    return iv;
}

double alpha_of_gamma(double gamma, int N, double k) {
    if (N < 3) throw std::domain_error("alpha_of_gamma: N must be >= 3");
    const double alpha = gamma - (1.0 - 2.0 / N) * k;
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("alpha_of_gamma: alpha outside (0,1)");
    return alpha;
}

double theta1_of(int N, double m, double k, double eps0) {
    const double slope = p_of_eps(N, m, eps0) / N * (m - 1.0);
    const double c1 = 4.0 / N + 2.0 * slope + (1.0 - 2.0 / N) * k;
    const double c2 = 2.0 - 4.0 / N + (1.0 - 2.0 / N) * k;
    const double c3 = 2.0 / N;
    return std::max({c1, c2, c3});
}

double eta_lower_bound(double M0, int N, double diam) {
    if (!(M0 > 0.0)) throw std::domain_error("eta_lower_bound: M0 must be > 0");
    return M0 * heat_kernel_integral(N, diam);
}

std::optional<double> blowup_time_bound(double phi0, double C1, double C2) {
    if (!(C1 > 0.0) || C2 < 0.0)
        throw std::domain_error("blowup_time_bound: need C1 > 0 and C2 >= 0");
    const double c = std::sqrt(C2 / C1);
    if (!(phi0 > c)) return std::nullopt;
    if (C2 == 0.0) return 1.0 / (C1 * phi0);
    return std::log((phi0 + c) / (phi0 - c)) / (2.0 * C1 * c);
}

AdmissibilityReport check_conditions(const ModelParams& params) {
    params.validate();  // rejects N < 3 among other things
    AdmissibilityReport rep;
    rep.m_upper = m_upper(params.N);
    const bool m_ok = params.m >= 1.0 && params.m < rep.m_upper;
    if (!m_ok) {
        rep.messages.push_back("m outside [1, 2-2/N)");
        rep.k_upper = 0.0;
        rep.admissible = false;
        return rep;
    }
    rep.k_upper = k_threshold(params.N, params.m);
    const bool k_ok = k_admissible(params.N, params.m, params.k);
    if (!k_ok) rep.messages.push_back("k outside (0, k_threshold)");
    rep.admissible = m_ok && k_ok;
    if (rep.admissible) {
        rep.eps0_max = eps0_max(params.N, params.m, params.k);
        const double eps0 = default_eps0(params.N, params.m, params.k);
        rep.gamma_interval = gamma_interval(params.N, params.m, params.k, eps0);
    }
    return rep;
}

MomentConfig make_moment_config(const ModelParams& params, double s0_fraction,
                                std::optional<double> gamma_override) {
    if (!(s0_fraction > 0.0 && s0_fraction <= 1.0))
        throw std::domain_error("make_moment_config: s0_fraction must lie in (0,1]");
    MomentConfig cfg;
    cfg.s0 = s0_fraction * std::pow(params.R, params.N);
    if (gamma_override) {
        if (!(*gamma_override > 0.0 && *gamma_override < 1.0))
            throw std::domain_error("make_moment_config: gamma must lie in (0,1)");
        cfg.gamma = *gamma_override;
        // best-effort analytic companions; fall back to bare values when the
        // parameters are inadmissible (contrast runs)
        try {
            cfg.eps0 = default_eps0(params.N, params.m, params.k);
            cfg.p = p_of_eps(params.N, params.m, cfg.eps0);
            cfg.theta1 = theta1_of(params.N, params.m, params.k, cfg.eps0);
        } catch (const std::domain_error&) {
            cfg.eps0 = 1.0;
            cfg.p = p_of_eps(params.N, params.m, cfg.eps0);
            cfg.theta1 = 0.0;
        }
        const double alpha = cfg.gamma - (1.0 - 2.0 / params.N) * params.k;
        cfg.alpha = alpha;
        return cfg;
    }
    cfg.eps0 = default_eps0(params.N, params.m, params.k);
    cfg.p = p_of_eps(params.N, params.m, cfg.eps0);
    const Interval iv = gamma_interval(params.N, params.m, params.k, cfg.eps0);
    cfg.gamma = 0.5 * (iv.lo + iv.hi);
    cfg.alpha = alpha_of_gamma(cfg.gamma, params.N, params.k);
    cfg.theta1 = theta1_of(params.N, params.m, params.k, cfg.eps0);
    return cfg;
}

}  // namespace kslab
