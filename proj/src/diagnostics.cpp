#include "kslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>

#include "kslab/initial_data.hpp"
#include "kslab/quadrature.hpp"
#include "kslab/special.hpp"

namespace kslab {

namespace {

// rules are immutable; cache per thread keyed by (gamma, s0)
const SingularWeightRule& cached_rule(double gamma, double s0) {
    thread_local std::map<std::pair<double, double>, std::unique_ptr<SingularWeightRule>> cache;
    auto& slot = cache[{gamma, s0}];
    if (!slot) slot = std::make_unique<SingularWeightRule>(gamma, s0);
    return *slot;
}

// int_0^{s0} s^{-e} (s0-s) f(s) ds for any e < 1 (nonpositive e folds the
// bounded power into the integrand).
double weighted_moment(double e, double s0, const std::function<double(double)>& f) {
    if (e >= 1.0) throw std::domain_error("weighted_moment: exponent must be < 1");
    if (e >= 0.0) return cached_rule(e, s0).apply(f);
    return cached_rule(0.0, s0).apply([&](double s) { return std::pow(s, -e) * f(s); });
}

std::vector<double> second_derivative_3pt(std::span<const double> s,
                                          std::span<const double> y) {
    const size_t n = s.size();
    std::vector<double> d(n, 0.0);
    for (size_t j = 1; j + 1 < n; ++j) {
        const double hm = s[j] - s[j - 1];
        const double hp = s[j + 1] - s[j];
        d[j] = 2.0 * (y[j - 1] / (hm * (hm + hp)) - y[j] / (hm * hp) + y[j + 1] / (hp * (hm + hp)));
    }
    if (n >= 3) {
        d[0] = d[1];
        d[n - 1] = d[n - 2];
    }
    return d;
}

}  // namespace

double phi_moment(const RadialGrid& grid, std::span<const double> w, double gamma, double s0) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("phi_moment: gamma outside (0,1)");
    if (!(s0 > 0.0 && s0 <= grid.s.back() * (1.0 + 1e-12)))
        throw std::domain_error("phi_moment: s0 outside (0, R^N]");
    return cached_rule(gamma, s0).apply_gridded(grid.s, w);
}

MomentTerms ddt_phi_terms(const State& state, double gamma, double s0,
                          const ModelParams& params, const RadialGrid& grid,
                          const Sensitivity& chi) {
    const double N = grid.N;
    const std::vector<double> ws = derivative_3pt(grid.s, state.w);
    const std::vector<double> wss = second_derivative_3pt(grid.s, state.w);
    const auto& s = grid.s;

    auto lerp = [&](const std::vector<double>& ys, double x) {
        return lerp_at(s, ys, x);
    };

    MomentTerms out;
    out.I1 = weighted_moment(gamma, s0, [&](double x) {
        const double slope = lerp(ws, x);
        const double curv = lerp(wss, x);
        const double coef = std::pow(std::max(N * slope + 1.0, 1e-12), params.m - 1.0);
        return params.m * N * N * std::pow(x, 2.0 - 2.0 / N) * coef * curv;
    });
    out.I2 = weighted_moment(gamma, s0, [&](double x) {
        const double wws = lerp_at(s, state.w, x) * lerp(ws, x);
        return wws == 0.0 ? 0.0 : N * chi(lerp(state.v, x)) * wws;
    });
    out.I3 = weighted_moment(gamma, s0, [&](double x) {
        const double zws = lerp_at(s, state.z, x) * lerp(ws, x);
        return zws == 0.0 ? 0.0 : -N * chi(lerp(state.v, x)) * zws;
    });
    return out;
}

void fill_dphi_fd(std::span<MomentSample> series) {
    const size_t n = series.size();
    if (n < 3) throw std::invalid_argument("fill_dphi_fd: need >= 3 samples");
    std::vector<double> t(n), phi(n);
    for (size_t i = 0; i < n; ++i) {
        t[i] = series[i].t;
        phi[i] = series[i].phi;
    }
    const std::vector<double> d = derivative_3pt(t, phi);
    for (size_t i = 0; i < n; ++i) series[i].dphi_fd = d[i];
}

IdentityReport check_identity(std::span<const MomentSample> series, double tolerance,
                              double eps_floor) {
    if (series.size() < 3) throw std::invalid_argument("check_identity: need >= 3 samples");
    IdentityReport rep;
    rep.tolerance = tolerance;
    for (size_t i = 1; i + 1 < series.size(); ++i) {
        const double sum = series[i].I1 + series[i].I2 + series[i].I3;
        const double dev =
            std::abs(series[i].dphi_fd - sum) / std::max(std::abs(series[i].dphi_fd), eps_floor);
        rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev);
        ++rep.samples_used;
    }
    rep.pass = rep.max_rel_deviation <= tolerance;
    return rep;
}

double check_I2_lower(const State& state, double gamma, double s0,
                      const ModelParams& params, const RadialGrid& grid,
                      const Sensitivity& chi, double Cv_emp) {
    const double N = grid.N;
    const std::vector<double> ws = derivative_3pt(grid.s, state.w);
    const double I2 = weighted_moment(gamma, s0, [&](double x) {
        const double wws = lerp_at(grid.s, state.w, x) * lerp_at(grid.s, ws, x);
        return wws == 0.0 ? 0.0 : N * chi(lerp_at(grid.s, state.v, x)) * wws;
    });
    const double C =
        N * params.chi0 * std::pow(params.a * std::pow(params.R, N - 2.0) + Cv_emp, -params.k);
    const double e = gamma - (1.0 - 2.0 / N) * params.k;  // weight s^{-e}
    const double rhs = C * weighted_moment(e, s0, [&](double x) {
        return lerp_at(grid.s, state.w, x) * lerp_at(grid.s, ws, x);
    });
    return I2 - rhs;
}

double check_lem35(const State& state, double gamma, double s0, int N, double k,
                   const RadialGrid& grid, std::span<const double> sample_s) {
    const double alpha = alpha_of_gamma(gamma, N, k);
    const std::vector<double> ws = derivative_3pt(grid.s, state.w);
    const double Jalpha = weighted_moment(alpha, s0, [&](double x) {
        return lerp_at(grid.s, state.w, x) * lerp_at(grid.s, ws, x);
    });
    double worst = 0.0;
    for (double sv : sample_s) {
        if (!(sv > 0.0 && sv < s0)) continue;
        const double lhs = lerp_at(grid.s, state.w, sv);
        const double rhs = std::sqrt(2.0) * std::pow(sv, 0.5 * alpha) /
                           std::sqrt(s0 - sv) * std::sqrt(std::max(Jalpha, 0.0));
        if (rhs == 0.0) {
            if (lhs > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, lhs / rhs);
    }
    return worst;
}

double check_initial_moment(const State& u0_state, double gamma, double s0,
                            double eta_frac, double M1, const RadialGrid& grid) {
    if (!(eta_frac > 0.0 && eta_frac < 1.0))
        throw std::domain_error("check_initial_moment: eta_frac outside (0,1)");
    const double r1 = std::pow((1.0 - eta_frac) * s0, 1.0 / grid.N);
    const double got = inner_mass(grid, u0_state.u, r1);
    if (got < M1 * (1.0 - 1e-9))
        throw std::runtime_error("check_initial_moment: inner mass " + std::to_string(got) +
                                 " < M1, bound not applicable");
    const double phi = phi_moment(grid, u0_state.w, gamma, s0);
    const double bound =
        eta_frac * eta_frac * M1 / sphere_measure(grid.N) * std::pow(s0, 2.0 - gamma);
    return phi - bound;
}

EnvelopeTrace empirical_envelopes(const State& state, double p, int N, const RadialGrid& grid) {
    EnvelopeTrace tr;
    tr.t = state.t;
    const std::vector<double> vr = derivative_3pt(grid.r, state.v);
    double Ku = 0.0, Cv = 0.0;
    for (int j = 1; j <= grid.cells(); ++j) {
        const double r = grid.r[j];
        Ku = std::max(Ku, state.u[j] * std::pow(r, p));
        Cv = std::max({Cv, state.v[j] * std::pow(r, N - 2.0),
                       std::abs(vr[j]) * std::pow(r, N - 1.0)});
    }
    tr.K_emp = Ku;
    tr.Cv_emp = Cv;
    tr.v_min = *std::min_element(state.v.begin(), state.v.end());
    return tr;
}

OdiFit odi_fit(std::span<const MomentSample> series, double gamma, double s0, int N,
               double k, double theta1) {
    OdiFit fit;
    if (series.empty()) {
        fit.note = "empty series";
        return fit;
    }
    const double S1 = std::pow(s0, -3.0 + gamma + (1.0 - 2.0 / N) * k);
    const double S2 = std::pow(s0, 3.0 - gamma - theta1);
    const double phi0 = series.front().phi;

    std::vector<std::pair<double, double>> pts;  // (phi^2, dphi)
    for (const MomentSample& m : series) pts.emplace_back(m.phi * m.phi, m.dphi_fd);
    std::sort(pts.begin(), pts.end());

    bool all_positive = true;
    for (const auto& [x, y] : pts)
        if (!(y > 0.0) || !(x > 0.0)) all_positive = false;

    if (all_positive) {
        double c1 = std::numeric_limits<double>::infinity();
        for (const auto& [x, y] : pts) c1 = std::min(c1, y / (S1 * x));
        fit.feasible = true;
        fit.C1 = c1;
        fit.C2 = 0.0;
        fit.predicted_T = blowup_time_bound(phi0, fit.C1 * S1, 0.0);
        fit.note = "all derivatives positive; C2 = 0";
        return fit;
    }

    // lower convex hull (Andrew chain); its edges are the Pareto (C1,C2) pairs
    std::vector<std::pair<double, double>> hull;
    for (const auto& pt : pts) {
        if (!hull.empty() && hull.back().first == pt.first) continue;  // keep min y per x
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            if ((b.second - a.second) * (pt.first - a.first) -
                    (pt.second - a.second) * (b.first - a.first) >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }

    double best_T = std::numeric_limits<double>::infinity();
    double best_c1 = 0.0, best_c2 = 0.0;
    double steepest_c1 = 0.0, steepest_c2 = 0.0;
    for (size_t i = 0; i + 1 < hull.size(); ++i) {
        const double slope = (hull[i + 1].second - hull[i].second) /
                             (hull[i + 1].first - hull[i].first);
        const double intercept = hull[i].second - slope * hull[i].first;
        if (!(slope > 0.0) || intercept > 0.0) continue;
        const double c1 = slope / S1;
        const double c2 = -intercept / S2;
        if (c1 > steepest_c1) {
            steepest_c1 = c1;
            steepest_c2 = c2;
        }
        const auto T = blowup_time_bound(phi0, slope, -intercept);
        if (T && *T < best_T) {
            best_T = *T;
            best_c1 = c1;
            best_c2 = c2;
        }
    }
    if (best_c1 > 0.0) {
        fit.feasible = true;
        fit.C1 = best_c1;
        fit.C2 = best_c2;
        fit.predicted_T = best_T;
        fit.note = "hull edge minimizing the implied blow-up time";
    } else if (steepest_c1 > 0.0) {
        fit.feasible = true;
        fit.C1 = steepest_c1;
        fit.C2 = steepest_c2;
        fit.note = "feasible pair found but phi0 below the ODI threshold";
    } else {
        fit.note = "no positive C1 exists for this series";
    }
    return fit;
}

}  // namespace kslab
