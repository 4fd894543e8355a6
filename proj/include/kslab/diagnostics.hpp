#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/params.hpp"
#include "kslab/state.hpp"
#include "kslab/stepping.hpp"

namespace kslab {

struct MomentSample {
    double t = 0.0;
    double s0 = 0.0;
    double gamma = 0.0;
    double phi = 0.0;
    double I1 = 0.0, I2 = 0.0, I3 = 0.0;
    double dphi_fd = 0.0;
};

struct EnvelopeTrace {
    double t = 0.0;
    double K_emp = 0.0;   // sup_r u r^p
    double Cv_emp = 0.0;  // max(sup_r v r^{N-2}, sup_r |v_r| r^{N-1})
    double v_min = 0.0;
};

// phi(s0,t) = int_0^{s0} s^{-gamma} (s0-s) w(s,t) ds  (>= 0 for w >= 0).
double phi_moment(const RadialGrid& grid, std::span<const double> w,
                  double gamma, double s0);

struct MomentTerms {
    double I1 = 0.0, I2 = 0.0, I3 = 0.0;
};

// The three terms of d phi/dt:
//   I1 = m N^2 int s^{2-2/N-gamma}(s0-s)(N w_s + 1)^{m-1} w_ss ds
//   I2 = +N int s^{-gamma}(s0-s) chi(v) w w_s ds
//   I3 = -N int s^{-gamma}(s0-s) chi(v) z w_s ds
// with w_s, w_ss from centered differences on the grid.
MomentTerms ddt_phi_terms(const State& state, double gamma, double s0,
                          const ModelParams& params, const RadialGrid& grid,
                          const Sensitivity& chi);

struct IdentityReport {
    double max_rel_deviation = 0.0;
    int samples_used = 0;
    bool pass = false;
    double tolerance = 0.0;
};

// max over interior samples of |dphi_fd - (I1+I2+I3)| / max(|dphi_fd|, floor),
// dphi_fd from the nonuniform centered three-point formula in t.
IdentityReport check_identity(std::span<const MomentSample> series,
                              double tolerance, double eps_floor);

// Fills dphi_fd in place (endpoints get one-sided values).
void fill_dphi_fd(std::span<MomentSample> series);

// I2 - C int s^{-gamma+(1-2/N)k}(s0-s) w w_s ds with the explicit constant
// C = N chi0 (a R^{N-2} + Cv_emp)^{-k}; nonnegative when chi is the bound
// family and Cv_emp dominates v r^{N-2}.
double check_I2_lower(const State& state, double gamma, double s0,
                      const ModelParams& params, const RadialGrid& grid,
                      const Sensitivity& chi, double Cv_emp);

// max over sample_s of w(s) / [ sqrt(2) s^{alpha/2} (s0-s)^{-1/2} J^{1/2} ],
// J = int_0^{s0} s^{-alpha}(s0-s) w w_s ds. Expected <= 1 + slack.
double check_lem35(const State& state, double gamma, double s0, int N, double k,
                   const RadialGrid& grid, std::span<const double> sample_s);

// phi(s0,0) - eta_frac^2 M1/omega * s0^{2-gamma}; requires the inner-mass
// precondition  int_{B_{r1}} u0 >= M1 with r1 = ((1-eta_frac) s0)^{1/N}.
double check_initial_moment(const State& u0_state, double gamma, double s0,
                            double eta_frac, double M1, const RadialGrid& grid);

// Envelope suprema over the nodes (r = 0 excluded) and min v.
EnvelopeTrace empirical_envelopes(const State& state, double p, int N,
                                  const RadialGrid& grid);

struct OdiFit {
    bool feasible = false;
    double C1 = 0.0;
    double C2 = 0.0;
    std::optional<double> predicted_T;
    std::string note;
};

// Largest C1 (with its minimal companion C2 >= 0) such that
//   dphi_fd >= C1 s0^{-3+gamma+(1-2/N)k} phi^2 - C2 s0^{3-gamma-theta1}
// holds at every sample. When some derivative is nonpositive the pair comes
// from the lower convex envelope of (phi^2, dphi_fd); the edge minimizing
// the implied blow-up time is reported.
OdiFit odi_fit(std::span<const MomentSample> series, double gamma, double s0,
               int N, double k, double theta1);

}  // namespace kslab
