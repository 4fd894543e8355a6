#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/params.hpp"
#include "kslab/state.hpp"

namespace kslab {

// chi(v); defaults to the family chi0 (a+v)^{-k}.
using Sensitivity = std::function<double(double)>;

Sensitivity make_sensitivity(const ModelParams& params);

struct StepControl {
    double dt_init = 1e-6;
    double dt_min = 1e-10;
    double dt_max = 1e-2;
    double cfl_safety = 0.8;   // in (0,1)
    double c_growth = 1e-2;    // dt <= c_growth / (1 + u_max)
    double U_blow = 1e6;       // blow-up density threshold
    long max_steps = 2000000;
    double t_end = 1.0;
    double bounded_factor = 10.0;  // "bounded" verdict margin
    double tol_neg_factor = 1e-12; // tol_neg = factor * M0

    void validate() const;
};

// Scalar diagnostics per accepted step. The phi/I columns run parallel to
// the moment configs handed to run().
struct SeriesSample {
    double t = 0.0;
    double dt = 0.0;
    double u_max = 0.0;
    double mass_u = 0.0;  // r-space trapezoid * omega (physical units)
    double mass_v = 0.0;
    double v_min = 0.0;
    std::vector<double> phi;
    std::vector<double> I1, I2, I3;
    double K_emp = 0.0;
    double Cv_emp = 0.0;
};

struct TimeSeries {
    std::vector<SeriesSample> samples;
    long rejected_steps = 0;
};

enum class Verdict { blowup, bounded, inconclusive };

std::string to_string(Verdict v);

struct BlowupReport {
    Verdict verdict = Verdict::inconclusive;
    double t_last = 0.0;
    double u_max_last = 0.0;
    std::optional<double> T_star_estimate;
    double fit_residual = 0.0;
    std::vector<std::string> evidence;
};

struct StepResult {
    bool accepted = false;
    std::string reason;  // set when rejected
};

// One IMEX step of the mass-accumulation equation
//   w_t = m N^2 s^{2-2/N} (N w_s + 1)^{m-1} w_ss - N chi(N z_s) w_s (z - w):
// diffusion implicit with the nonlinear coefficient frozen at the current
// cell slopes (flux form, first interior flux from the first cell slope),
// transport explicit with first-order upwinding by the sign of (z - w).
// Endpoints w(0) = 0, w(R^N) = M0/omega are enforced exactly; afterwards
// u is recovered as N dw/ds and v, z refreshed by the elliptic solve.
// Rejects (without mutating `state`) when any cell density dips below
// -tol_neg or the implicit solve degenerates.
StepResult step(State& state, double dt, const ModelParams& params,
                const RadialGrid& grid, const Sensitivity& chi, double tol_neg);

// Transport CFL bound of the explicit term (the implicit diffusion imposes
// no stability limit of its own).
double stable_dt_estimate(const State& state, const RadialGrid& grid, const Sensitivity& chi);

struct RunResult {
    TimeSeries series;
    BlowupReport report;
    std::vector<State> snapshots;
    State last_state;
    bool solver_failure = false;
    std::string failure_reason;
};

struct RunOptions {
    std::vector<MomentConfig> moments;
    std::vector<double> snapshot_times;
    bool record_moment_terms = true;
    Sensitivity chi;  // defaults to make_sensitivity(params)
};

// Advances from `initial` with
//   dt_{n+1} = clamp(cfl_safety * min(dt_stable, c_growth/(1+u_max)),
//                    dt_min, dt_max),
// halving on rejection; stops at t_end, max_steps or blow-up detection.
RunResult run(const ModelParams& params, const RadialGrid& grid, const StepControl& control,
              const State& initial, const RunOptions& options = {});

// Fixed-dt variant used by refinement studies (controller bypassed).
RunResult run_fixed_dt(const ModelParams& params, const RadialGrid& grid, double dt,
                       double t_end, const State& initial, const RunOptions& options = {});

// Classifies a finished series:
//   blowup: u_max >= U_blow, dt pinned at dt_min across the final 10
//           accepted steps, u_max nondecreasing there (T* from a linear
//           fit of 1/u_max vs t over the collapsed window);
//   bounded: t_end reached with u_max <= bounded_factor * initial;
//   inconclusive otherwise.
BlowupReport detect_blowup(const TimeSeries& series, const StepControl& control);

}  // namespace kslab
