// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier fixtures (blow-up, bounded contrast) run once and feed
// several criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "kslab/config.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/elliptic.hpp"
#include "kslab/initial_data.hpp"
#include "kslab/params.hpp"
#include "kslab/quadrature.hpp"
#include "kslab/simulate.hpp"
#include "kslab/special.hpp"
#include "kslab/state.hpp"
#include "kslab/stepping.hpp"
#include "kslab/text_io.hpp"

using namespace kslab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    if (!pass) ++g_failures;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

struct Timer {
    double t0 = now_seconds();
    double elapsed() const { return now_seconds() - t0; }
};

// ---- fixtures ------------------------------------------------------------

RunConfig blowup_fixture(int cells) {
    RunConfig cfg;
    cfg.model.N = 3;
    cfg.model.R = 1.0;
    cfg.model.m = 1.0;
    cfg.model.chi0 = 10.0;
    cfg.model.a = 0.0;
    cfg.model.k = 0.5;
    cfg.model.M0 = 40.0;
    cfg.model.M1 = 32.0;
    cfg.model.L = 40.0;
    cfg.cells = cells;
    cfg.grading = 5.0;  // origin cells deep enough that the spike mass stays visible
    cfg.r1 = 0.25;
    cfg.control.dt_init = 1e-7;
    cfg.control.dt_min = 8e-9;  // floor meets the growth bound right at U_blow
    cfg.control.dt_max = 1e-4;
    cfg.control.cfl_safety = 0.8;
    cfg.control.c_growth = 1e-2;
    cfg.control.U_blow = 1e6;
    cfg.control.t_end = 1.0;
    cfg.control.max_steps = 4000000;
    cfg.moments = {MomentSpec{std::nullopt, 0.5}};
    cfg.snapshot_times = {0.0, 2e-4, 5e-4};
    return cfg;
}

RunConfig bounded_fixture() {
    RunConfig cfg = blowup_fixture(1024);
    cfg.model.m = 1.8;  // strong nonlinear diffusion: past the blow-up regime
    cfg.grading = 3.0;
    cfg.control.t_end = 0.02;
    cfg.snapshot_times = {0.0, 0.01};
    return cfg;
}

struct FixtureRun {
    RunConfig cfg;
    RunResult result;
    std::vector<MomentConfig> moments;
    RadialGrid grid;
};

FixtureRun run_fixture(const RunConfig& cfg) {
    FixtureRun fr;
    fr.cfg = cfg;
    fr.grid = RadialGrid(cfg.model.N, cfg.model.R, cfg.cells, cfg.grading);
    fr.moments = resolve_moments(cfg);
    const double p = p_of_eps(cfg.model.N, cfg.model.m, fr.moments.front().eps0);
    const State init = build_initial_data(cfg.model, p, cfg.r1, fr.grid);
    RunOptions opts;
    opts.moments = fr.moments;
    opts.snapshot_times = cfg.snapshot_times;
    fr.result = run(cfg.model, fr.grid, cfg.control, init, opts);
    return fr;
}

// ---- criteria ------------------------------------------------------------

void criterion_1() {
    Timer timer;
    bool pass = std::abs(k_threshold(3, 1.0) - 1.0) == 0.0 &&
                std::abs(k_threshold(4, 1.0) - 1.0) == 0.0;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    for (int i = 0; i < 1200 && pass; ++i) {
        const int N = 3 + static_cast<int>(unit(rng) * 4.0);
        const double m = 1.0 + unit(rng) * (m_upper(N) - 1.0) * 0.98;
        const double k = k_threshold(N, m) * (0.02 + 0.96 * unit(rng));
        const Eps0Bound eb = eps0_max(N, m, k);
        const double eps0 =
            eb.unbounded ? 0.01 + 3.0 * unit(rng) : eb.value * (0.02 + 0.96 * unit(rng));
        const Interval iv = gamma_interval(N, m, k, eps0);
        pass = pass && iv.lo < iv.hi && iv.lo > 0.0 && iv.hi <= 1.0;
        ++checked;
    }
    pass = pass && timer.elapsed() < 1.0;
    report(1, pass,
           "threshold arithmetic exact, " + std::to_string(checked) +
               " random admissible gamma intervals inside (0,1) [" +
               format_shortest(timer.elapsed()) + " s]");
}

void criterion_2() {
    Timer timer;
    bool pass = true;
    double worst = 0.0;
    for (int N = 3; N <= 8; ++N) {
        for (double d : {0.5, 1.0, 2.0, 5.0, 10.0}) {
            const double nu = 0.5 * N - 1.0;
            const double oracle = 2.0 * std::pow(4.0 * M_PI, -0.5 * N) *
                                  std::pow(0.5 * d, 1.0 - 0.5 * N) * bessel_k(nu, d);
            const double got = heat_kernel_integral(N, d);
            worst = std::max(worst, std::abs(got - oracle) / oracle);
        }
    }
    pass = worst <= 1e-8;
    for (double d : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double closed = std::exp(-d) / (4.0 * M_PI * d);
        const double got = eta_lower_bound(1.0, 3, d);
        pass = pass && std::abs(got - closed) / closed <= 1e-10;
    }
    pass = pass && timer.elapsed() < 1.0;
    report(2, pass,
           "heat-kernel quadrature vs Bessel oracle, worst rel err " + format_shortest(worst) +
               " [" + format_shortest(timer.elapsed()) + " s]");
}

void criterion_3() {
    Timer timer;
    double worst = 0.0;
    const double s0 = 0.7;
    std::vector<double> grid(2049), ones(2049), lin(2049);
    for (int i = 0; i < 2049; ++i) {
        grid[i] = i / 2048.0;
        ones[i] = 1.0;
        lin[i] = grid[i];
    }
    for (int g = 1; g <= 9; ++g) {
        const double gamma = g / 10.0;
        const SingularWeightRule rule(gamma, s0);
        const double direct = rule.apply([](double) { return 1.0; });
        const double closed = beta_integral(-gamma, 1.0, s0);
        worst = std::max(worst, std::abs(direct - closed) / closed);
        const double gridded = singular_moment_quad(grid, ones, gamma, s0);
        worst = std::max(worst, std::abs(gridded - closed) / closed);
        const double lin_closed = beta_integral(1.0 - gamma, 1.0, s0);
        const double lin_grid = singular_moment_quad(grid, lin, gamma, s0);
        worst = std::max(worst, std::abs(lin_grid - lin_closed) / lin_closed);
    }
    const bool pass = worst <= 1e-10 && timer.elapsed() < 1.0;
    report(3, pass,
           "beta identities to " + format_shortest(worst) + " rel [" +
               format_shortest(timer.elapsed()) + " s]");
}

void criterion_4() {
    Timer timer;
    bool pass = true;
    // constant case at 8192 cells
    {
        const RadialGrid grid(3, 1.0, 8192, 2.0);
        const std::vector<double> u(grid.nodes(), 1.7);
        const EllipticResult sol = solve_elliptic(grid, u);
        for (double v : sol.v) pass = pass && std::abs(v - 1.7) <= 1e-12 * 1.7;
        const std::vector<double> vol = node_volumes(grid);
        double mu = 0.0, mv = 0.0;
        for (int j = 0; j < grid.nodes(); ++j) {
            mu += vol[j] * u[j];
            mv += vol[j] * sol.v[j];
        }
        pass = pass && std::abs(mv - mu) / mu <= 1e-10;
    }
    // manufactured order
    auto err_at = [](int J) {
        const RadialGrid grid(3, 1.0, J, 2.0);
        std::vector<double> u(grid.nodes()), vstar(grid.nodes());
        for (int j = 0; j < grid.nodes(); ++j) {
            const double r = grid.r[j];
            vstar[j] = 2.0 + std::cos(M_PI * r);
            const double lap = (r == 0.0) ? -3.0 * M_PI * M_PI
                                          : -M_PI * M_PI * std::cos(M_PI * r) -
                                                2.0 * M_PI * std::sin(M_PI * r) / r;
            u[j] = vstar[j] - lap;
        }
        const EllipticResult sol = solve_elliptic(grid, u);
        double err = 0.0;
        for (int j = 0; j < grid.nodes(); ++j) err = std::max(err, std::abs(sol.v[j] - vstar[j]));
        return err;
    };
    const double e1 = err_at(2048), e2 = err_at(4096), e3 = err_at(8192);
    const double order = 0.5 * (std::log2(e1 / e2) + std::log2(e2 / e3));
    pass = pass && order >= 1.9 && timer.elapsed() < 10.0;
    report(4, pass,
           "elliptic: constants exact, manufactured order " + format_shortest(order) + " [" +
               format_shortest(timer.elapsed()) + " s]");
}

void criterion_5(const std::vector<const FixtureRun*>& fixtures) {
    bool pass = true;
    std::string notes;
    for (const FixtureRun* fr : fixtures) {
        const double eta =
            eta_lower_bound(fr->cfg.model.M0, fr->cfg.model.N, 2.0 * fr->cfg.model.R);
        const double mass0 = fr->result.series.samples.front().mass_u;
        double worst_drift = 0.0, worst_vmin_gap = 0.0;
        for (const SeriesSample& s : fr->result.series.samples) {
            worst_drift = std::max(worst_drift, std::abs(s.mass_u - mass0) / fr->cfg.model.M0);
            worst_vmin_gap = std::max(worst_vmin_gap, eta - s.v_min);
        }
        bool monotone = true;
        for (size_t j = 1; j < fr->result.last_state.w.size(); ++j)
            if (fr->result.last_state.w[j] <
                fr->result.last_state.w[j - 1] - 1e-12 * fr->cfg.model.M0)
                monotone = false;
        pass = pass && worst_drift <= 1e-4 && worst_vmin_gap <= 0.0 && monotone;
        notes += " drift=" + format_shortest(worst_drift);
    }
    report(5, pass, "conservation/monotonicity/v_min bounds on all fixtures:" + notes);
}

void criterion_6(const RunConfig& base) {
    Timer timer;
    // smooth pre-blow-up window at three resolutions
    auto deviation = [&](int cells, double dt) {
        RunConfig cfg = base;
        cfg.cells = cells;
        const RadialGrid grid(cfg.model.N, cfg.model.R, cfg.cells, cfg.grading);
        const std::vector<MomentConfig> moments = resolve_moments(cfg);
        const double p = p_of_eps(cfg.model.N, cfg.model.m, moments.front().eps0);
        const State init = build_initial_data(cfg.model, p, cfg.r1, grid);
        RunOptions opts;
        opts.moments = moments;
        const RunResult res = run_fixed_dt(cfg.model, grid, dt, 2e-4, init, opts);
        std::vector<MomentSample> ms;
        for (const SeriesSample& s : res.series.samples) {
            MomentSample m;
            m.t = s.t;
            m.phi = s.phi[0];
            m.I1 = s.I1[0];
            m.I2 = s.I2[0];
            m.I3 = s.I3[0];
            ms.push_back(m);
        }
        fill_dphi_fd(ms);
        const MomentConfig& mc = moments[0];
        const double floor =
            1e-12 * std::max(1.0, cfg.model.M0 * std::pow(mc.s0, 2.0 - mc.gamma));
        // trim the stencil burn-in at the window edge
        const size_t skip = 5;
        double worst = 0.0;
        for (size_t i = skip; i + 1 < ms.size(); ++i) {
            const double sum = ms[i].I1 + ms[i].I2 + ms[i].I3;
            worst = std::max(worst, std::abs(ms[i].dphi_fd - sum) /
                                        std::max(std::abs(ms[i].dphi_fd), floor));
        }
        return worst;
    };
    const double d1 = deviation(1024, 2e-6);
    const double d2 = deviation(2048, 1e-6);
    const double d3 = deviation(4096, 5e-7);  // (cells, dt) refined together
    const double order = 0.5 * (std::log2(d1 / d2) + std::log2(d2 / d3));
    const bool pass = d1 <= 0.05 && order >= 1.0 && timer.elapsed() < 120.0;
    report(6, pass,
           "identity deviation " + format_shortest(d1) + " @1024, order " +
               format_shortest(order) + " [" + format_shortest(timer.elapsed()) + " s]");
}

void criterion_7(const std::vector<const FixtureRun*>& fixtures) {
    Timer timer;
    bool pass = true;
    std::string notes;
    for (const FixtureRun* fr : fixtures) {
        const MomentConfig& mc = fr->moments.front();
        const ModelParams& mp = fr->cfg.model;
        const Sensitivity chi = make_sensitivity(mp);
        std::vector<const State*> states;
        for (const State& st : fr->result.snapshots) states.push_back(&st);
        states.push_back(&fr->result.last_state);  // includes the focused spike
        for (const State* st : states) {
            std::vector<double> probes;
            for (int i = 1; i <= 12; ++i) probes.push_back(mc.s0 * i / 13.0);
            const double r35 = check_lem35(*st, mc.gamma, mc.s0, mp.N, mp.k, fr->grid, probes);
            const EnvelopeTrace env = empirical_envelopes(*st, mc.p, mp.N, fr->grid);
            const double margin =
                check_I2_lower(*st, mc.gamma, mc.s0, mp, fr->grid, chi, env.Cv_emp);
            pass = pass && r35 <= 1.01 && margin >= -1e-12 * mp.M0;
        }
        const double rn = std::pow(fr->cfg.r1, mp.N);
        const double eta_frac = std::clamp(1.0 - rn / mc.s0, 0.05, 0.95);
        const State& init = fr->result.snapshots.front();
        const double im =
            check_initial_moment(init, mc.gamma, mc.s0, eta_frac, mp.M1, fr->grid);
        const double a_use = 2.0 - 2.0 / mp.N - 0.5 * mc.alpha;
        const double l38a = lemma38_ratio(a_use, 0.5, mc.s0, 64);
        const double l38b = lemma38_ratio(a_use, 0.5, mc.s0, 128);
        const bool l38_ok = std::isfinite(l38b) && std::abs(l38b - l38a) / l38b <= 0.05;
        // empirical echo of the uniform pointwise envelope: K_emp stays of
        // one magnitude across the whole run
        const double K0 = fr->result.series.samples.front().K_emp;
        double K_ratio = 0.0;
        for (const SeriesSample& s : fr->result.series.samples)
            K_ratio = std::max(K_ratio, s.K_emp / K0);
        pass = pass && im >= 0.0 && l38_ok && K_ratio < 10.0;
        notes += " im=" + format_shortest(im) + " Kx" + format_shortest(K_ratio);
    }
    pass = pass && timer.elapsed() < 60.0;
    report(7, pass, "inequality suite on fixtures:" + notes + " [" +
                        format_shortest(timer.elapsed()) + " s]");
}

void criterion_8(const FixtureRun& coarse, const FixtureRun& fine, double seconds) {
    bool pass = coarse.result.report.verdict == Verdict::blowup &&
                fine.result.report.verdict == Verdict::blowup &&
                fine.result.report.u_max_last >= 1e6;
    std::string detail = "verdicts " + to_string(coarse.result.report.verdict) + "/" +
                         to_string(fine.result.report.verdict);
    if (coarse.result.report.T_star_estimate && fine.result.report.T_star_estimate) {
        const double a = *coarse.result.report.T_star_estimate;
        const double b = *fine.result.report.T_star_estimate;
        const double rel = std::abs(a - b) / b;
        pass = pass && rel <= 0.10;
        detail += ", T* " + format_shortest(a) + " vs " + format_shortest(b) + " (rel " +
                  format_shortest(rel) + ")";
    } else {
        pass = false;
        detail += ", missing T* estimate";
    }
    pass = pass && seconds < 300.0;
    report(8, pass, detail + " [" + format_shortest(seconds) + " s]");
}

void criterion_9(const FixtureRun& bounded, double seconds) {
    const bool pass = bounded.result.report.verdict == Verdict::bounded &&
                      bounded.result.report.u_max_last <=
                          10.0 * bounded.result.series.samples.front().u_max &&
                      seconds < 300.0;
    report(9, pass,
           "bounded contrast: verdict " + to_string(bounded.result.report.verdict) +
               ", u_max ratio " +
               format_shortest(bounded.result.report.u_max_last /
                               bounded.result.series.samples.front().u_max) +
               " [" + format_shortest(seconds) + " s]");
}

void criterion_10() {
    Timer timer;
    bool pass = true;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double C1 = 0.1 + 3.0 * unit(rng);
        const double C2 = 2.0 * unit(rng);
        const double c = std::sqrt(C2 / C1);
        const double phi0 = std::max(1.5 * c, 0.2) * (1.0 + unit(rng));
        const auto T = blowup_time_bound(phi0, C1, C2);
        if (!T) {
            pass = false;
            continue;
        }
        // RK4 on tau = 1/y down to tau = 0
        double tau = 1.0 / phi0, t = 0.0;
        const double h = (tau / C1) / 30000.0;
        auto f = [&](double x) { return -C1 + C2 * x * x; };
        for (;;) {
            const double k1 = f(tau), k2 = f(tau + 0.5 * h * k1), k3 = f(tau + 0.5 * h * k2),
                         k4 = f(tau + h * k3);
            const double next = tau + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            if (next <= 0.0) break;
            tau = next;
            t += h;
        }
        const double oracle = t + tau / (C1 - C2 * tau * tau);
        worst = std::max(worst, std::abs(*T - oracle) / oracle);
    }
    pass = pass && worst <= 1e-6;

    // synthetic odi_fit recovery
    const int N = 3;
    const double gamma = 0.45, k = 0.5, s0 = 0.5;
    const double S1 = std::pow(s0, -3.0 + gamma + (1.0 - 2.0 / N) * k);
    std::vector<MomentSample> ms;
    for (int i = 0; i <= 40; ++i) {
        MomentSample m;
        m.t = 0.5 * i / 40.0;
        m.phi = 1.0 / (1.0 - m.t);
        m.dphi_fd = m.phi * m.phi;
        ms.push_back(m);
    }
    const OdiFit fit = odi_fit(ms, gamma, s0, N, k, theta1_of(N, 1.0, k, 1.0));
    pass = pass && fit.feasible && std::abs(fit.C1 * S1 - 1.0) <= 1e-6 &&
           std::abs(fit.C2) <= 1e-9;
    pass = pass && timer.elapsed() < 5.0;
    report(10, pass,
           "ODE comparison worst rel " + format_shortest(worst) + ", odi_fit C1*S1 = " +
               format_shortest(fit.C1 * S1) + " [" + format_shortest(timer.elapsed()) + " s]");
}

void criterion_11(const RunConfig& blow_cfg) {
    RunConfig c1 = blow_cfg;
    RunConfig c2 = blow_cfg;
    const fs::path base = fs::temp_directory_path() / "kslab_acceptance_det";
    fs::remove_all(base);
    c1.cells = 512;
    c2.cells = 512;
    c1.control.t_end = 5e-3;
    c2.control.t_end = 5e-3;
    c1.output_dir = (base / "a").string();
    c2.output_dir = (base / "b").string();
    simulate_to_directory(c1);
    simulate_to_directory(c2);
    const bool pass = read_text_file(c1.output_dir + "/timeseries.csv") ==
                      read_text_file(c2.output_dir + "/timeseries.csv");
    fs::remove_all(base);
    report(11, pass, "repeated simulate produces byte-identical timeseries.csv");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_10();

    Timer blow_timer;
    const FixtureRun blow_fine = run_fixture(blowup_fixture(4096));
    const double blow_fine_seconds = blow_timer.elapsed();
    Timer coarse_timer;
    const FixtureRun blow_coarse = run_fixture(blowup_fixture(2048));
    const double blow_total = blow_fine_seconds + coarse_timer.elapsed();

    Timer bounded_timer;
    const FixtureRun bounded = run_fixture(bounded_fixture());
    const double bounded_seconds = bounded_timer.elapsed();

    const std::vector<const FixtureRun*> fixtures{&blow_fine, &blow_coarse, &bounded};
    criterion_5(fixtures);
    criterion_6(blowup_fixture(1024));
    criterion_7(fixtures);
    criterion_8(blow_coarse, blow_fine, blow_total);
    criterion_9(bounded, bounded_seconds);
    criterion_11(blowup_fixture(512));

    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return 1;
}
