#include "kslab/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "kslab/elliptic.hpp"
#include "kslab/initial_data.hpp"
#include "kslab/quadrature.hpp"
#include "kslab/special.hpp"
#include "kslab/text_io.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace kslab {

namespace {

double resolve_eps0(const RunConfig& config) {
    if (config.eps0) return *config.eps0;
    try {
        return default_eps0(config.model.N, config.model.m, config.model.k);
    } catch (const std::domain_error&) {
        return 1.0;  // contrast runs outside the admissible regime
    }
}

double envelope_exponent(const RunConfig& config) {
    // p(eps0); for m past the admissible range the formula still evaluates
    return p_of_eps(config.model.N, config.model.m, resolve_eps0(config));
}

std::string timeseries_csv(const TimeSeries& series, size_t n_moments) {
    std::ostringstream out;
    out << "t,dt,u_max,mass_u,mass_v,v_min";
    for (size_t i = 1; i <= n_moments; ++i)
        out << ",phi_" << i << ",I1_" << i << ",I2_" << i << ",I3_" << i;
    out << ",K_emp,Cv_emp\n";
    for (const SeriesSample& s : series.samples) {
        out << format_shortest(s.t) << ',' << format_shortest(s.dt) << ','
            << format_shortest(s.u_max) << ',' << format_shortest(s.mass_u) << ','
            << format_shortest(s.mass_v) << ',' << format_shortest(s.v_min);
        for (size_t i = 0; i < n_moments; ++i)
            out << ',' << format_shortest(s.phi[i]) << ',' << format_shortest(s.I1[i]) << ','
                << format_shortest(s.I2[i]) << ',' << format_shortest(s.I3[i]);
        out << ',' << format_shortest(s.K_emp) << ',' << format_shortest(s.Cv_emp) << "\n";
    }
    return out.str();
}

std::string snapshot_csv(const RadialGrid& grid, const State& st) {
    std::ostringstream out;
    out << "s,r,w,u,v,z\n";
    for (int j = 0; j <= grid.cells(); ++j)
        out << format_sig17(grid.s[j]) << ',' << format_sig17(grid.r[j]) << ','
            << format_sig17(st.w[j]) << ',' << format_sig17(st.u[j]) << ','
            << format_sig17(st.v[j]) << ',' << format_sig17(st.z[j]) << "\n";
    return out.str();
}

ordered_json report_json(const RunResult& result, const std::vector<MomentConfig>& moments,
                         const std::vector<std::string>& snapshot_files) {
    ordered_json j;
    j["verdict"] = to_string(result.report.verdict);
    j["t_last"] = result.report.t_last;
    j["u_max_last"] = result.report.u_max_last;
    if (result.report.T_star_estimate)
        j["T_star_estimate"] = *result.report.T_star_estimate;
    else
        j["T_star_estimate"] = nullptr;
    j["fit_residual"] = result.report.fit_residual;
    j["evidence"] = result.report.evidence;
    j["accepted_steps"] = result.series.samples.size() - 1;
    j["rejected_steps"] = result.series.rejected_steps;
    j["solver_failure"] = result.solver_failure;
    j["failure_reason"] = result.failure_reason;
    ordered_json jm = ordered_json::array();
    for (const MomentConfig& m : moments) {
        ordered_json e;
        e["gamma"] = m.gamma;
        e["s0"] = m.s0;
        e["alpha"] = m.alpha;
        e["theta1"] = m.theta1;
        e["eps0"] = m.eps0;
        e["p"] = m.p;
        jm.push_back(e);
    }
    j["moments"] = jm;
    ordered_json js = ordered_json::array();
    for (size_t i = 0; i < result.snapshots.size(); ++i) {
        ordered_json e;
        e["file"] = snapshot_files[i];
        e["t"] = result.snapshots[i].t;
        js.push_back(e);
    }
    j["snapshots"] = js;
    if (!result.series.samples.empty()) {
        const SeriesSample& last = result.series.samples.back();
        ordered_json d;
        d["mass_u_final"] = last.mass_u;
        d["v_min_final"] = last.v_min;
        d["K_emp_final"] = last.K_emp;
        d["Cv_emp_final"] = last.Cv_emp;
        j["summary"] = d;
    }
    return j;
}

}  // namespace

SimulationArtifacts simulate_to_directory(const RunConfig& config) {
    config.validate();
    const RadialGrid grid(config.model.N, config.model.R, config.cells, config.grading);
    const std::vector<MomentConfig> moments = resolve_moments(config);

    const double p = envelope_exponent(config);
    const State initial = build_initial_data(config.model, p, config.r1, grid);

    RunOptions options;
    options.moments = moments;
    options.snapshot_times = config.snapshot_times;
    if (std::find(options.snapshot_times.begin(), options.snapshot_times.end(), 0.0) ==
        options.snapshot_times.end())
        options.snapshot_times.insert(options.snapshot_times.begin(), 0.0);

    SimulationArtifacts art;
    art.result = run(config.model, grid, config.control, initial, options);
    art.moments = moments;
    art.out_dir = config.output_dir;

    fs::create_directories(config.output_dir);
    write_text_file(config.output_dir + "/config_resolved.cfg", serialize_config(config));
    write_text_file(config.output_dir + "/timeseries.csv",
                    timeseries_csv(art.result.series, moments.size()));
    std::vector<std::string> snapshot_files;
    for (size_t i = 0; i < art.result.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "snapshot_%04zu.csv", i);
        snapshot_files.emplace_back(name);
        write_text_file(config.output_dir + "/" + name,
                        snapshot_csv(grid, art.result.snapshots[i]));
    }
    write_text_file(config.output_dir + "/report.json",
                    report_json(art.result, moments, snapshot_files).dump(2) + "\n");
    return art;
}

namespace {

struct LoadedRun {
    RunConfig config;
    RadialGrid grid;
    std::vector<MomentConfig> moments;
    TimeSeries series;
    std::vector<State> snapshots;
};

LoadedRun load_run(const std::string& dir) {
    LoadedRun run;
    run.config = parse_config(read_text_file(dir + "/config_resolved.cfg"));
    run.grid = RadialGrid(run.config.model.N, run.config.model.R, run.config.cells,
                          run.config.grading);
    run.moments = resolve_moments(run.config);

    const std::string csv = read_text_file(dir + "/timeseries.csv");
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty timeseries.csv");
    const size_t nm = run.moments.size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6 + 4 * nm + 2)
            throw std::runtime_error("timeseries.csv: unexpected column count");
        SeriesSample s;
        auto num = [&](size_t i) {
            const auto v = parse_double(f[i]);
            if (!v) throw std::runtime_error("timeseries.csv: bad number " + f[i]);
            return *v;
        };
        s.t = num(0);
        s.dt = num(1);
        s.u_max = num(2);
        s.mass_u = num(3);
        s.mass_v = num(4);
        s.v_min = num(5);
        for (size_t i = 0; i < nm; ++i) {
            s.phi.push_back(num(6 + 4 * i));
            s.I1.push_back(num(7 + 4 * i));
            s.I2.push_back(num(8 + 4 * i));
            s.I3.push_back(num(9 + 4 * i));
        }
        s.K_emp = num(6 + 4 * nm);
        s.Cv_emp = num(7 + 4 * nm);
        run.series.samples.push_back(std::move(s));
    }

    for (int i = 0;; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "snapshot_%04d.csv", i);
        const fs::path path = fs::path(dir) / name;
        if (!fs::exists(path)) break;
        std::istringstream sin(read_text_file(path.string()));
        std::string sline;
        std::getline(sin, sline);  // header
        State st;
        while (std::getline(sin, sline)) {
            if (sline.empty()) continue;
            const auto f = split_csv_line(sline);
            if (f.size() != 6) throw std::runtime_error("snapshot: bad row");
            st.w.push_back(*parse_double(f[2]));
            st.u.push_back(*parse_double(f[3]));
            st.v.push_back(*parse_double(f[4]));
            st.z.push_back(*parse_double(f[5]));
        }
        if (static_cast<int>(st.w.size()) != run.grid.nodes())
            throw std::runtime_error("snapshot node count does not match the grid");
        run.snapshots.push_back(std::move(st));
    }
    return run;
}

std::vector<double> lem35_sample_points(double s0) {
    std::vector<double> pts;
    for (int i = 1; i <= 12; ++i) pts.push_back(s0 * i / 13.0);
    pts.push_back(s0 * 1e-3);
    pts.push_back(s0 * 1e-2);
    return pts;
}

}  // namespace

std::vector<DiagnosticEntry> diagnose_directory(const std::string& run_dir) {
    const LoadedRun run = load_run(run_dir);
    if (run.series.samples.empty()) throw std::runtime_error("diagnose: empty series");
    const ModelParams& mp = run.config.model;
    const Sensitivity chi = make_sensitivity(mp);
    std::vector<DiagnosticEntry> out;

    // Lemma 3.2 identity, per moment config
    for (size_t mi = 0; mi < run.moments.size(); ++mi) {
        const MomentConfig& mc = run.moments[mi];
        std::vector<MomentSample> ms;
        for (const SeriesSample& s : run.series.samples) {
            MomentSample m;
            m.t = s.t;
            m.s0 = mc.s0;
            m.gamma = mc.gamma;
            m.phi = s.phi[mi];
            m.I1 = s.I1[mi];
            m.I2 = s.I2[mi];
            m.I3 = s.I3[mi];
            ms.push_back(m);
        }
        DiagnosticEntry e;
        e.name = "identity_lemma32_m" + std::to_string(mi + 1);
        e.tolerance = 0.05;
        if (ms.size() >= 3) {
            fill_dphi_fd(ms);
            const double floor =
                1e-12 * std::max(1.0, mp.M0 * std::pow(mc.s0, 2.0 - mc.gamma));
            // gate on samples that carry derivative signal AND time-resolve
            // the trajectory (per-step phi change <= 1%): the implicit step
            // equilibrates stiff modes, so under-resolved transients measure
            // the splitting, not the identity
            double dmax = 0.0;
            for (const MomentSample& m : ms) dmax = std::max(dmax, std::abs(m.dphi_fd));
            double worst = 0.0;
            for (size_t i = 1; i + 1 < ms.size(); ++i) {
                if (std::abs(ms[i].dphi_fd) < 0.05 * dmax) continue;
                const double scale = std::max(std::abs(ms[i].phi), floor);
                if (std::abs(ms[i + 1].phi - ms[i].phi) > 0.01 * scale ||
                    std::abs(ms[i].phi - ms[i - 1].phi) > 0.01 * scale)
                    continue;
                const double sum = ms[i].I1 + ms[i].I2 + ms[i].I3;
                worst = std::max(worst, std::abs(ms[i].dphi_fd - sum) /
                                            std::max(std::abs(ms[i].dphi_fd), floor));
            }
            e.pass = worst <= e.tolerance;
            e.margin_or_ratio = worst;
        } else {
            e.pass = false;
            e.margin_or_ratio = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(e);

        // ODI fit: infeasibility is a diagnostic outcome, not a failure
        if (ms.size() >= 3) {
            const OdiFit fit = odi_fit(ms, mc.gamma, mc.s0, mp.N, mp.k, mc.theta1);
            DiagnosticEntry f;
            f.name = "odi_fit_m" + std::to_string(mi + 1);
            f.pass = true;
            f.margin_or_ratio = fit.feasible ? fit.C1 : 0.0;
            f.tolerance = 0.0;
            out.push_back(f);
        }
    }

    // pointwise inequality suite over the stored snapshots
    for (size_t mi = 0; mi < run.moments.size(); ++mi) {
        const MomentConfig& mc = run.moments[mi];
        double worst35 = 0.0, worst_margin = std::numeric_limits<double>::infinity();
        bool lem35_ok = true;
        try {
            for (const State& st : run.snapshots) {
                const auto pts = lem35_sample_points(mc.s0);
                const double r =
                    check_lem35(st, mc.gamma, mc.s0, mp.N, mp.k, run.grid, pts);
                if (!std::isfinite(r)) lem35_ok = false;
                worst35 = std::max(worst35, r);
                const EnvelopeTrace env = empirical_envelopes(st, mc.p, mp.N, run.grid);
                worst_margin = std::min(worst_margin, check_I2_lower(st, mc.gamma, mc.s0, mp,
                                                                     run.grid, chi, env.Cv_emp));
            }
        } catch (const std::exception&) {  // e.g. alpha outside (0,1) on contrast runs
            lem35_ok = false;
            worst35 = std::numeric_limits<double>::quiet_NaN();
            worst_margin = std::numeric_limits<double>::quiet_NaN();
        }
        DiagnosticEntry l35;
        l35.name = "lem35_ratio_m" + std::to_string(mi + 1);
        l35.tolerance = 1.01;
        l35.margin_or_ratio = worst35;
        l35.pass = lem35_ok && worst35 <= l35.tolerance && !run.snapshots.empty();
        out.push_back(l35);

        DiagnosticEntry i2;
        i2.name = "I2_lower_margin_m" + std::to_string(mi + 1);
        i2.tolerance = 0.0;
        i2.margin_or_ratio = worst_margin;
        i2.pass = !run.snapshots.empty() && worst_margin >= -1e-12 * std::max(1.0, mp.M0);
        out.push_back(i2);

        // initial moment bound on the t=0 snapshot
        DiagnosticEntry im;
        im.name = "initial_moment_margin_m" + std::to_string(mi + 1);
        im.tolerance = 0.0;
        if (!run.snapshots.empty()) {
            const double rn = std::pow(run.config.r1, mp.N);
            double eta_frac = 1.0 - rn / mc.s0;
            eta_frac = std::clamp(eta_frac, 0.05, 0.95);
            try {
                im.margin_or_ratio = check_initial_moment(run.snapshots.front(), mc.gamma,
                                                          mc.s0, eta_frac, mp.M1, run.grid);
                im.pass = im.margin_or_ratio >= 0.0;
            } catch (const std::exception&) {
                im.pass = false;
                im.margin_or_ratio = std::numeric_limits<double>::quiet_NaN();
            }
        } else {
            im.pass = false;
        }
        out.push_back(im);

        // Lemma 3.8 bound at the exponents the I3 estimate uses
        DiagnosticEntry l38;
        l38.name = "lemma38_ratio_m" + std::to_string(mi + 1);
        const double a_use = 2.0 - 2.0 / mp.N - 0.5 * mc.alpha;
        if (a_use > 1.0 && a_use < 2.0) {
            const double r64 = lemma38_ratio(a_use, 0.5, mc.s0, 64);
            const double r128 = lemma38_ratio(a_use, 0.5, mc.s0, 128);
            l38.margin_or_ratio = r128;
            l38.tolerance = 0.05;
            l38.refinement_order_observed = std::abs(r128 - r64) / std::max(r128, 1e-300);
            l38.pass = std::isfinite(r128) && *l38.refinement_order_observed <= l38.tolerance;
        } else {
            l38.pass = false;
            l38.margin_or_ratio = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(l38);
    }

    // series-level invariants
    {
        DiagnosticEntry vm;
        vm.name = "v_min_above_eta";
        const double eta = eta_lower_bound(mp.M0, mp.N, 2.0 * mp.R);
        double worst = std::numeric_limits<double>::infinity();
        for (const SeriesSample& s : run.series.samples) worst = std::min(worst, s.v_min);
        vm.margin_or_ratio = worst - eta;
        vm.tolerance = 0.0;
        vm.pass = worst >= eta * (1.0 - 1e-9);
        out.push_back(vm);

        DiagnosticEntry md;
        md.name = "mass_drift_rel";
        const double m0 = run.series.samples.front().mass_u;
        double drift = 0.0;
        for (const SeriesSample& s : run.series.samples)
            drift = std::max(drift, std::abs(s.mass_u - m0) / mp.M0);
        md.margin_or_ratio = drift;
        md.tolerance = 1e-4;
        md.pass = drift <= md.tolerance;
        out.push_back(md);

        DiagnosticEntry wm;
        wm.name = "w_nondecreasing_snapshots";
        bool mono = !run.snapshots.empty();
        for (const State& st : run.snapshots)
            for (size_t j = 1; j < st.w.size(); ++j)
                if (st.w[j] < st.w[j - 1] - 1e-12 * std::max(1.0, mp.M0)) mono = false;
        wm.pass = mono;
        wm.margin_or_ratio = mono ? 1.0 : 0.0;
        out.push_back(wm);
    }
    return out;
}

std::string diagnostics_to_json(const std::vector<DiagnosticEntry>& entries) {
    ordered_json j;
    ordered_json arr = ordered_json::array();
    bool all = true;
    for (const DiagnosticEntry& e : entries) {
        ordered_json o;
        o["name"] = e.name;
        o["pass"] = e.pass;
        if (std::isfinite(e.margin_or_ratio))
            o["margin_or_ratio"] = e.margin_or_ratio;
        else
            o["margin_or_ratio"] = nullptr;
        o["tolerance"] = e.tolerance;
        if (e.refinement_order_observed)
            o["refinement_order_observed"] = *e.refinement_order_observed;
        else
            o["refinement_order_observed"] = nullptr;
        arr.push_back(o);
        all = all && e.pass;
    }
    j["all_pass"] = all;
    j["checks"] = arr;
    return j.dump(2) + "\n";
}

std::vector<SweepCell> run_sweep(const RunConfig& base, const std::vector<double>& m_values,
                                 const std::vector<double>& k_values, int threads) {
    std::vector<SweepCell> cells(m_values.size() * k_values.size());
    std::atomic<size_t> cursor{0};
    const size_t total = cells.size();

    auto worker = [&]() {
        for (;;) {
            const size_t idx = cursor.fetch_add(1);
            if (idx >= total) return;
            const double m = m_values[idx / k_values.size()];
            const double k = k_values[idx % k_values.size()];
            SweepCell& cell = cells[idx];
            cell.m = m;
            cell.k = k;
            try {
                RunConfig cfg = base;
                cfg.model.m = m;
                cfg.model.k = k;
                cfg.validate();
                const AdmissibilityReport rep = check_conditions(cfg.model);
                cell.admissible = rep.admissible;
                const RadialGrid grid(cfg.model.N, cfg.model.R, cfg.cells, cfg.grading);
                const State init =
                    build_initial_data(cfg.model, envelope_exponent(cfg), cfg.r1, grid);
                RunOptions opts;
                opts.moments = resolve_moments(cfg);
                opts.record_moment_terms = false;
                const RunResult res = run(cfg.model, grid, cfg.control, init, opts);
                cell.verdict = to_string(res.report.verdict);
                cell.t_last = res.report.t_last;
                cell.u_max_last = res.report.u_max_last;
            } catch (const std::exception& e) {
                cell.error = e.what();
                cell.verdict = "error";
            }
        }
    };

    const int n = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int i = 0; i < n - 1; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();
    return cells;
}

std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
    std::ostringstream out;
    out << "m,k,admissible,verdict,t_last,u_max_last,error\n";
    for (const SweepCell& c : cells)
        out << format_shortest(c.m) << ',' << format_shortest(c.k) << ','
            << (c.admissible ? 1 : 0) << ',' << c.verdict << ',' << format_shortest(c.t_last)
            << ',' << format_shortest(c.u_max_last) << ',' << c.error << "\n";
    return out.str();
}

namespace {

double observed_order(double coarse, double mid, double fine) {
    if (!(coarse > 0.0) || !(mid > 0.0) || !(fine > 0.0)) return 0.0;
    return std::log2(coarse / mid) * 0.5 + std::log2(mid / fine) * 0.5;
}

}  // namespace

RefinementReport run_refinement(const RunConfig& config, int levels) {
    if (levels < 3) throw std::invalid_argument("run_refinement: need >= 3 levels");
    RefinementReport rep;
    const ModelParams& mp = config.model;

    // elliptic: manufactured v*(r) = 2 + cos(pi r / R), u* = v* - Lap v*
    {
        std::vector<double> errs;
        int cells = config.cells;
        for (int l = 0; l < levels; ++l, cells *= 2) {
            const RadialGrid grid(mp.N, mp.R, cells, config.grading);
            std::vector<double> u(grid.nodes()), vstar(grid.nodes());
            const double pr = M_PI / mp.R;
            for (int j = 0; j < grid.nodes(); ++j) {
                const double r = grid.r[j];
                const double x = pr * r;
                vstar[j] = 2.0 + std::cos(x);
                const double lap = (r == 0.0)
                                       ? -mp.N * pr * pr
                                       : -pr * pr * std::cos(x) - (mp.N - 1) * pr * std::sin(x) / r;
                u[j] = vstar[j] - lap;
            }
            const EllipticResult sol = solve_elliptic(grid, u);
            double err = 0.0;
            for (int j = 0; j < grid.nodes(); ++j)
                err = std::max(err, std::abs(sol.v[j] - vstar[j]));
            errs.push_back(err);
            rep.csv_rows.push_back("elliptic," + std::to_string(l) + ",max_err," +
                                   format_shortest(err));
        }
        rep.elliptic_order = observed_order(errs[levels - 3], errs[levels - 2], errs[levels - 1]);
    }

    const RadialGrid grid(mp.N, mp.R, config.cells, config.grading);
    const State init = build_initial_data(mp, envelope_exponent(config), config.r1, grid);
    RunOptions opts;
    opts.moments = resolve_moments(config);

    // dt order: Richardson triple at fixed grid
    {
        std::vector<std::vector<double>> ws;
        const double dt0 = config.control.dt_init;
        for (int l = 0; l < 3; ++l) {
            const RunResult r =
                run_fixed_dt(mp, grid, dt0 / (1 << l), config.control.t_end, init, opts);
            if (r.solver_failure) throw std::runtime_error("refinement: run failed: " + r.failure_reason);
            ws.push_back(r.last_state.w);
        }
        double e01 = 0.0, e12 = 0.0;
        for (size_t j = 0; j < ws[0].size(); ++j) {
            e01 = std::max(e01, std::abs(ws[0][j] - ws[1][j]));
            e12 = std::max(e12, std::abs(ws[1][j] - ws[2][j]));
        }
        rep.parabolic_dt_order = std::log2(e01 / e12);
        rep.csv_rows.push_back("parabolic_dt,0,richardson_err," + format_shortest(e01));
        rep.csv_rows.push_back("parabolic_dt,1,richardson_err," + format_shortest(e12));
    }

    // identity residual order: refine (cells, dt) together
    {
        std::vector<double> devs;
        int cells = config.cells;
        double dt = config.control.dt_init;
        for (int l = 0; l < levels; ++l, cells *= 2, dt *= 0.5) {
            const RadialGrid g(mp.N, mp.R, cells, config.grading);
            const State i0 = build_initial_data(mp, envelope_exponent(config), config.r1, g);
            RunOptions o;
            o.moments = resolve_moments(config);
            const RunResult r = run_fixed_dt(mp, g, dt, config.control.t_end, i0, o);
            if (r.solver_failure) throw std::runtime_error("refinement: run failed: " + r.failure_reason);
            std::vector<MomentSample> ms;
            for (const SeriesSample& s : r.series.samples) {
                MomentSample m;
                m.t = s.t;
                m.phi = s.phi[0];
                m.I1 = s.I1[0];
                m.I2 = s.I2[0];
                m.I3 = s.I3[0];
                ms.push_back(m);
            }
            fill_dphi_fd(ms);
            const MomentConfig& mc = o.moments[0];
            const double floor = 1e-12 * std::max(1.0, mp.M0 * std::pow(mc.s0, 2.0 - mc.gamma));
            const IdentityReport idr = check_identity(ms, 1.0, floor);
            devs.push_back(idr.max_rel_deviation);
            rep.csv_rows.push_back("identity," + std::to_string(l) + ",max_rel_dev," +
                                   format_shortest(idr.max_rel_deviation));
        }
        rep.identity_order =
            observed_order(devs[levels - 3], devs[levels - 2], devs[levels - 1]);
    }
    return rep;
}

std::string refinement_to_csv(const RefinementReport& rep) {
    std::ostringstream out;
    out << "study,level,metric,value\n";
    for (const std::string& row : rep.csv_rows) out << row << "\n";
    out << "elliptic,,observed_order," << format_shortest(rep.elliptic_order) << "\n";
    out << "parabolic_dt,,observed_order," << format_shortest(rep.parabolic_dt_order) << "\n";
    out << "identity,,observed_order," << format_shortest(rep.identity_order) << "\n";
    return out.str();
}

}  // namespace kslab
