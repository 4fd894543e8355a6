// kslab: radially symmetric chemotaxis blow-up laboratory.
// Subcommands: check, simulate, diagnose, sweep, refine.
// Exit codes: 0 ok, 1 config error, 2 solver failure, 3 diagnostic failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kslab/config.hpp"
#include "kslab/params.hpp"
#include "kslab/simulate.hpp"
#include "kslab/text_io.hpp"

using namespace kslab;
using ordered_json = nlohmann::ordered_json;

namespace {

int cmd_check(const std::string& config_path) {
    const RunConfig cfg = load_config(config_path);
    cfg.validate();
    const AdmissibilityReport rep = check_conditions(cfg.model);

    ordered_json j;
    j["admissible"] = rep.admissible;
    j["m_upper"] = rep.m_upper;
    j["k_upper"] = rep.k_upper;
    if (rep.eps0_max) {
        if (rep.eps0_max->unbounded)
            j["eps0_max"] = "unbounded";
        else
            j["eps0_max"] = rep.eps0_max->value;
    } else {
        j["eps0_max"] = nullptr;
    }
    if (rep.gamma_interval) {
        j["gamma_interval"] = {rep.gamma_interval->lo, rep.gamma_interval->hi};
    } else {
        j["gamma_interval"] = nullptr;
    }
    j["messages"] = rep.messages;
    j["eta"] = eta_lower_bound(cfg.model.M0, cfg.model.N, 2.0 * cfg.model.R);
    if (rep.admissible) {
        const double eps0 = cfg.eps0 ? *cfg.eps0
                                     : default_eps0(cfg.model.N, cfg.model.m, cfg.model.k);
        j["eps0"] = eps0;
        j["p"] = p_of_eps(cfg.model.N, cfg.model.m, eps0);
        j["theta1"] = theta1_of(cfg.model.N, cfg.model.m, cfg.model.k, eps0);
        const double gmid = 0.5 * (rep.gamma_interval->lo + rep.gamma_interval->hi);
        j["gamma_default"] = gmid;
        j["alpha_default"] = alpha_of_gamma(gmid, cfg.model.N, cfg.model.k);
    }

    std::cout << (rep.admissible ? "admissible" : "inadmissible") << "  (m_upper="
              << format_shortest(rep.m_upper) << ", k_upper=" << format_shortest(rep.k_upper)
              << ")\n";
    for (const std::string& m : rep.messages) std::cout << "  violation: " << m << "\n";
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_override) {
    RunConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    const SimulationArtifacts art = simulate_to_directory(cfg);
    std::cout << "verdict: " << to_string(art.result.report.verdict)
              << "  t_last=" << format_shortest(art.result.report.t_last)
              << "  u_max=" << format_shortest(art.result.report.u_max_last)
              << "  steps=" << art.result.series.samples.size() - 1 << "\n";
    std::cout << "outputs in " << art.out_dir << "\n";
    return art.result.solver_failure ? 2 : 0;
}

int cmd_diagnose(const std::string& run_dir) {
    const std::vector<DiagnosticEntry> entries = diagnose_directory(run_dir);
    const std::string json = diagnostics_to_json(entries);
    write_text_file(run_dir + "/diagnostics.json", json);
    std::cout << json;
    bool all = true;
    for (const DiagnosticEntry& e : entries) all = all && e.pass;
    return all ? 0 : 3;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              double m_lo, double m_hi, int m_count, double k_lo, double k_hi, int k_count,
              int threads) {
    RunConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    std::vector<double> ms, ks;
    for (int i = 0; i < m_count; ++i)
        ms.push_back(m_count == 1 ? m_lo : m_lo + (m_hi - m_lo) * i / (m_count - 1));
    for (int i = 0; i < k_count; ++i)
        ks.push_back(k_count == 1 ? k_lo : k_lo + (k_hi - k_lo) * i / (k_count - 1));
    const auto cells = run_sweep(cfg, ms, ks, threads);
    std::filesystem::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir + "/phase.csv", sweep_to_csv(cells));
    std::cout << "sweep of " << cells.size() << " cells written to " << cfg.output_dir
              << "/phase.csv\n";
    return 0;
}

int cmd_refine(const std::string& config_path, const std::string& out_override, int levels) {
    RunConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    const RefinementReport rep = run_refinement(cfg, levels);
    std::filesystem::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir + "/convergence.csv", refinement_to_csv(rep));
    std::cout << "elliptic order " << format_shortest(rep.elliptic_order) << ", dt order "
              << format_shortest(rep.parabolic_dt_order) << ", identity order "
              << format_shortest(rep.identity_order) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial chemotaxis blow-up laboratory"};
    app.require_subcommand(1);

    std::string config_path, run_dir, out_dir;
    int threads = 1, levels = 3;
    double m_lo = 1.0, m_hi = 1.3, k_lo = 0.2, k_hi = 0.9;
    int m_count = 4, k_count = 4;

    auto* check = app.add_subcommand("check", "admissibility arithmetic for a config");
    check->add_option("--config", config_path, "config file")->required();

    auto* simulate = app.add_subcommand("simulate", "run one simulation to files");
    simulate->add_option("--config", config_path, "config file")->required();
    simulate->add_option("--out", out_dir, "output directory override");

    auto* diagnose = app.add_subcommand("diagnose", "inequality suite over a finished run");
    diagnose->add_option("run_dir", run_dir, "directory produced by simulate")->required();

    auto* sweep = app.add_subcommand("sweep", "phase diagram over an (m,k) grid");
    sweep->add_option("--config", config_path, "base config file")->required();
    sweep->add_option("--out", out_dir, "output directory override");
    sweep->add_option("--m-lo", m_lo);
    sweep->add_option("--m-hi", m_hi);
    sweep->add_option("--m-count", m_count);
    sweep->add_option("--k-lo", k_lo);
    sweep->add_option("--k-hi", k_hi);
    sweep->add_option("--k-count", k_count);
    sweep->add_option("--threads", threads, "parallel cells");

    auto* refine = app.add_subcommand("refine", "convergence study on a smooth window");
    refine->add_option("--config", config_path, "config file")->required();
    refine->add_option("--out", out_dir, "output directory override");
    refine->add_option("--levels", levels, "refinement levels (>= 3)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(config_path);
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir);
        if (diagnose->parsed()) return cmd_diagnose(run_dir);
        if (sweep->parsed())
            return cmd_sweep(config_path, out_dir, m_lo, m_hi, m_count, k_lo, k_hi, k_count,
                             threads);
        if (refine->parsed()) return cmd_refine(config_path, out_dir, levels);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
