#pragma once

#include <string>
#include <vector>

#include "kslab/config.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/stepping.hpp"

namespace kslab {

struct SimulationArtifacts {
    RunResult result;
    std::vector<MomentConfig> moments;
    std::string out_dir;
};

// Runs the configured simulation and writes timeseries.csv, snapshot CSVs,
// config_resolved.cfg and report.json into config.output_dir (created if
// missing). Deterministic: identical configs give byte-identical files.
SimulationArtifacts simulate_to_directory(const RunConfig& config);

struct DiagnosticEntry {
    std::string name;
    bool pass = false;
    double margin_or_ratio = 0.0;
    double tolerance = 0.0;
    std::optional<double> refinement_order_observed;
};

// Re-reads a directory produced by simulate_to_directory and evaluates the
// inequality/identity suite on the stored series and snapshots.
std::vector<DiagnosticEntry> diagnose_directory(const std::string& run_dir);

std::string diagnostics_to_json(const std::vector<DiagnosticEntry>& entries);

struct SweepCell {
    double m = 0.0;
    double k = 0.0;
    bool admissible = false;
    std::string verdict;
    double t_last = 0.0;
    double u_max_last = 0.0;
    std::string error;  // per-cell failure, sweep continues
};

// Runs the (m,k) grid; cells execute in parallel on `threads` workers but
// the output order is fixed by the grid, so results are deterministic.
std::vector<SweepCell> run_sweep(const RunConfig& base, const std::vector<double>& m_values,
                                 const std::vector<double>& k_values, int threads);

std::string sweep_to_csv(const std::vector<SweepCell>& cells);

struct RefinementReport {
    double elliptic_order = 0.0;
    double parabolic_dt_order = 0.0;
    double identity_order = 0.0;
    std::vector<std::string> csv_rows;
};

// Convergence study on a smooth pre-blow-up window of the configured run.
RefinementReport run_refinement(const RunConfig& config, int levels);

std::string refinement_to_csv(const RefinementReport& report);

}  // namespace kslab
