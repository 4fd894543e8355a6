#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kslab/params.hpp"
#include "kslab/stepping.hpp"

namespace kslab {

// One moment-functional request: gamma either explicit or "auto"
// (resolved to the midpoint of the admissible gamma interval).
struct MomentSpec {
    std::optional<double> gamma;  // nullopt = auto
    double s0_fraction = 0.5;     // s0 = fraction * R^N
};

// Full run configuration; parsed from the flat key-value format with
// [section] headers (see parse_config).
struct RunConfig {
    ModelParams model;
    int cells = 1024;
    double grading = 2.0;
    StepControl control;
    std::vector<MomentSpec> moments;
    std::vector<double> snapshot_times;
    std::string output_dir = "out";
    unsigned long seed = 0;

    // initial-data shape
    double r1 = 0.2;              // concentration radius
    std::optional<double> eps0;   // nullopt = default_eps0

    void validate() const;
};

// Parses the text format; throws std::runtime_error with a line-numbered
// message on malformed input.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical serialization (full-precision numbers); parse(serialize(c))
// reproduces c exactly.
std::string serialize_config(const RunConfig& config);

// Resolved moment configs for this run ("auto" gammas filled in).
std::vector<MomentConfig> resolve_moments(const RunConfig& config);

}  // namespace kslab
