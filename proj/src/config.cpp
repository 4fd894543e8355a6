#include "kslab/config.hpp"

#include <sstream>
#include <stdexcept>

#include "kslab/text_io.hpp"

namespace kslab {

void RunConfig::validate() const {
    model.validate();
    control.validate();
    if (cells < 8) throw std::invalid_argument("config: cells must be >= 8");
    if (!(grading >= 1.0)) throw std::invalid_argument("config: grading must be >= 1");
    if (moments.empty()) throw std::invalid_argument("config: at least one moment entry required");
    for (const MomentSpec& m : moments) {
        if (!(m.s0_fraction > 0.0 && m.s0_fraction <= 1.0))
            throw std::invalid_argument("config: moment s0_fraction outside (0,1]");
        if (m.gamma && !(*m.gamma > 0.0 && *m.gamma < 1.0))
            throw std::invalid_argument("config: moment gamma outside (0,1)");
    }
    if (!(r1 > 0.0 && r1 < model.R)) throw std::invalid_argument("config: r1 outside (0,R)");
    if (eps0 && !(*eps0 > 0.0)) throw std::invalid_argument("config: eps0 must be > 0");
}

namespace {

double want_number(const std::string& key, const std::string& value, int line) {
    const auto num = parse_double(value);
    if (!num)
        throw std::runtime_error("config line " + std::to_string(line) + ": bad number for '" +
                                 key + "': " + value);
    return *num;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.moments.clear();
    cfg.snapshot_times.clear();
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        if (tokens.size() == 1 && tokens[0].front() == '[' && tokens[0].back() == ']') {
            section = tokens[0].substr(1, tokens[0].size() - 2);
            continue;
        }
        if (tokens.size() < 3 || tokens[1] != "=")
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string& key = tokens[0];
        const std::string& val = tokens[2];
        const std::string qual = section + "." + key;

        if (qual == "model.N") cfg.model.N = static_cast<int>(want_number(key, val, lineno));
        else if (qual == "model.R") cfg.model.R = want_number(key, val, lineno);
        else if (qual == "model.m") cfg.model.m = want_number(key, val, lineno);
        else if (qual == "model.chi0") cfg.model.chi0 = want_number(key, val, lineno);
        else if (qual == "model.a") cfg.model.a = want_number(key, val, lineno);
        else if (qual == "model.k") cfg.model.k = want_number(key, val, lineno);
        else if (qual == "model.M0") cfg.model.M0 = want_number(key, val, lineno);
        else if (qual == "model.M1") cfg.model.M1 = want_number(key, val, lineno);
        else if (qual == "model.L") cfg.model.L = want_number(key, val, lineno);
        else if (qual == "grid.cells") cfg.cells = static_cast<int>(want_number(key, val, lineno));
        else if (qual == "grid.grading") cfg.grading = want_number(key, val, lineno);
        else if (qual == "control.dt_init") cfg.control.dt_init = want_number(key, val, lineno);
        else if (qual == "control.dt_min") cfg.control.dt_min = want_number(key, val, lineno);
        else if (qual == "control.dt_max") cfg.control.dt_max = want_number(key, val, lineno);
        else if (qual == "control.cfl_safety") cfg.control.cfl_safety = want_number(key, val, lineno);
        else if (qual == "control.c_growth") cfg.control.c_growth = want_number(key, val, lineno);
        else if (qual == "control.U_blow") cfg.control.U_blow = want_number(key, val, lineno);
        else if (qual == "control.max_steps")
            cfg.control.max_steps = static_cast<long>(want_number(key, val, lineno));
        else if (qual == "control.t_end") cfg.control.t_end = want_number(key, val, lineno);
        else if (qual == "control.bounded_factor")
            cfg.control.bounded_factor = want_number(key, val, lineno);
        else if (qual == "control.tol_neg_factor")
            cfg.control.tol_neg_factor = want_number(key, val, lineno);
        else if (qual == "moments.moment") {
            if (tokens.size() != 4)
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": moment needs 'moment = <gamma|auto> <s0_fraction>'");
            MomentSpec spec;
            if (val != "auto") spec.gamma = want_number(key, val, lineno);
            spec.s0_fraction = want_number(key, tokens[3], lineno);
            cfg.moments.push_back(spec);
        } else if (qual == "initial.r1") cfg.r1 = want_number(key, val, lineno);
        else if (qual == "initial.eps0") {
            if (val != "auto") cfg.eps0 = want_number(key, val, lineno);
        } else if (qual == "output.dir") cfg.output_dir = val;
        else if (qual == "output.seed")
            cfg.seed = static_cast<unsigned long>(want_number(key, val, lineno));
        else if (qual == "output.snapshot_times") {
            for (size_t i = 2; i < tokens.size(); ++i)
                cfg.snapshot_times.push_back(want_number(key, tokens[i], lineno));
        } else {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": unknown key '" + qual + "'");
        }
    }
    if (cfg.moments.empty()) cfg.moments.push_back(MomentSpec{});
    return cfg;
}

RunConfig load_config(const std::string& path) {
    return parse_config(read_text_file(path));
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "[model]\n";
    out << "N = " << c.model.N << "\n";
    out << "R = " << format_shortest(c.model.R) << "\n";
    out << "m = " << format_shortest(c.model.m) << "\n";
    out << "chi0 = " << format_shortest(c.model.chi0) << "\n";
    out << "a = " << format_shortest(c.model.a) << "\n";
    out << "k = " << format_shortest(c.model.k) << "\n";
    out << "M0 = " << format_shortest(c.model.M0) << "\n";
    out << "M1 = " << format_shortest(c.model.M1) << "\n";
    out << "L = " << format_shortest(c.model.L) << "\n";
    out << "\n[grid]\n";
    out << "cells = " << c.cells << "\n";
    out << "grading = " << format_shortest(c.grading) << "\n";
    out << "\n[control]\n";
    out << "dt_init = " << format_shortest(c.control.dt_init) << "\n";
    out << "dt_min = " << format_shortest(c.control.dt_min) << "\n";
    out << "dt_max = " << format_shortest(c.control.dt_max) << "\n";
    out << "cfl_safety = " << format_shortest(c.control.cfl_safety) << "\n";
    out << "c_growth = " << format_shortest(c.control.c_growth) << "\n";
    out << "U_blow = " << format_shortest(c.control.U_blow) << "\n";
    out << "max_steps = " << c.control.max_steps << "\n";
    out << "t_end = " << format_shortest(c.control.t_end) << "\n";
    out << "bounded_factor = " << format_shortest(c.control.bounded_factor) << "\n";
    out << "tol_neg_factor = " << format_shortest(c.control.tol_neg_factor) << "\n";
    out << "\n[initial]\n";
    out << "r1 = " << format_shortest(c.r1) << "\n";
    out << "eps0 = " << (c.eps0 ? format_shortest(*c.eps0) : std::string("auto")) << "\n";
    out << "\n[moments]\n";
    for (const MomentSpec& m : c.moments)
        out << "moment = " << (m.gamma ? format_shortest(*m.gamma) : std::string("auto")) << " "
            << format_shortest(m.s0_fraction) << "\n";
    out << "\n[output]\n";
    out << "dir = " << c.output_dir << "\n";
    out << "seed = " << c.seed << "\n";
    if (!c.snapshot_times.empty()) {
        out << "snapshot_times =";
        for (double t : c.snapshot_times) out << " " << format_shortest(t);
        out << "\n";
    }
    return out.str();
}

std::vector<MomentConfig> resolve_moments(const RunConfig& config) {
    std::vector<MomentConfig> out;
    for (const MomentSpec& spec : config.moments) {
        std::optional<double> gamma = spec.gamma;
        if (!gamma) {
            // "auto": admissible parameters give the interval midpoint;
            // contrast runs fall back to the center of (0,1)
            try {
                const AdmissibilityReport rep = check_conditions(config.model);
                if (rep.admissible && rep.gamma_interval)
                    gamma = 0.5 * (rep.gamma_interval->lo + rep.gamma_interval->hi);
            } catch (const std::exception&) {
            }
            if (!gamma) gamma = 0.5;
        }
        out.push_back(make_moment_config(config.model, spec.s0_fraction, gamma));
    }
    return out;
}

}  // namespace kslab
