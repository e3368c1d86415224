#pragma once

// Flat key=value parameter files. Lines are `key = value`, blank lines and
// #-comments allowed; keys mirror the TrackerParams fields. Unknown keys are
// rejected so typos fail loudly.

#include <fstream>
#include <sstream>
#include <string>

#include "stp/engine.hpp"
#include "stp/errors.hpp"

namespace stp {

namespace detail {

inline std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError("bad boolean for " + key + ": " + v);
}

}  // namespace detail

inline void apply_param(TrackerParams& p, const std::string& key, const std::string& value) {
    try {
        if (key == "delta") p.delta = std::stoi(value);
        else if (key == "t_update") p.t_update = std::stoi(value);
        else if (key == "t_d") p.t_d = std::stod(value);
        else if (key == "p_plus") p.p_plus = std::stod(value);
        else if (key == "p_minus") p.p_minus = std::stod(value);
        else if (key == "n_max") p.n_max = std::stoi(value);
        else if (key == "t_v_factor") p.t_v_factor = std::stod(value);
        else if (key == "sigma_smooth") p.sigma_smooth = std::stod(value);
        else if (key == "agree_radius") p.agree_radius = std::stoi(value);
        else if (key == "lambda_scale") p.lambda_scale = std::stod(value);
        else if (key == "mean_center") p.mean_center = detail::parse_bool(value, key);
        else if (key == "mode") p.mode = parse_tracker_mode(value);
        else throw ConfigError("unknown parameter: " + key);
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value for " + key + ": " + value);
    } catch (const std::out_of_range&) {
        throw ConfigError("bad value for " + key + ": " + value);
    }
}

inline TrackerParams parse_params(std::istream& in, TrackerParams base = {}) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        const size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value on line " + std::to_string(lineno));
        const std::string key = detail::trim(trimmed.substr(0, eq));
        const std::string value = detail::trim(trimmed.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("expected key=value on line " + std::to_string(lineno));
        apply_param(base, key, value);
    }
    base.validate();
    return base;
}

inline TrackerParams load_params(const std::string& path, TrackerParams base = {}) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open parameter file: " + path);
    return parse_params(in, base);
}

}  // namespace stp
