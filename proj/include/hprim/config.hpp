#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "hprim/stepper.hpp"

namespace hprim {

/// Run configuration: key = value text with [section] headers.
struct RunConfig {
    // [grid]
    int nx = 32, ny = 32, nz = 17;
    double b = 1.0;
    double box_scale = 1.0;
    // [physics]
    double g = 9.8, f = 0.0, P0 = 0.0;
    // [run]
    double dt = 1e-3, t_max = 1.0;
    int output_every = 50;
    std::string scheme = "backward-euler"; // or "bdf2"
    bool dealias = true;
    // [ic]
    std::string ic_name = "surface-bump";
    double amplitude = 1e-3;
    unsigned long seed = 1;
    double gamma = 0.0;
    // [output]
    std::string directory = "out";
    int snapshot_every = 0;

    GridSpec grid_spec() const {
        GridSpec s;
        s.nx = nx;
        s.ny = ny;
        s.nz = nz;
        s.b = b;
        s.box_scale = box_scale;
        s.g = g;
        s.f = f;
        s.P0 = P0;
        s.validate();
        return s;
    }

    StepperConfig stepper_config() const {
        StepperConfig c;
        c.dt = dt;
        c.t_max = t_max;
        c.output_every = output_every;
        c.snapshot_every = snapshot_every;
        c.dealias = dealias;
        c.neg_norm_gamma = gamma;
        if (scheme == "backward-euler")
            c.scheme = Scheme::backward_euler;
        else if (scheme == "bdf2")
            c.scheme = Scheme::bdf2;
        else
            throw ConfigError(0, "unknown scheme '" + scheme + "'");
        c.validate();
        return c;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, int line) {
    size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (...) {
        throw ConfigError(line, "expected a number, got '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(line, "trailing junk after number '" + v + "'");
    return x;
}

inline long parse_int(const std::string& v, int line) {
    size_t pos = 0;
    long x;
    try {
        x = std::stol(v, &pos);
    } catch (...) {
        throw ConfigError(line, "expected an integer, got '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(line, "trailing junk after integer '" + v + "'");
    return x;
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError(line, "expected on/off, got '" + v + "'");
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        size_t hash = s.find_first_of("#;");
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(line, "unterminated section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section != "grid" && section != "physics" && section != "run" &&
                section != "ic" && section != "output")
                throw ConfigError(line, "unknown section [" + section + "]");
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
        std::string key = detail::trim(s.substr(0, eq));
        std::string val = detail::trim(s.substr(eq + 1));
        if (key.empty() || val.empty()) throw ConfigError(line, "empty key or value");

        auto unknown = [&]() {
            throw ConfigError(line, "unknown key '" + key + "' in section [" + section + "]");
        };
        if (section == "grid") {
            if (key == "nx") c.nx = static_cast<int>(detail::parse_int(val, line));
            else if (key == "ny") c.ny = static_cast<int>(detail::parse_int(val, line));
            else if (key == "nz") c.nz = static_cast<int>(detail::parse_int(val, line));
            else if (key == "b") c.b = detail::parse_double(val, line);
            else if (key == "box_scale") c.box_scale = detail::parse_double(val, line);
            else unknown();
        } else if (section == "physics") {
            if (key == "g") c.g = detail::parse_double(val, line);
            else if (key == "f") c.f = detail::parse_double(val, line);
            else if (key == "P0") c.P0 = detail::parse_double(val, line);
            else unknown();
        } else if (section == "run") {
            if (key == "dt") c.dt = detail::parse_double(val, line);
            else if (key == "t_max") c.t_max = detail::parse_double(val, line);
            else if (key == "output_every") c.output_every = static_cast<int>(detail::parse_int(val, line));
            else if (key == "scheme") c.scheme = val;
            else if (key == "dealias") c.dealias = detail::parse_bool(val, line);
            else unknown();
        } else if (section == "ic") {
            if (key == "name") c.ic_name = val;
            else if (key == "amplitude") c.amplitude = detail::parse_double(val, line);
            else if (key == "seed") c.seed = static_cast<unsigned long>(detail::parse_int(val, line));
            else if (key == "gamma") c.gamma = detail::parse_double(val, line);
            else unknown();
        } else if (section == "output") {
            if (key == "directory") c.directory = val;
            else if (key == "snapshot_every") c.snapshot_every = static_cast<int>(detail::parse_int(val, line));
            else unknown();
        } else {
            throw ConfigError(line, "key '" + key + "' outside any section");
        }
    }
    return c;
}

inline std::string serialize_config(const RunConfig& c) {
    std::ostringstream o;
    o.precision(17);
    o << "[grid]\n"
      << "nx = " << c.nx << "\nny = " << c.ny << "\nnz = " << c.nz << "\nb = " << c.b
      << "\nbox_scale = " << c.box_scale << "\n\n[physics]\ng = " << c.g << "\nf = " << c.f
      << "\nP0 = " << c.P0 << "\n\n[run]\ndt = " << c.dt << "\nt_max = " << c.t_max
      << "\noutput_every = " << c.output_every << "\nscheme = " << c.scheme
      << "\ndealias = " << (c.dealias ? "on" : "off") << "\n\n[ic]\nname = " << c.ic_name
      << "\namplitude = " << c.amplitude << "\nseed = " << c.seed << "\ngamma = " << c.gamma
      << "\n\n[output]\ndirectory = " << c.directory << "\nsnapshot_every = " << c.snapshot_every
      << "\n";
    return o.str();
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

} // namespace hprim
