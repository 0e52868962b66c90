#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "selftrap/params.hpp"

namespace selftrap {

// Key/value parameter file.  Two blocks are understood:
//   mode = physical   kappa, coupling, wavelength, power, drive_ratio,
//                     sphere_radius, sphere_density, phase, delta1, delta2 (Hz)
//                     (+ waist, cavity_length: accepted for documentation only)
//   mode = scaled     eps2, kappa_a, drive_ratio, phase, delta1, delta2 (units of A)
// '#' starts a comment; keys are case-sensitive.
struct Config {
    std::string mode = "physical";
    std::map<std::string, double> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    double get(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end())
            throw InvalidParameterError("config: missing required key '" + key + "'");
        return it->second;
    }
    double get_or(const std::string& key, double fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& text, int lineno) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw InvalidParameterError("config line " + std::to_string(lineno)
                                    + ": not a number: '" + text + "'");
    }
    if (pos != text.size())
        throw InvalidParameterError("config line " + std::to_string(lineno)
                                    + ": trailing characters in '" + text + "'");
    return v;
}

} // namespace detail

inline Config parse_config(std::istream& in) {
    static const std::set<std::string> known = {
        // physical block
        "kappa", "coupling", "wavelength", "power", "drive_ratio", "sphere_radius",
        "sphere_density", "phase", "delta1", "delta2",
        // documentation-only extras
        "waist", "cavity_length",
        // scaled block
        "eps2", "kappa_a",
    };

    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameterError("config line " + std::to_string(lineno)
                                        + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key == "mode") {
            if (val != "physical" && val != "scaled")
                throw InvalidParameterError("config: mode must be 'physical' or 'scaled'");
            cfg.mode = val;
            continue;
        }
        if (!known.count(key))
            throw InvalidParameterError("config line " + std::to_string(lineno)
                                        + ": unknown key '" + key + "'");
        cfg.values[key] = detail::parse_number(val, lineno);
    }
    return cfg;
}

inline PhysicalParams physical_from_config(const Config& cfg) {
    PhysicalParams ph;
    ph.kappa = cfg.get("kappa");
    ph.coupling = cfg.get("coupling");
    ph.wavelength = cfg.get_or("wavelength", ph.wavelength);
    ph.power = cfg.get("power");
    ph.drive_ratio = cfg.get("drive_ratio");
    ph.sphere_radius = cfg.get_or("sphere_radius", ph.sphere_radius);
    ph.sphere_density = cfg.get_or("sphere_density", ph.sphere_density);
    ph.phase = cfg.get_or("phase", ph.phase);
    ph.validate();
    return ph;
}

// Scaled parameters from either block; force_scaled makes a physical-looking
// file illegal to misread (the --scaled CLI flag).
inline ScaledParams scaled_from_config(const Config& cfg, bool force_scaled = false) {
    if (cfg.mode == "scaled" || force_scaled) {
        ScaledParams p;
        p.eps2 = cfg.get("eps2");
        p.delta1 = cfg.get("delta1");
        p.delta2 = cfg.get("delta2");
        p.kappaA = cfg.get("kappa_a");
        p.drive_ratio = cfg.get("drive_ratio");
        p.phase = cfg.get_or("phase", p.phase);
        p.validate();
        return p;
    }
    const PhysicalParams ph = physical_from_config(cfg);
    return scale_physical(ph, cfg.get("delta1"), cfg.get("delta2"));
}

} // namespace selftrap
