#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latticemc/ensemble.hpp"
#include "latticemc/geometry.hpp"

// Flat key-value run configuration. One `key = value` per line, `#` starts a
// comment, UTF-8. Command-line `key=value` tokens go through the same parser
// and override file keys. Every run echoes the fully resolved spec into its
// manifest, so a manifest is itself a valid config file.

namespace latticemc {

enum class Command {
    geometry,
    single,
    sweep_gamma,
    sweep_delta,
    bunching,
    spectrum,
    sr_scaling,
};

inline const char* command_name(Command c) {
    switch (c) {
        case Command::geometry: return "geometry";
        case Command::single: return "single";
        case Command::sweep_gamma: return "sweep-gamma";
        case Command::sweep_delta: return "sweep-delta";
        case Command::bunching: return "bunching";
        case Command::spectrum: return "spectrum";
        case Command::sr_scaling: return "sr-scaling";
    }
    return "?";
}

inline std::optional<Command> command_from_name(const std::string& s) {
    for (Command c : {Command::geometry, Command::single, Command::sweep_gamma,
                      Command::sweep_delta, Command::bunching, Command::spectrum,
                      Command::sr_scaling})
        if (s == command_name(c)) return c;
    return std::nullopt;
}

struct RunSpec {
    std::optional<Command> command;
    LatticeConfig lattice{};                 // probe_detuning unused; see `detuning`
    std::optional<double> detuning;          // absent: the Brillouin condition delta = Omega_x
    int atoms = 500;
    double tmax = 2000.0;
    std::optional<double> ttherm;            // absent: automatic
    double sample_dt = 1.0;
    std::uint64_t seed = 1;
    std::optional<double> init_temp;         // absent: |delta0| / 5
    double noise_scale = 1.0;
    bool jump_recoil = true;
    int bins = 64;
    int mode_sign = +1;
    bool average_modes = false;
    std::optional<bool> compute_xi;          // absent: on for the sweep commands
    double reference_delta_factor = 100.0;
    bool reference_probe_on = true;          // off: reference runs with the probe removed
    std::vector<double> gamma0_grid;
    std::vector<double> gamma0_grid_relative;  // in units of the predicted SR rate
    std::vector<double> delta_grid;
    std::vector<double> delta_grid_relative;   // in units of Omega_x
    std::vector<double> delta0_grid{-50.0, -100.0, -200.0, -400.0};
    std::string out_dir = "out";
    bool archive = false;
};

namespace keys {

inline const std::vector<std::string>& valid() {
    static const std::vector<std::string> k = {
        "command",        "delta0",
        "gamma0",         "theta",
        "theta_deg",      "probe_ratio",
        "delta",          "atoms",
        "tmax",           "ttherm",
        "sample_dt",      "seed",
        "init_temp",      "noise_scale",
        "jump_recoil",    "bins",
        "mode_sign",      "average_modes",
        "compute_xi",     "reference_delta_factor",
        "reference_probe", "gamma0_grid",
        "gamma0_grid_relative", "delta_grid",
        "delta_grid_relative",  "delta0_grid",
        "out",            "archive",
    };
    return k;
}

}  // namespace keys

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty())
        throw Error(Errc::type_mismatch, key + ": expected a number, got '" + v + "'");
    return d;
}

inline long long parse_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long long i = std::strtoll(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty())
        throw Error(Errc::type_mismatch, key + ": expected an integer, got '" + v + "'");
    return i;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const unsigned long long i = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty())
        throw Error(Errc::type_mismatch, key + ": expected an unsigned integer, got '" + v + "'");
    return i;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw Error(Errc::type_mismatch, key + ": expected a boolean, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const std::size_t comma = v.find(',', start);
        const std::string item =
            trim(comma == std::string::npos ? v.substr(start) : v.substr(start, comma - start));
        if (!item.empty()) out.push_back(parse_double(key, item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw Error(Errc::type_mismatch, key + ": expected a non-empty list");
    return out;
}

inline std::string fmt_val(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt_val(v[i]);
    }
    return s;
}

}  // namespace detail

/// Apply one key=value pair.
inline void apply_key(RunSpec& spec, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "command") {
        const auto c = command_from_name(value);
        if (!c)
            throw Error(Errc::type_mismatch,
                        "command: unknown command '" + value +
                            "' (expected geometry|single|sweep-gamma|sweep-delta|bunching|"
                            "spectrum|sr-scaling)");
        spec.command = c;
    } else if (key == "delta0") {
        spec.lattice.light_shift = parse_double(key, value);
    } else if (key == "gamma0") {
        spec.lattice.pump_rate = parse_double(key, value);
    } else if (key == "theta") {
        spec.lattice.half_angle = parse_double(key, value);
    } else if (key == "theta_deg") {
        spec.lattice.half_angle = parse_double(key, value) * kPi / 180.0;
    } else if (key == "probe_ratio") {
        spec.lattice.probe_ratio = parse_double(key, value);
    } else if (key == "delta") {
        if (value == "auto")
            spec.detuning.reset();
        else
            spec.detuning = parse_double(key, value);
    } else if (key == "atoms") {
        spec.atoms = static_cast<int>(parse_int(key, value));
    } else if (key == "tmax") {
        spec.tmax = parse_double(key, value);
    } else if (key == "ttherm") {
        if (value == "auto")
            spec.ttherm.reset();
        else
            spec.ttherm = parse_double(key, value);
    } else if (key == "sample_dt") {
        spec.sample_dt = parse_double(key, value);
    } else if (key == "seed") {
        spec.seed = parse_u64(key, value);
    } else if (key == "init_temp") {
        if (value == "auto")
            spec.init_temp.reset();
        else
            spec.init_temp = parse_double(key, value);
    } else if (key == "noise_scale") {
        spec.noise_scale = parse_double(key, value);
    } else if (key == "jump_recoil") {
        spec.jump_recoil = parse_bool(key, value);
    } else if (key == "bins") {
        spec.bins = static_cast<int>(parse_int(key, value));
        if (spec.bins < 4) throw Error(Errc::type_mismatch, "bins: need at least 4");
    } else if (key == "mode_sign") {
        if (value == "+" || value == "+1" || value == "1")
            spec.mode_sign = +1;
        else if (value == "-" || value == "-1")
            spec.mode_sign = -1;
        else
            throw Error(Errc::type_mismatch, "mode_sign: expected + or -, got '" + value + "'");
    } else if (key == "average_modes") {
        spec.average_modes = parse_bool(key, value);
    } else if (key == "compute_xi") {
        if (value == "auto")
            spec.compute_xi.reset();
        else
            spec.compute_xi = parse_bool(key, value);
    } else if (key == "reference_delta_factor") {
        spec.reference_delta_factor = parse_double(key, value);
        if (!(spec.reference_delta_factor > 0.0))
            throw Error(Errc::type_mismatch, "reference_delta_factor must be > 0");
    } else if (key == "reference_probe") {
        spec.reference_probe_on = parse_bool(key, value);
    } else if (key == "gamma0_grid") {
        spec.gamma0_grid = parse_list(key, value);
    } else if (key == "gamma0_grid_relative") {
        spec.gamma0_grid_relative = parse_list(key, value);
    } else if (key == "delta_grid") {
        spec.delta_grid = parse_list(key, value);
    } else if (key == "delta_grid_relative") {
        spec.delta_grid_relative = parse_list(key, value);
    } else if (key == "delta0_grid") {
        spec.delta0_grid = parse_list(key, value);
    } else if (key == "out") {
        spec.out_dir = value;
    } else if (key == "archive") {
        spec.archive = parse_bool(key, value);
    } else {
        std::string msg = "unknown key '" + key + "'; valid keys:";
        for (const auto& k : keys::valid()) msg += " " + k;
        throw Error(Errc::unknown_key, msg);
    }
}

/// Parse a config file body into `spec` (later lines override earlier ones).
inline void parse_config_text(RunSpec& spec, const std::string& text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::type_mismatch, "expected 'key = value', got '" + line + "'");
        apply_key(spec, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
}

/// Validate and return the spec (defaults are already carried by the struct).
inline RunSpec finish(RunSpec spec) {
    if (!spec.command)
        throw Error(Errc::missing_required, "command is required (geometry|single|sweep-gamma|"
                                            "sweep-delta|bunching|spectrum|sr-scaling)");
    validate(spec.lattice);
    if (spec.atoms < 1) throw Error(Errc::type_mismatch, "atoms must be >= 1");
    if (!(spec.tmax > 0.0)) throw Error(Errc::type_mismatch, "tmax must be > 0");
    if (!(spec.sample_dt > 0.0)) throw Error(Errc::type_mismatch, "sample_dt must be > 0");
    if (*spec.command == Command::sr_scaling && spec.delta0_grid.empty())
        throw Error(Errc::missing_required, "sr-scaling needs a non-empty delta0_grid");
    for (double d0 : spec.delta0_grid)
        if (!(d0 < 0.0))
            throw Error(Errc::red_detuning_required, "delta0_grid entries must be negative");
    return spec;
}

/// The lattice config of the main run, with the detuning resolved.
inline LatticeConfig resolved_lattice(const RunSpec& spec) {
    LatticeConfig cfg = spec.lattice;
    cfg.probe_detuning = spec.detuning ? *spec.detuning : derive_geometry(cfg).brillouin_detuning;
    return cfg;
}

inline EnsembleConfig resolved_ensemble(const RunSpec& spec) {
    EnsembleConfig e;
    e.n_atoms = spec.atoms;
    e.thermalization_time = spec.ttherm ? *spec.ttherm : -1.0;
    e.measurement_time = spec.tmax;
    e.sampling_interval = spec.sample_dt;
    e.master_seed = spec.seed;
    e.init_temperature = spec.init_temp ? *spec.init_temp : -1.0;
    return e;
}

inline std::vector<double> resolved_gamma_grid(const RunSpec& spec) {
    if (!spec.gamma0_grid.empty()) return spec.gamma0_grid;
    std::vector<double> rel = spec.gamma0_grid_relative;
    if (rel.empty()) rel = {0.45, 0.6, 0.8, 1.0, 1.35, 1.8, 2.4};
    const double sr = predict_sr(spec.lattice);
    for (double& g : rel) g *= sr;
    return rel;
}

inline std::vector<double> resolved_delta_grid(const RunSpec& spec) {
    if (!spec.delta_grid.empty()) return spec.delta_grid;
    std::vector<double> rel = spec.delta_grid_relative;
    if (rel.empty()) {
        if (spec.command == Command::spectrum) {
            for (int i = 0; i <= 12; ++i) rel.push_back(0.4 + 0.1 * i);  // 0.4 .. 1.6
        } else {
            for (int i = 0; i <= 10; ++i) rel.push_back(0.5 + 0.1 * i);  // 0.5 .. 1.5
        }
    }
    const double omega = derive_geometry(spec.lattice).omega_x;
    for (double& d : rel) d *= omega;
    return rel;
}

inline bool resolved_compute_xi(const RunSpec& spec) {
    if (spec.compute_xi) return *spec.compute_xi;
    return spec.command == Command::sweep_gamma || spec.command == Command::sweep_delta ||
           spec.command == Command::sr_scaling;
}

/// Canonical sorted echo of every key; hashing this block identifies the run.
inline std::string canonical_echo(const RunSpec& spec) {
    using namespace detail;
    std::map<std::string, std::string> kv;
    kv["command"] = spec.command ? command_name(*spec.command) : "";
    kv["delta0"] = fmt_val(spec.lattice.light_shift);
    kv["gamma0"] = fmt_val(spec.lattice.pump_rate);
    kv["theta"] = fmt_val(spec.lattice.half_angle);
    kv["probe_ratio"] = fmt_val(spec.lattice.probe_ratio);
    kv["delta"] = spec.detuning ? fmt_val(*spec.detuning) : "auto";
    kv["atoms"] = std::to_string(spec.atoms);
    kv["tmax"] = fmt_val(spec.tmax);
    kv["ttherm"] = spec.ttherm ? fmt_val(*spec.ttherm) : "auto";
    kv["sample_dt"] = fmt_val(spec.sample_dt);
    kv["seed"] = std::to_string(spec.seed);
    kv["init_temp"] = spec.init_temp ? fmt_val(*spec.init_temp) : "auto";
    kv["noise_scale"] = fmt_val(spec.noise_scale);
    kv["jump_recoil"] = spec.jump_recoil ? "true" : "false";
    kv["bins"] = std::to_string(spec.bins);
    kv["mode_sign"] = spec.mode_sign > 0 ? "+" : "-";
    kv["average_modes"] = spec.average_modes ? "true" : "false";
    kv["compute_xi"] = spec.compute_xi ? (*spec.compute_xi ? "true" : "false") : "auto";
    kv["reference_delta_factor"] = fmt_val(spec.reference_delta_factor);
    kv["reference_probe"] = spec.reference_probe_on ? "on" : "off";
    kv["gamma0_grid"] = spec.gamma0_grid.empty() ? "" : fmt_list(spec.gamma0_grid);
    kv["gamma0_grid_relative"] =
        spec.gamma0_grid_relative.empty() ? "" : fmt_list(spec.gamma0_grid_relative);
    kv["delta_grid"] = spec.delta_grid.empty() ? "" : fmt_list(spec.delta_grid);
    kv["delta_grid_relative"] =
        spec.delta_grid_relative.empty() ? "" : fmt_list(spec.delta_grid_relative);
    kv["delta0_grid"] = fmt_list(spec.delta0_grid);
    kv["archive"] = spec.archive ? "true" : "false";
    std::string out;
    for (const auto& [k, v] : kv) {
        if (v.empty()) continue;
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

}  // namespace latticemc
