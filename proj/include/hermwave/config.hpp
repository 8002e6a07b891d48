#ifndef HERMWAVE_CONFIG_HPP
#define HERMWAVE_CONFIG_HPP

// Run configuration files: one `key = value` per line, `#` starts a comment,
// lists are comma-separated. Unknown keys are rejected. Scenario defaults are
// applied first, then every key in file order, then command-line overrides.
//
//   scenario       EX1_I | EX1_II | EX2_I | EX2_II | EX3 | EX4 | EX5 | CUSTOM
//   N_list         increasing list of degrees
//   dt, T_final    time step and final time
//   basis.center   one value per dimension
//   basis.scale    positive
//   nquad_factor   quadrature points per dimension = factor * (N + 1)
//   snapshots      times in [0, T_final]
//   cross_sections diag | x=<c> | y=<c>
//   outputs        subset of errors, energy, snapshots, cross_sections, manifest, reference
//   output_dir, threads, seed, mu, reference_N, energy_every, window, linf_points, grid_points
//   custom.dims, custom.alpha, custom.beta, custom.gamma, custom.source (ricker|none),
//   custom.source_center, custom.f0, custom.t0, custom.u0_amplitude, custom.w0_amplitude

#include "hermwave/error.hpp"
#include "hermwave/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hermwave {

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0; // 0 for command-line overrides
};

using ConfigEntries = std::vector<ConfigEntry>;

inline const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys{
        "scenario",      "N_list",        "dt",           "T_final",        "basis.center",
        "basis.scale",   "nquad_factor",  "snapshots",    "cross_sections", "outputs",
        "output_dir",    "threads",       "seed",         "mu",             "reference_N",
        "energy_every",  "window",        "linf_points",  "grid_points",    "custom.dims",
        "custom.alpha",  "custom.beta",   "custom.gamma", "custom.source",  "custom.source_center",
        "custom.f0",     "custom.t0",     "custom.u0_amplitude",            "custom.w0_amplitude"};
    return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline ConfigEntry split_entry(const std::string& text, int line) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got '" + text + "'");
    ConfigEntry e{trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1)), line};
    const auto& keys = known_config_keys();
    if (std::find(keys.begin(), keys.end(), e.key) == keys.end())
        throw ConfigError((line ? "line " + std::to_string(line) + ": " : std::string()) + "unknown key '" + e.key + "'");
    return e;
}

inline std::string where(const ConfigEntry& e) {
    return (e.line ? "line " + std::to_string(e.line) + ": " : std::string()) + "key '" + e.key + "'";
}

[[noreturn]] inline void bad_value(const ConfigEntry& e, const std::string& expected) {
    throw ConfigError(where(e) + ": expected " + expected + ", got '" + e.value + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream s(v);
    while (std::getline(s, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

inline bool parse_real(const std::string& s, double& out) {
    if (s.empty())
        return false;
    // Accept simple fractions such as 1/3.
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        double a = 0, b = 0;
        if (!parse_real(trim(s.substr(0, slash)), a) || !parse_real(trim(s.substr(slash + 1)), b) || b == 0.0)
            return false;
        out = a / b;
        return true;
    }
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

inline double real_value(const ConfigEntry& e) {
    double v = 0;
    if (!parse_real(e.value, v))
        bad_value(e, "a real number");
    return v;
}

inline double positive_real(const ConfigEntry& e) {
    double v = 0;
    if (!parse_real(e.value, v) || !(v > 0.0))
        bad_value(e, "a positive real number");
    return v;
}

inline double nonnegative_real(const ConfigEntry& e) {
    double v = 0;
    if (!parse_real(e.value, v) || !(v >= 0.0))
        bad_value(e, "a non-negative real number");
    return v;
}

inline int integer_value(const ConfigEntry& e, int min_value, const std::string& expected) {
    char* end = nullptr;
    const long v = std::strtol(e.value.c_str(), &end, 10);
    if (e.value.empty() || end != e.value.c_str() + e.value.size() || v < min_value || v > 1000000)
        bad_value(e, expected);
    return static_cast<int>(v);
}

inline std::vector<double> real_list(const ConfigEntry& e) {
    std::vector<double> out;
    for (const auto& item : split_list(e.value)) {
        double v = 0;
        if (!parse_real(item, v))
            bad_value(e, "a comma-separated list of real numbers");
        out.push_back(v);
    }
    return out;
}

inline void apply_entry(ScenarioConfig& c, const ConfigEntry& e) {
    const std::string& k = e.key;
    if (k == "scenario") {
        // handled by resolve_config
    } else if (k == "N_list") {
        c.n_list.clear();
        for (const auto& item : split_list(e.value)) {
            ConfigEntry sub{e.key, item, e.line};
            c.n_list.push_back(integer_value(sub, 0, "a comma-separated list of non-negative integers"));
        }
        if (c.n_list.empty())
            bad_value(e, "a non-empty list of degrees");
    } else if (k == "dt") {
        c.dt = positive_real(e);
    } else if (k == "T_final") {
        c.t_final = nonnegative_real(e);
    } else if (k == "basis.center") {
        c.center = real_list(e);
        if (c.center.empty())
            bad_value(e, "one real number per dimension");
    } else if (k == "basis.scale") {
        c.scale = positive_real(e);
    } else if (k == "nquad_factor") {
        c.nquad_factor = integer_value(e, 1, "an integer >= 1");
    } else if (k == "snapshots") {
        c.snapshots = real_list(e);
    } else if (k == "cross_sections") {
        c.cross_sections = split_list(e.value);
        for (const auto& s : c.cross_sections) {
            double v = 0;
            const bool ok = s == "diag" || ((s.rfind("x=", 0) == 0 || s.rfind("y=", 0) == 0) && parse_real(s.substr(2), v));
            if (!ok)
                bad_value(e, "a list of 'diag', 'x=<value>' or 'y=<value>'");
        }
    } else if (k == "outputs") {
        static const std::vector<std::string> allowed{"errors", "energy", "snapshots", "cross_sections", "manifest", "reference"};
        c.outputs = split_list(e.value);
        for (const auto& o : c.outputs)
            if (std::find(allowed.begin(), allowed.end(), o) == allowed.end())
                bad_value(e, "a list drawn from errors, energy, snapshots, cross_sections, manifest, reference");
    } else if (k == "output_dir") {
        if (e.value.empty())
            bad_value(e, "a directory path");
        c.output_dir = e.value;
    } else if (k == "threads") {
        c.threads = integer_value(e, 1, "an integer >= 1");
    } else if (k == "seed") {
        c.seed = static_cast<std::uint64_t>(integer_value(e, 0, "a non-negative integer"));
    } else if (k == "mu") {
        c.mu = positive_real(e);
    } else if (k == "reference_N") {
        c.reference_n = integer_value(e, 1, "an integer >= 1");
    } else if (k == "energy_every") {
        c.energy_every = integer_value(e, 1, "an integer >= 1");
    } else if (k == "window") {
        const auto w = real_list(e);
        if (w.size() != 4 || !(w[1] > w[0]) || !(w[3] > w[2]))
            bad_value(e, "four numbers 'xmin, xmax, ymin, ymax' with xmax > xmin and ymax > ymin");
        std::copy(w.begin(), w.end(), c.window.begin());
    } else if (k == "linf_points") {
        c.linf_points = integer_value(e, 2, "an integer >= 2");
    } else if (k == "grid_points") {
        c.grid_points = integer_value(e, 2, "an integer >= 2");
    } else if (k == "custom.dims") {
        c.custom.dims = integer_value(e, 1, "1 or 2");
        if (c.custom.dims > 2)
            bad_value(e, "1 or 2");
    } else if (k == "custom.alpha") {
        c.custom.alpha = positive_real(e);
    } else if (k == "custom.beta") {
        c.custom.beta = positive_real(e);
    } else if (k == "custom.gamma") {
        c.custom.gamma = positive_real(e);
    } else if (k == "custom.source") {
        if (e.value != "ricker" && e.value != "none")
            bad_value(e, "'ricker' or 'none'");
        c.custom.source = e.value;
    } else if (k == "custom.source_center") {
        c.custom.source_center = real_list(e);
    } else if (k == "custom.f0") {
        c.custom.f0 = positive_real(e);
    } else if (k == "custom.t0") {
        c.custom.t0 = real_value(e);
    } else if (k == "custom.u0_amplitude") {
        c.custom.u0_amplitude = real_value(e);
    } else if (k == "custom.w0_amplitude") {
        c.custom.w0_amplitude = real_value(e);
    }
}

} // namespace detail

inline ConfigEntries parse_config_text(const std::string& text) {
    ConfigEntries entries;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        entries.push_back(detail::split_entry(line, number));
    }
    return entries;
}

inline ConfigEntries read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

/// "key=value" from the command line.
inline void add_override(ConfigEntries& entries, const std::string& assignment) {
    entries.push_back(detail::split_entry(assignment, 0));
}

/// Checks that need the whole config (cross-key constraints).
inline void validate_config(const ScenarioConfig& c) {
    const Scenario& s = find_scenario(c.scenario);
    if (c.n_list.empty())
        throw ConfigError("key 'N_list': must not be empty");
    for (std::size_t i = 1; i < c.n_list.size(); ++i)
        if (c.n_list[i] <= c.n_list[i - 1])
            throw ConfigError("key 'N_list': degrees must be strictly increasing");
    for (double t : c.snapshots)
        if (t < 0.0 || t > c.t_final)
            throw ConfigError("key 'snapshots': time " + detail::fmt_num(t) + " lies outside [0, T_final]");
    const int dims = c.scenario == "CUSTOM" ? c.custom.dims : s.dims;
    if (static_cast<int>(c.center.size()) != dims)
        throw ConfigError("key 'basis.center': expected " + std::to_string(dims) + " value(s)");
    if (c.scenario == "EX3" && c.reference_n <= c.n_list.back())
        throw ConfigError("key 'reference_N': must exceed the largest degree in N_list");
    if (!(c.dt > 0.0))
        throw ConfigError("key 'dt': expected a positive real number");
}

/// Scenario defaults, then entries in order. The last `scenario` entry wins.
inline ScenarioConfig resolve_config(const ConfigEntries& entries) {
    std::string id;
    for (const auto& e : entries)
        if (e.key == "scenario")
            id = e.value;
    if (id.empty())
        throw ConfigError("key 'scenario': missing; expected one of EX1_I, EX1_II, EX2_I, EX2_II, EX3, EX4, EX5, CUSTOM");
    try {
        find_scenario(id);
    } catch (const ConfigError&) {
        throw ConfigError("key 'scenario': unknown scenario '" + id + "'");
    }
    ScenarioConfig c = default_config(id);
    for (const auto& e : entries)
        detail::apply_entry(c, e);
    if (id == "CUSTOM") {
        bool center_set = false;
        for (const auto& e : entries)
            center_set = center_set || e.key == "basis.center";
        if (!center_set)
            c.center.assign(static_cast<std::size_t>(c.custom.dims), 0.0);
    }
    validate_config(c);
    return c;
}

/// Effective configuration in config-file syntax (for the run manifest).
inline std::vector<std::pair<std::string, std::string>> config_summary(const ScenarioConfig& c) {
    using detail::fmt_num;
    auto join_d = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? ", " : "") + fmt_num(v[i]);
        return s;
    };
    auto join_s = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? ", " : "") + v[i];
        return s;
    };
    std::string n_list;
    for (std::size_t i = 0; i < c.n_list.size(); ++i)
        n_list += (i ? ", " : "") + std::to_string(c.n_list[i]);
    std::vector<std::pair<std::string, std::string>> out{
        {"scenario", c.scenario},
        {"N_list", n_list},
        {"dt", fmt_num(c.dt)},
        {"T_final", fmt_num(c.t_final)},
        {"basis.center", join_d(c.center)},
        {"basis.scale", fmt_num(c.scale)},
        {"nquad_factor", std::to_string(c.nquad_factor)},
        {"snapshots", join_d(c.snapshots)},
        {"cross_sections", join_s(c.cross_sections)},
        {"outputs", join_s(c.outputs)},
        {"output_dir", c.output_dir},
        {"threads", std::to_string(c.threads)},
        {"seed", std::to_string(c.seed)},
        {"energy_every", std::to_string(c.energy_every)},
        {"window", join_d({c.window.begin(), c.window.end()})},
        {"linf_points", std::to_string(c.linf_points)},
        {"grid_points", std::to_string(c.grid_points)},
    };
    if (c.scenario == "EX3") {
        out.emplace_back("mu", fmt_num(c.mu));
        out.emplace_back("reference_N", std::to_string(c.reference_n));
    }
    return out;
}

} // namespace hermwave

#endif
