#pragma once

#include <array>
#include <charconv>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mhdbox/diagnostics.hpp"
#include "mhdbox/initial_data.hpp"

namespace mhdbox {

// Shortest round-trip decimal form; keeps CSV and echo output reproducible.
inline std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

enum class RunMode { Single, Sweep, Convergence, Linearized };

inline std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::Single: return "single";
        case RunMode::Sweep: return "sweep";
        case RunMode::Convergence: return "convergence";
        case RunMode::Linearized: return "linearized";
    }
    return "single";
}

// Full run configuration, parsed from a flat "section.key = value" text file.
// '#' starts a comment; unknown keys are parse errors. Defaults: N = 32,
// nu = 1, dt = 2e-3, two-thirds dealiasing, parity enforcement off, s = 5,
// sigma = 0.5, stride 5, t_end = 10, mode single. init.epsilon has no
// default: a run cannot be sized implicitly.
struct RunConfig {
    int n = 32;
    DynamicsConfig dynamics;
    InitSpec init;
    std::optional<double> epsilon; // moved into init by validate()
    EnergyConfig energy;
    std::optional<int> energy_s; // defaults to init.s
    double t_end = 10.0;
    std::vector<double> snapshot_times;
    std::string output_dir = "out";
    RunMode mode = RunMode::Single;
    std::vector<double> sweep_epsilons;
    std::vector<double> convergence_dts;
    std::array<int, 3> linear_mode = {0, 0, 1};

    Grid grid() const { return Grid(n); }

    void validate() {
        Grid g(n); // throws on bad n
        if (dynamics.nu <= 0.0) throw ValidationError("dynamics.nu", "must be positive");
        if (dynamics.dt <= 0.0) throw ValidationError("dynamics.dt", "must be positive");
        if (t_end <= 0.0) throw ValidationError("run.t_end", "must be positive");
        if (mode == RunMode::Sweep) {
            if (sweep_epsilons.empty())
                throw ValidationError("run.sweep_epsilons", "sweep mode needs a nonempty list");
            for (double e : sweep_epsilons)
                if (e < 0.0) throw ValidationError("run.sweep_epsilons", "must be >= 0");
            init.epsilon = epsilon.value_or(sweep_epsilons.front());
        } else {
            if (!epsilon) throw ValidationError("init.epsilon", "missing (no default)");
            init.epsilon = *epsilon;
        }
        energy.s = energy_s.value_or(init.s);
        energy.validate();
        init.validate(g);
        if (mode == RunMode::Convergence) {
            if (convergence_dts.empty())
                throw ValidationError("run.convergence_dts", "convergence mode needs a list");
            for (double dt : convergence_dts) {
                if (dt <= 0.0) throw ValidationError("run.convergence_dts", "must be > 0");
                check_step_count(dt, "run.convergence_dts");
            }
        }
        if (mode == RunMode::Linearized) {
            if (!(linear_mode[0] == 0 && linear_mode[1] == 0 && linear_mode[2] >= 1))
                throw ValidationError("run.linear_mode",
                                      "must be a vertical mode (0,0,m) with m >= 1");
            if (linear_mode[2] > g.dealias_limit())
                throw ValidationError("run.linear_mode", "mode outside the dealiased shell");
            for (double dt : convergence_dts) {
                if (dt <= 0.0) throw ValidationError("run.convergence_dts", "must be > 0");
                check_step_count(dt, "run.convergence_dts");
            }
        }
        check_step_count(dynamics.dt, "dynamics.dt");
        for (double t : snapshot_times)
            if (t < 0.0) throw ValidationError("run.snapshot_times", "must be >= 0");
        // Advective CFL with the unit background speed, sized from epsilon.
        double eps = init.epsilon;
        for (double e : sweep_epsilons) eps = std::max(eps, e);
        const int limit = dynamics.dealias == DealiasRule::TwoThirds ? g.dealias_limit() : g.n / 2 - 1;
        const double kmax = std::sqrt(3.0) * limit;
        if (dynamics.dt * kmax * (1.0 + 2.0 * eps) > 0.5 + 1e-12)
            throw ValidationError("dynamics.dt", "violates the CFL bound dt*|k|max*(U+1) <= 0.5");
    }

    long long steps() const { return std::llround(t_end / dynamics.dt); }

private:
    void check_step_count(double dt, const std::string& key) const {
        const double ratio = t_end / dt;
        if (std::abs(ratio - std::llround(ratio)) > 1e-9 * ratio + 1e-12)
            throw ValidationError(key, "t_end must be an integer number of steps");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + v + "'", line);
    }
}

inline long long parse_int(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + v + "'", line);
    }
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ParseError("expected on/off, got '" + v + "'", line);
}

inline std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, line));
    }
    return out;
}

} // namespace detail

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'section.key = value'", lineno);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ParseError("empty key or value", lineno);
        using namespace detail;

        if (key == "grid.n") cfg.n = static_cast<int>(parse_int(value, lineno));
        else if (key == "dynamics.nu") cfg.dynamics.nu = parse_double(value, lineno);
        else if (key == "dynamics.dt") cfg.dynamics.dt = parse_double(value, lineno);
        else if (key == "dynamics.dealias") {
            if (value == "two_thirds") cfg.dynamics.dealias = DealiasRule::TwoThirds;
            else if (value == "none") cfg.dynamics.dealias = DealiasRule::None;
            else throw ParseError("dealias must be two_thirds or none", lineno);
        } else if (key == "dynamics.exp_filter") cfg.dynamics.exp_filter = parse_bool(value, lineno);
        else if (key == "dynamics.parity_enforcement")
            cfg.dynamics.enforce_parity = parse_bool(value, lineno);
        else if (key == "init.seed")
            cfg.init.seed = static_cast<std::uint64_t>(parse_int(value, lineno));
        else if (key == "init.epsilon") cfg.epsilon = parse_double(value, lineno);
        else if (key == "init.s") cfg.init.s = static_cast<int>(parse_int(value, lineno));
        else if (key == "init.spectrum") {
            if (value == "low_modes") cfg.init.spectrum = SpectrumShape::LowModes;
            else if (value == "power_law") cfg.init.spectrum = SpectrumShape::PowerLaw;
            else throw ParseError("spectrum must be low_modes or power_law", lineno);
        } else if (key == "init.k_max") cfg.init.k_max = static_cast<int>(parse_int(value, lineno));
        else if (key == "init.exponent") cfg.init.exponent = parse_double(value, lineno);
        else if (key == "energy.sigma") cfg.energy.sigma = parse_double(value, lineno);
        else if (key == "energy.s") cfg.energy_s = static_cast<int>(parse_int(value, lineno));
        else if (key == "energy.sample_stride")
            cfg.energy.sample_stride = static_cast<int>(parse_int(value, lineno));
        else if (key == "run.t_end") cfg.t_end = parse_double(value, lineno);
        else if (key == "run.mode") {
            if (value == "single") cfg.mode = RunMode::Single;
            else if (value == "sweep") cfg.mode = RunMode::Sweep;
            else if (value == "convergence") cfg.mode = RunMode::Convergence;
            else if (value == "linearized") cfg.mode = RunMode::Linearized;
            else throw ParseError("unknown run.mode '" + value + "'", lineno);
        } else if (key == "run.sweep_epsilons") cfg.sweep_epsilons = parse_list(value, lineno);
        else if (key == "run.convergence_dts") cfg.convergence_dts = parse_list(value, lineno);
        else if (key == "run.snapshot_times") cfg.snapshot_times = parse_list(value, lineno);
        else if (key == "run.output_dir") cfg.output_dir = value;
        else if (key == "run.linear_mode") {
            const auto v = parse_list(value, lineno);
            if (v.size() != 3) throw ParseError("linear_mode needs three integers", lineno);
            for (int i = 0; i < 3; ++i) cfg.linear_mode[i] = static_cast<int>(std::llround(v[i]));
        } else throw ParseError("unknown key '" + key + "'", lineno);
    }
    cfg.validate();
    return cfg;
}

inline RunConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

// The effective configuration with all defaults materialized, for the report
// echo and for documentation-by-example.
inline std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& cfg) {
    auto num = [](double v) { return fmt_double(v); };
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("grid.n", std::to_string(cfg.n));
    out.emplace_back("dynamics.nu", num(cfg.dynamics.nu));
    out.emplace_back("dynamics.dt", num(cfg.dynamics.dt));
    out.emplace_back("dynamics.dealias",
                     cfg.dynamics.dealias == DealiasRule::TwoThirds ? "two_thirds" : "none");
    out.emplace_back("dynamics.exp_filter", cfg.dynamics.exp_filter ? "on" : "off");
    out.emplace_back("dynamics.parity_enforcement", cfg.dynamics.enforce_parity ? "on" : "off");
    out.emplace_back("init.seed", std::to_string(cfg.init.seed));
    out.emplace_back("init.epsilon", num(cfg.init.epsilon));
    out.emplace_back("init.s", std::to_string(cfg.init.s));
    out.emplace_back("init.spectrum",
                     cfg.init.spectrum == SpectrumShape::LowModes ? "low_modes" : "power_law");
    out.emplace_back("init.k_max", std::to_string(cfg.init.k_max));
    out.emplace_back("init.exponent", num(cfg.init.exponent));
    out.emplace_back("energy.sigma", num(cfg.energy.sigma));
    out.emplace_back("energy.s", std::to_string(cfg.energy.s));
    out.emplace_back("energy.sample_stride", std::to_string(cfg.energy.sample_stride));
    out.emplace_back("run.t_end", num(cfg.t_end));
    out.emplace_back("run.mode", to_string(cfg.mode));
    out.emplace_back("run.output_dir", cfg.output_dir);
    auto list = [&](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
        return s;
    };
    if (!cfg.sweep_epsilons.empty()) out.emplace_back("run.sweep_epsilons", list(cfg.sweep_epsilons));
    if (!cfg.convergence_dts.empty())
        out.emplace_back("run.convergence_dts", list(cfg.convergence_dts));
    if (!cfg.snapshot_times.empty()) out.emplace_back("run.snapshot_times", list(cfg.snapshot_times));
    if (cfg.mode == RunMode::Linearized)
        out.emplace_back("run.linear_mode", std::to_string(cfg.linear_mode[0]) + "," +
                                                std::to_string(cfg.linear_mode[1]) + "," +
                                                std::to_string(cfg.linear_mode[2]));
    return out;
}

} // namespace mhdbox
