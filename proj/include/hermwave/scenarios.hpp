#ifndef HERMWAVE_SCENARIOS_HPP
#define HERMWAVE_SCENARIOS_HPP

// Built-in problem catalog: smooth 1D/2D accuracy tests with exact
// solutions (EX1_*, EX2_*), a non-smooth source test (EX3), and Ricker-wavelet
// wavefields in homogeneous (EX4) and two-layer (EX5) media. CUSTOM builds a
// constant-coefficient problem from config keys.

#include "hermwave/dvwe.hpp"
#include "hermwave/error.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hermwave {

enum class RunKind { convergence, wavefield };

/// Closed-form solution and the derivatives needed to audit it against the PDE.
struct ExactSolution {
    SpaceTimeFunction u;
    SpaceTimeFunction u_t;
    SpaceTimeFunction u_tt;
    SpaceTimeFunction lap;   // Laplacian of u
    SpaceTimeFunction lap_t; // time derivative of the Laplacian
    SpaceTimeFunction u_x;   // for H^1 errors in 1D
};

/// Parameters of the CUSTOM scenario.
struct CustomProblem {
    int dims = 2;
    double alpha = 1.0;
    double beta = 0.01;
    double gamma = 20.0;
    std::string source = "ricker"; // ricker | none
    std::vector<double> source_center{0.0, 0.0};
    double f0 = 15.0;
    double t0 = 0.05;
    double u0_amplitude = 0.0;
    double w0_amplitude = 0.0;
};

/// Fully resolved run parameters (scenario defaults plus config overrides).
struct ScenarioConfig {
    std::string scenario;
    std::vector<int> n_list;
    double dt = 1e-4;
    double t_final = 1.0;
    std::vector<double> center;
    double scale = 1.0;
    int nquad_factor = 2;
    std::vector<double> snapshots;
    std::vector<std::string> cross_sections;
    std::vector<std::string> outputs{"errors", "energy", "snapshots", "cross_sections", "manifest", "reference"};
    std::string output_dir = "hermwave_out";
    int threads = 1;
    std::uint64_t seed = 0; // reserved; the solver is deterministic
    double mu = 1.0 / 3.0;
    int reference_n = 256;
    int energy_every = 10;
    std::array<double, 4> window{0.0, 0.0, 0.0, 0.0}; // xmin xmax ymin ymax; zeros = center +- 10 scale
    int linf_points = 0; // 0 = 2001 (1D) / 201 per axis (2D)
    int grid_points = 201;
    CustomProblem custom;

    bool wants(const std::string& output) const {
        for (const auto& o : outputs)
            if (o == output)
                return true;
        return false;
    }
};

struct Scenario {
    std::string id;
    std::string description;
    int dims = 1;
    RunKind kind = RunKind::convergence;
    std::function<void(ScenarioConfig&)> set_defaults;
    std::function<DvweProblem(const ScenarioConfig&, int N)> build;
    std::optional<ExactSolution> exact;
    /// Physical parameters echoed into the run manifest.
    std::function<std::vector<std::pair<std::string, std::string>>(const ScenarioConfig&)> describe;
};

namespace detail {

inline std::string fmt_num(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

inline std::vector<BasisSpec> basis_from(const ScenarioConfig& c, int dims, int N) {
    std::vector<BasisSpec> b;
    for (int d = 0; d < dims; ++d) {
        const double center = d < static_cast<int>(c.center.size()) ? c.center[static_cast<std::size_t>(d)] : 0.0;
        b.push_back(BasisSpec{N, center, c.scale});
    }
    return b;
}

inline DvweProblem base_problem(const ScenarioConfig& c, int dims, int N) {
    DvweProblem p;
    p.dims = dims;
    p.basis = basis_from(c, dims, N);
    p.dt = c.dt;
    p.t_final = c.t_final;
    p.nquad = c.nquad_factor * (N + 1);
    return p;
}

inline void smooth_defaults(ScenarioConfig& c, int dims, double t_final) {
    c.n_list = {10, 15, 20, 25, 30, 35, 40, 45, 50};
    c.dt = 1e-4;
    c.t_final = t_final;
    c.center.assign(static_cast<std::size_t>(dims), 0.0);
    c.scale = 1.0;
    c.nquad_factor = 2;
}

// Exact solutions of the smooth tests with alpha = beta = gamma = 1.
inline ExactSolution decaying_gaussian(int dims) {
    auto r2 = [dims](double x, double y) { return dims == 2 ? x * x + y * y : x * x; };
    const double lap_c = 2.0 * dims; // lap e^{-r^2} = (4 r^2 - 2 d) e^{-r^2}
    ExactSolution e;
    e.u = [r2](double x, double y, double t) { return std::exp(-r2(x, y) - t); };
    e.u_t = [r2](double x, double y, double t) { return -std::exp(-r2(x, y) - t); };
    e.u_tt = e.u;
    e.lap = [r2, lap_c](double x, double y, double t) { return (4.0 * r2(x, y) - lap_c) * std::exp(-r2(x, y) - t); };
    e.lap_t = [r2, lap_c](double x, double y, double t) { return -(4.0 * r2(x, y) - lap_c) * std::exp(-r2(x, y) - t); };
    e.u_x = [r2](double x, double y, double t) { return -2.0 * x * std::exp(-r2(x, y) - t); };
    return e;
}

inline ExactSolution oscillating_gaussian(int dims) {
    auto r2 = [dims](double x, double y) { return dims == 2 ? x * x + y * y : x * x; };
    const double lap_c = 2.0 * dims;
    ExactSolution e;
    e.u = [r2](double x, double y, double t) { return std::exp(-r2(x, y)) * std::sin(t); };
    e.u_t = [r2](double x, double y, double t) { return std::exp(-r2(x, y)) * std::cos(t); };
    e.u_tt = [r2](double x, double y, double t) { return -std::exp(-r2(x, y)) * std::sin(t); };
    e.lap = [r2, lap_c](double x, double y, double t) {
        return (4.0 * r2(x, y) - lap_c) * std::exp(-r2(x, y)) * std::sin(t);
    };
    e.lap_t = [r2, lap_c](double x, double y, double t) {
        return (4.0 * r2(x, y) - lap_c) * std::exp(-r2(x, y)) * std::cos(t);
    };
    e.u_x = [r2](double x, double y, double t) { return -2.0 * x * std::exp(-r2(x, y)) * std::sin(t); };
    return e;
}

inline Scenario smooth_scenario(std::string id, int dims, bool oscillating) {
    Scenario s;
    s.id = std::move(id);
    s.dims = dims;
    s.kind = RunKind::convergence;
    const double t_final = dims == 1 ? 1.0 : 0.5;
    s.description = std::string(dims == 1 ? "1D" : "2D") + " smooth accuracy test, alpha=beta=gamma=1, exact " +
                    (oscillating ? "u = exp(-|x|^2) sin t" : "u = exp(-|x|^2 - t)");
    s.set_defaults = [dims, t_final](ScenarioConfig& c) { smooth_defaults(c, dims, t_final); };
    s.exact = oscillating ? oscillating_gaussian(dims) : decaying_gaussian(dims);
    s.build = [dims, oscillating](const ScenarioConfig& c, int N) {
        DvweProblem p = base_problem(c, dims, N);
        auto r2 = [dims](double x, double y) { return dims == 2 ? x * x + y * y : x * x; };
        if (!oscillating) {
            p.u0 = [r2](double x, double y) { return std::exp(-r2(x, y)); };
            p.w0 = [r2](double x, double y) { return -std::exp(-r2(x, y)); };
            p.source = Source::zero();
        } else {
            // f = e^{-r^2} [(2d - 1 - 4 r^2) sin t + (2d + 1 - 4 r^2) cos t]
            const double lap_c = 2.0 * dims;
            p.u0 = [](double, double) { return 0.0; };
            p.w0 = [r2](double x, double y) { return std::exp(-r2(x, y)); };
            p.source = Source::separable_sum({
                {[r2, lap_c](double x, double y) { return (lap_c - 1.0 - 4.0 * r2(x, y)) * std::exp(-r2(x, y)); },
                 [](double t) { return std::sin(t); }},
                {[r2, lap_c](double x, double y) { return (lap_c + 1.0 - 4.0 * r2(x, y)) * std::exp(-r2(x, y)); },
                 [](double t) { return std::cos(t); }},
            });
        }
        return p;
    };
    s.describe = [](const ScenarioConfig&) {
        return std::vector<std::pair<std::string, std::string>>{{"alpha", "1"}, {"beta", "1"}, {"gamma", "1"}};
    };
    return s;
}

/// x^mu with the real-root convention: x^mu = (cbrt x)^(3 mu) for mu = k/3.
inline double real_power(double x, double mu) {
    const double k = 3.0 * mu;
    if (std::abs(k - std::round(k)) < 1e-12)
        return std::pow(std::cbrt(x), std::round(k));
    return x >= 0.0 ? std::pow(x, mu) : std::numeric_limits<double>::quiet_NaN();
}

inline Scenario nonsmooth_scenario() {
    Scenario s;
    s.id = "EX3";
    s.dims = 1;
    s.kind = RunKind::convergence;
    s.description = "1D non-smooth source f = x^mu exp(-x^2) cos t, zero data, reference-solution errors";
    s.set_defaults = [](ScenarioConfig& c) {
        c.n_list = {32, 48, 64, 96, 128};
        c.dt = 1e-4;
        c.t_final = 0.5;
        c.center = {0.0};
        c.scale = 1.0;
        c.nquad_factor = 2;
        c.reference_n = 256;
        c.mu = 1.0 / 3.0;
    };
    s.build = [](const ScenarioConfig& c, int N) {
        DvweProblem p = base_problem(c, 1, N);
        const double mu = c.mu;
        p.source = Source::separable([mu](double x, double) { return real_power(x, mu) * std::exp(-x * x); },
                                     [](double t) { return std::cos(t); });
        return p;
    };
    s.describe = [](const ScenarioConfig& c) {
        return std::vector<std::pair<std::string, std::string>>{
            {"alpha", "1"}, {"beta", "1"}, {"gamma", "1"}, {"mu", fmt_num(c.mu)}, {"reference_N", std::to_string(c.reference_n)}};
    };
    return s;
}

inline Scenario homogeneous_scenario() {
    Scenario s;
    s.id = "EX4";
    s.dims = 2;
    s.kind = RunKind::wavefield;
    s.description = "2D homogeneous medium alpha=1 beta=0.01 gamma=20, Ricker f0=15 at (10,10), t0=0.05";
    s.set_defaults = [](ScenarioConfig& c) {
        c.n_list = {100, 200};
        c.dt = 1e-4;
        c.t_final = 0.5;
        c.center = {10.0, 10.0};
        c.scale = 1.0;
        c.nquad_factor = 2;
        c.snapshots = {0.005, 0.1, 0.3, 0.5};
        c.cross_sections = {"diag"};
        c.window = {0.0, 20.0, 0.0, 20.0};
    };
    s.build = [](const ScenarioConfig& c, int N) {
        DvweProblem p = base_problem(c, 2, N);
        p.alpha = Coefficient::constant(1.0);
        p.beta = Coefficient::constant(0.01);
        p.gamma = Coefficient::constant(20.0);
        p.source = Source::separable(
            [](double x, double y) { return std::exp(-((x - 10.0) * (x - 10.0) + (y - 10.0) * (y - 10.0))); },
            [](double t) { return ricker(t, 15.0, 0.05); });
        return p;
    };
    s.describe = [](const ScenarioConfig&) {
        return std::vector<std::pair<std::string, std::string>>{{"alpha", "1"},       {"beta", "0.01"},
                                                                {"gamma", "20"},      {"source_center", "10, 10"},
                                                                {"ricker_f0", "15"},  {"ricker_t0", "0.05"}};
    };
    return s;
}

/// Two-layer medium: (alpha, beta, gamma) = (1.0, 0.02, 15.6) for y <= 16.5,
/// (2.5, 0.05, 20.4) above. The interface value belongs to the lower layer.
constexpr double kInterface = 16.5;

inline double layered(double y, double below, double above) { return y <= kInterface ? below : above; }

inline Scenario layered_scenario() {
    Scenario s;
    s.id = "EX5";
    s.dims = 2;
    s.kind = RunKind::wavefield;
    s.description = "2D two-layer medium split at y=16.5, Ricker f0=20 at (15,15), t0=0.05";
    s.set_defaults = [](ScenarioConfig& c) {
        c.n_list = {150, 300};
        c.dt = 1e-4;
        c.t_final = 0.8;
        c.center = {15.0, 15.0};
        c.scale = 1.0;
        c.nquad_factor = 4;
        c.snapshots = {0.05, 0.15, 0.25, 0.4, 0.6, 0.8};
        c.cross_sections = {"x=17"};
        c.window = {0.0, 30.0, 0.0, 30.0};
    };
    s.build = [](const ScenarioConfig& c, int N) {
        DvweProblem p = base_problem(c, 2, N);
        p.alpha = Coefficient::along_axis(1, [](double y) { return layered(y, 1.0, 2.5); }, {kInterface});
        p.beta = Coefficient::along_axis(1, [](double y) { return layered(y, 0.02, 0.05); }, {kInterface});
        p.gamma = Coefficient::along_axis(1, [](double y) { return layered(y, 15.6, 20.4); }, {kInterface});
        p.source = Source::separable(
            [](double x, double y) { return std::exp(-((x - 15.0) * (x - 15.0) + (y - 15.0) * (y - 15.0))); },
            [](double t) { return ricker(t, 20.0, 0.05); });
        return p;
    };
    s.describe = [](const ScenarioConfig&) {
        return std::vector<std::pair<std::string, std::string>>{
            {"alpha", "1.0 (y<=16.5) / 2.5 (y>16.5)"}, {"beta", "0.02 (y<=16.5) / 0.05 (y>16.5)"},
            {"gamma", "15.6 (y<=16.5) / 20.4 (y>16.5)"}, {"source_center", "15, 15"},
            {"ricker_f0", "20"}, {"ricker_t0", "0.05"},
            {"coefficient_quadrature", "composite Gauss-Legendre split at y=16.5"}};
    };
    return s;
}

inline Scenario custom_scenario() {
    Scenario s;
    s.id = "CUSTOM";
    s.dims = 2;
    s.kind = RunKind::wavefield;
    s.description = "constant-coefficient problem from custom.* keys (Ricker or no source, Gaussian data)";
    s.set_defaults = [](ScenarioConfig& c) {
        c.n_list = {64};
        c.dt = 1e-4;
        c.t_final = 0.1;
        c.center = {0.0, 0.0};
        c.scale = 1.0;
        c.nquad_factor = 2;
        c.snapshots = {};
        c.cross_sections = {};
    };
    s.build = [](const ScenarioConfig& c, int N) {
        const CustomProblem& q = c.custom;
        DvweProblem p = base_problem(c, q.dims, N);
        p.alpha = Coefficient::constant(q.alpha);
        p.beta = Coefficient::constant(q.beta);
        p.gamma = Coefficient::constant(q.gamma);
        const double x0 = q.source_center.empty() ? 0.0 : q.source_center[0];
        const double y0 = q.source_center.size() > 1 ? q.source_center[1] : 0.0;
        const int dims = q.dims;
        auto bump = [x0, y0, dims](double x, double y) {
            const double r2 = (x - x0) * (x - x0) + (dims == 2 ? (y - y0) * (y - y0) : 0.0);
            return std::exp(-r2);
        };
        if (q.source == "ricker") {
            const double f0 = q.f0, t0 = q.t0;
            p.source = Source::separable(bump, [f0, t0](double t) { return ricker(t, f0, t0); });
        }
        const double a = q.u0_amplitude, b = q.w0_amplitude;
        p.u0 = [bump, a](double x, double y) { return a * bump(x, y); };
        p.w0 = [bump, b](double x, double y) { return b * bump(x, y); };
        return p;
    };
    s.describe = [](const ScenarioConfig& c) {
        const CustomProblem& q = c.custom;
        std::string center;
        for (std::size_t i = 0; i < q.source_center.size(); ++i)
            center += (i ? ", " : "") + fmt_num(q.source_center[i]);
        return std::vector<std::pair<std::string, std::string>>{
            {"alpha", fmt_num(q.alpha)}, {"beta", fmt_num(q.beta)},   {"gamma", fmt_num(q.gamma)},
            {"source", q.source},        {"source_center", center},  {"ricker_f0", fmt_num(q.f0)},
            {"ricker_t0", fmt_num(q.t0)}, {"u0_amplitude", fmt_num(q.u0_amplitude)},
            {"w0_amplitude", fmt_num(q.w0_amplitude)}};
    };
    return s;
}

} // namespace detail

inline const std::vector<Scenario>& scenario_catalog() {
    static const std::vector<Scenario> catalog = [] {
        std::vector<Scenario> c;
        c.push_back(detail::smooth_scenario("EX1_I", 1, false));
        c.push_back(detail::smooth_scenario("EX1_II", 1, true));
        c.push_back(detail::smooth_scenario("EX2_I", 2, false));
        c.push_back(detail::smooth_scenario("EX2_II", 2, true));
        c.push_back(detail::nonsmooth_scenario());
        c.push_back(detail::homogeneous_scenario());
        c.push_back(detail::layered_scenario());
        c.push_back(detail::custom_scenario());
        return c;
    }();
    return catalog;
}

inline const Scenario& find_scenario(const std::string& id) {
    for (const auto& s : scenario_catalog())
        if (s.id == id)
            return s;
    throw ConfigError("unknown scenario '" + id + "'");
}

/// Scenario defaults as a config.
inline ScenarioConfig default_config(const std::string& id) {
    const Scenario& s = find_scenario(id);
    ScenarioConfig c;
    c.scenario = id;
    s.set_defaults(c);
    return c;
}

/// PDE residual of an exact solution with constant alpha, beta, gamma.
inline double pde_residual(const ExactSolution& e, const DvweProblem& p, double x, double y, double t) {
    const double a = p.alpha(x, y), b = p.beta(x, y), g = p.gamma(x, y);
    return e.u_tt(x, y, t) + a * e.u_t(x, y, t) - b * e.lap_t(x, y, t) - g * g * e.lap(x, y, t) - p.source(x, y, t);
}

} // namespace hermwave

#endif
