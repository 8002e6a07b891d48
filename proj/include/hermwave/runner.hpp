#ifndef HERMWAVE_RUNNER_HPP
#define HERMWAVE_RUNNER_HPP

// Config-driven scenario runs: convergence sweeps with error tables, and
// wavefield runs with snapshots, cross-sections and energy histories.

#include "hermwave/config.hpp"
#include "hermwave/diagnostics.hpp"
#include "hermwave/dvwe.hpp"
#include "hermwave/io.hpp"
#include "hermwave/scenarios.hpp"
#include "hermwave/ssprk3.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace hermwave {

/// Everything produced by one degree N.
struct DegreeRun {
    int N = 0;
    SpectralField final_u;
    std::vector<std::pair<double, double>> energy;
    std::vector<io::Snapshot> snapshots;
    std::vector<io::CrossSection> cross_sections;
};

/// Sup-norm difference of one cross-section between two resolutions.
struct CrossSectionComparison {
    std::string section;
    double time = 0.0;
    int n_coarse = 0;
    int n_fine = 0;
    double max_abs_diff = 0.0;
    double peak = 0.0; // max |u| of the finer run

    double relative() const { return peak > 0.0 ? max_abs_diff / peak : 0.0; }
};

struct RunResult {
    ScenarioConfig config;
    std::vector<ErrorReport> errors; // empty for wavefield runs
    std::vector<DegreeRun> runs;
    std::optional<SpectralField> reference;
    std::vector<CrossSectionComparison> comparisons;
    io::Manifest manifest;
};

using RunLog = std::function<void(std::string_view)>;

namespace detail {

inline std::array<double, 4> display_window(const ScenarioConfig& c) {
    if (c.window[1] > c.window[0] && c.window[3] > c.window[2])
        return c.window;
    const double cx = c.center.empty() ? 0.0 : c.center[0];
    const double cy = c.center.size() > 1 ? c.center[1] : 0.0;
    const double h = 10.0 * c.scale;
    return {cx - h, cx + h, cy - h, cy + h};
}

inline std::string section_file_tag(const std::string& name) {
    std::string out;
    for (char ch : name)
        if (ch != '=')
            out += ch;
    return out;
}

inline io::CrossSection cross_section(const SpectralField& u, const std::string& name, double time,
                                      const std::array<double, 4>& w, int points) {
    io::CrossSection c;
    c.name = name;
    c.time = time;
    if (name == "diag") {
        c.x = uniform_grid(w[0], w[1], points);
        c.y = uniform_grid(w[2], w[3], points);
        c.s = c.x;
    } else {
        double v = 0;
        parse_real(name.substr(2), v);
        if (name[0] == 'x') {
            c.y = uniform_grid(w[2], w[3], points);
            c.x.assign(c.y.size(), v);
            c.s = c.y;
        } else {
            c.x = uniform_grid(w[0], w[1], points);
            c.y.assign(c.x.size(), v);
            c.s = c.x;
        }
    }
    c.u = evaluate(u, c.x, c.y);
    return c;
}

inline io::Snapshot snapshot(const SpectralField& u, double time, const std::array<double, 4>& w, int points) {
    const auto xs = uniform_grid(w[0], w[1], points);
    const auto ys = uniform_grid(w[2], w[3], points);
    io::Snapshot s;
    s.window = w;
    s.time = time;
    s.values = evaluate_grid(u, xs, ys).transpose();
    return s;
}

inline DegreeRun run_degree(const ScenarioConfig& cfg, const Scenario& scenario, int N, bool record_energy) {
    const DvweProblem problem = scenario.build(cfg, N);
    const SemiDiscreteSystem system = assemble(problem);
    auto [u0, v0] = initial_coefficients(problem);

    DegreeRun out;
    out.N = N;
    std::vector<Observer> observers;
    if (record_energy) {
        observers.push_back({static_cast<std::size_t>(cfg.energy_every), [&](const StateVector& s, std::size_t) {
                                 if (out.energy.empty() || s.t > out.energy.back().first)
                                     out.energy.emplace_back(s.t, energy(system, s.u, s.v));
                             }});
    }

    std::vector<double> stops;
    if (problem.dims == 2)
        stops = cfg.snapshots;
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    const auto window = display_window(cfg);
    const int section_points = 2 * cfg.grid_points - 1;
    StateVector state{std::move(u0), std::move(v0), 0.0};
    auto record = [&](double t) {
        const SpectralField u = system.as_field(state.u);
        if (cfg.wants("snapshots"))
            out.snapshots.push_back(snapshot(u, t, window, cfg.grid_points));
        for (const auto& name : cfg.cross_sections)
            out.cross_sections.push_back(cross_section(u, name, t, window, section_points));
    };
    for (double t : stops) {
        state = integrate(system, state, problem.dt, t, observers);
        record(t);
    }
    if (state.t < problem.t_final || stops.empty())
        state = integrate(system, state, problem.dt, problem.t_final, observers);
    out.final_u = system.as_field(state.u);
    return out;
}

/// Run `job(i)` for i in [0, count) on up to `threads` workers. The first
/// exception is rethrown after all workers stop.
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

inline DegreeRun run_degree_checked(const ScenarioConfig& cfg, const Scenario& scenario, int N, bool energy) {
    try {
        return run_degree(cfg, scenario, N, energy);
    } catch (const DivergenceError& e) {
        throw DivergenceError("scenario " + cfg.scenario + ", N=" + std::to_string(N) + ": " + e.what(), e.step(),
                              e.time());
    } catch (const Error& e) {
        throw Error("scenario " + cfg.scenario + ", N=" + std::to_string(N) + ": " + e.what());
    }
}

inline io::Manifest build_manifest(const ScenarioConfig& cfg, const Scenario& scenario) {
    io::Manifest m = config_summary(cfg);
    m.emplace_back("description", scenario.description);
    const int dims = cfg.scenario == "CUSTOM" ? cfg.custom.dims : scenario.dims;
    m.emplace_back("dims", std::to_string(dims));
    for (auto& kv : scenario.describe(cfg))
        m.push_back(std::move(kv));
    const auto w = display_window(cfg);
    m.emplace_back("display_window", io::num(w[0]) + ", " + io::num(w[1]) + ", " + io::num(w[2]) + ", " + io::num(w[3]));
    std::string nq;
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
        nq += (i ? ", " : "") + std::to_string(cfg.nquad_factor * (cfg.n_list[i] + 1));
    m.emplace_back("nquad_per_dimension", nq);
    m.emplace_back("time_integrator", "SSP-RK3, stage source times t, t+dt, t+dt/2");
    m.emplace_back("workers", std::to_string(std::min<std::size_t>(cfg.n_list.size(), static_cast<std::size_t>(cfg.threads))));
    return m;
}

} // namespace detail

inline std::vector<CrossSectionComparison> compare_cross_sections(const std::vector<DegreeRun>& runs) {
    std::vector<CrossSectionComparison> out;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        const auto& coarse = runs[r - 1];
        const auto& fine = runs[r];
        for (std::size_t k = 0; k < fine.cross_sections.size() && k < coarse.cross_sections.size(); ++k) {
            const auto& a = coarse.cross_sections[k];
            const auto& b = fine.cross_sections[k];
            CrossSectionComparison c{b.name, b.time, coarse.N, fine.N, 0.0, 0.0};
            for (std::size_t i = 0; i < b.u.size(); ++i) {
                c.max_abs_diff = std::max(c.max_abs_diff, std::abs(a.u[i] - b.u[i]));
                c.peak = std::max(c.peak, std::abs(b.u[i]));
            }
            out.push_back(c);
        }
    }
    return out;
}

inline void write_comparisons(const std::filesystem::path& path, const std::vector<CrossSectionComparison>& rows) {
    auto out = io::detail::open_out(path);
    out << "section,t,N_coarse,N_fine,max_abs_diff,peak,relative\n";
    for (const auto& c : rows)
        out << c.section << ',' << io::num(c.time) << ',' << c.n_coarse << ',' << c.n_fine << ',' << io::num(c.max_abs_diff)
            << ',' << io::num(c.peak) << ',' << io::num(c.relative()) << '\n';
}

/// Error table for a scenario with an exact solution or (EX3) a reference run.
inline RunResult run_convergence(const ScenarioConfig& cfg, const RunLog& log = {}) {
    const Scenario& scenario = find_scenario(cfg.scenario);
    if (!scenario.exact && cfg.scenario != "EX3")
        throw ConfigError("scenario " + cfg.scenario + " has neither an exact nor a reference solution");
    RunResult result;
    result.config = cfg;
    result.manifest = detail::build_manifest(cfg, scenario);

    const bool energy = cfg.wants("energy");
    if (cfg.scenario == "EX3") {
        if (log)
            log("reference run N=" + std::to_string(cfg.reference_n));
        result.reference = detail::run_degree_checked(cfg, scenario, cfg.reference_n, false).final_u;
    }

    result.runs.resize(cfg.n_list.size());
    detail::parallel_for(cfg.n_list.size(), cfg.threads, [&](std::size_t i) {
        result.runs[i] = detail::run_degree_checked(cfg, scenario, cfg.n_list[i], energy);
    });

    const double T = cfg.t_final;
    for (const auto& run : result.runs) {
        ErrorReport row;
        row.N = run.N;
        const SpectralField& u = run.final_u;
        if (u.dims() == 1) {
            const int points = cfg.linf_points > 0 ? cfg.linf_points : 2001;
            const auto grid = default_linf_grid(u.basis[0], points);
            if (result.reference) {
                const SpectralField& ref = *result.reference;
                row.l2_error = l2_distance(u, ref);
                row.h1_error = h1_distance(u, ref);
                const auto a = evaluate(u, grid);
                const auto b = evaluate(ref, grid);
                for (std::size_t k = 0; k < a.size(); ++k)
                    row.linf_error = std::max(row.linf_error, std::abs(a[k] - b[k]));
            } else {
                const auto& ex = *scenario.exact;
                auto exact = [&](double x) { return ex.u(x, 0.0, T); };
                row.l2_error = l2_error(u, exact);
                row.linf_error = linf_error(u, exact, grid);
                if (ex.u_x)
                    row.h1_error = h1_error(u, exact, [&](double x) { return ex.u_x(x, 0.0, T); });
            }
        } else {
            const auto& ex = *scenario.exact;
            const auto w = detail::display_window(cfg);
            const int points = cfg.linf_points > 0 ? cfg.linf_points : 201;
            const auto xs = uniform_grid(w[0], w[1], points);
            const auto ys = uniform_grid(w[2], w[3], points);
            auto exact = [&](double x, double y) { return ex.u(x, y, T); };
            row.l2_error = l2_error(u, exact);
            row.linf_error = linf_error(u, exact, xs, ys);
        }
        if (log) {
            std::ostringstream msg;
            msg << "N=" << row.N << " L2=" << row.l2_error << " Linf=" << row.linf_error;
            if (row.h1_error)
                msg << " H1=" << *row.h1_error;
            log(msg.str());
        }
        result.errors.push_back(row);
    }
    fill_rates(result.errors);
    return result;
}

/// Snapshots, cross-sections and energy for each degree in N_list, plus
/// cross-section agreement between consecutive degrees.
inline RunResult run_wavefield(const ScenarioConfig& cfg, const RunLog& log = {}) {
    const Scenario& scenario = find_scenario(cfg.scenario);
    RunResult result;
    result.config = cfg;
    result.manifest = detail::build_manifest(cfg, scenario);
    const bool energy = cfg.wants("energy");
    result.runs.resize(cfg.n_list.size());
    detail::parallel_for(cfg.n_list.size(), cfg.threads, [&](std::size_t i) {
        result.runs[i] = detail::run_degree_checked(cfg, scenario, cfg.n_list[i], energy);
        if (log)
            log("finished N=" + std::to_string(cfg.n_list[i]));
    });
    result.comparisons = compare_cross_sections(result.runs);
    return result;
}

inline RunResult run_scenario(const ScenarioConfig& cfg, const RunLog& log = {}) {
    const Scenario& scenario = find_scenario(cfg.scenario);
    return scenario.kind == RunKind::convergence ? run_convergence(cfg, log) : run_wavefield(cfg, log);
}

/// Write every requested output of a run under `dir`.
inline void emit_outputs(const RunResult& r, const std::filesystem::path& dir) {
    const ScenarioConfig& cfg = r.config;
    std::filesystem::create_directories(dir);
    if (cfg.wants("manifest"))
        io::write_manifest(dir / "manifest.txt", r.manifest);
    if (cfg.wants("errors") && !r.errors.empty())
        io::write_errors_csv(dir / "errors.csv", r.errors);
    if (cfg.wants("reference") && r.reference)
        io::write_coefficients(dir / ("reference_N" + std::to_string(cfg.reference_n) + ".txt"), *r.reference);
    for (const auto& run : r.runs) {
        const auto sub = dir / ("N" + std::to_string(run.N));
        if (cfg.wants("energy") && !run.energy.empty())
            io::write_energy_csv(sub / "energy.csv", run.energy);
        if (cfg.wants("snapshots"))
            for (const auto& s : run.snapshots)
                io::write_snapshot(sub / ("snap_t" + io::time_label(s.time) + ".txt"), s);
        if (cfg.wants("cross_sections"))
            for (const auto& c : run.cross_sections)
                io::write_cross_section(
                    sub / ("xsec_" + detail::section_file_tag(c.name) + "_t" + io::time_label(c.time) + ".csv"), c);
    }
    if (cfg.wants("cross_sections") && !r.comparisons.empty())
        write_comparisons(dir / "xsec_compare.csv", r.comparisons);
}

} // namespace hermwave

#endif
