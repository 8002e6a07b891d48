// hermwave command line: run a scenario config, list the catalog, or run the
// acceptance suite.

#include "acceptance_suite.hpp"
#include "hermwave.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <mutex>

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, int threads,
            const std::vector<std::string>& overrides) {
    hermwave::ConfigEntries entries = hermwave::read_config_file(config_path);
    for (const auto& o : overrides)
        hermwave::add_override(entries, o);
    if (threads > 0)
        hermwave::add_override(entries, "threads=" + std::to_string(threads));
    if (!out_dir.empty())
        hermwave::add_override(entries, "output_dir=" + out_dir);
    const hermwave::ScenarioConfig cfg = hermwave::resolve_config(entries);

    std::mutex log_mutex;
    auto log = [&](std::string_view msg) {
        std::lock_guard lock(log_mutex);
        std::cout << "[" << cfg.scenario << "] " << msg << '\n' << std::flush;
    };
    const hermwave::RunResult result = hermwave::run_scenario(cfg, log);
    hermwave::emit_outputs(result, cfg.output_dir);

    for (const auto& row : result.errors) {
        std::printf("N=%4d  L2=%.3e  Linf=%.3e", row.N, row.l2_error, row.linf_error);
        if (row.h1_error)
            std::printf("  H1=%.3e", *row.h1_error);
        if (row.rate_l2)
            std::printf("  (L2 rate %.3f)", *row.rate_l2);
        std::printf("\n");
    }
    for (const auto& c : result.comparisons)
        std::printf("%s t=%g N=%d vs %d: max diff %.3e (%.2f%% of peak)\n", c.section.c_str(), c.time, c.n_coarse,
                    c.n_fine, c.max_abs_diff, 100 * c.relative());
    std::cout << "outputs written to " << cfg.output_dir << '\n';
    return 0;
}

int cmd_list() {
    for (const auto& s : hermwave::scenario_catalog()) {
        const hermwave::ScenarioConfig c = hermwave::default_config(s.id);
        std::string ns;
        for (int n : c.n_list)
            ns += (ns.empty() ? "" : ",") + std::to_string(n);
        std::printf("%-7s %dD  N=%s  T=%g  dt=%g\n        %s\n", s.id.c_str(), s.dims, ns.c_str(), c.t_final, c.dt,
                    s.description.c_str());
    }
    return 0;
}

int cmd_verify(const std::vector<int>& only, int threads, bool quick_ex5) {
    hermwave::acceptance::Options opts;
    opts.threads = std::max(1, threads);
    if (quick_ex5) {
        opts.ex5_coarse = 80;
        opts.ex5_fine = 160;
    }
    bool all = true;
    hermwave::acceptance::run_all(opts, only, [&](const hermwave::acceptance::Outcome& o) {
        std::cout << hermwave::acceptance::format(o) << '\n' << std::flush;
        all = all && o.passed;
    });
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hermite spectral Galerkin solver for the diffusive-viscous wave equation"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    std::vector<std::string> overrides;
    auto* run = app.add_subcommand("run", "run a scenario described by a config file");
    run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory (overrides output_dir)");
    run->add_option("--threads", threads, "worker threads over N values")->check(CLI::PositiveNumber);
    run->add_option("--override", overrides, "key=value applied after the config file")->allow_extra_args(false);

    app.add_subcommand("list-scenarios", "list the built-in scenarios");

    std::vector<int> only;
    int verify_threads = 1;
    bool quick_ex5 = false;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--only", only, "criterion numbers to run (default: all)")->delimiter(',');
    verify->add_option("--threads", verify_threads, "worker threads")->check(CLI::PositiveNumber);
    verify->add_flag("--quick-ex5", quick_ex5, "EX5 self-convergence at N=80/160 instead of 150/300");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run)
            return cmd_run(config_path, out_dir, threads, overrides);
        if (*verify)
            return cmd_verify(only, verify_threads, quick_ex5);
        return cmd_list();
    } catch (const hermwave::Error& e) {
        std::cerr << "hermwave: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hermwave: unexpected error: " << e.what() << '\n';
        return 3;
    }
}
