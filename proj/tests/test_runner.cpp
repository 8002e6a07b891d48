#include "hermwave/config.hpp"
#include "hermwave/io.hpp"
#include "hermwave/runner.hpp"
#include "hermwave/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace hermwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hermwave_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ScenarioConfig parse(const std::string& text) { return resolve_config(parse_config_text(text)); }

std::string manifest_value(const io::Manifest& m, const std::string& key) {
    for (const auto& [k, v] : m)
        if (k == key)
            return v;
    return "<missing>";
}

} // namespace

TEST(Config, MinimalSelectsDefaults) {
    const ScenarioConfig c = parse("scenario = EX1_I\n");
    EXPECT_EQ(c.n_list, (std::vector<int>{10, 15, 20, 25, 30, 35, 40, 45, 50}));
    EXPECT_EQ(c.dt, 1e-4);
    EXPECT_EQ(c.t_final, 1.0);
    EXPECT_EQ(c.center, std::vector<double>{0.0});
    EXPECT_EQ(c.scale, 1.0);
}

TEST(Config, ParsesAllDocumentedKeys) {
    const ScenarioConfig c = parse(R"(# comment line
scenario = EX4
N_list = 40, 60     # trailing comment
dt = 2e-4
T_final = 0.2
basis.center = 10, 10
basis.scale = 1.5
nquad_factor = 3
snapshots = 0.005, 0.1
cross_sections = diag, x=12.5
outputs = snapshots, manifest
)");
    EXPECT_EQ(c.scenario, "EX4");
    EXPECT_EQ(c.n_list, (std::vector<int>{40, 60}));
    EXPECT_EQ(c.dt, 2e-4);
    EXPECT_EQ(c.t_final, 0.2);
    EXPECT_EQ(c.center, (std::vector<double>{10.0, 10.0}));
    EXPECT_EQ(c.scale, 1.5);
    EXPECT_EQ(c.nquad_factor, 3);
    EXPECT_EQ(c.snapshots, (std::vector<double>{0.005, 0.1}));
    EXPECT_EQ(c.cross_sections, (std::vector<std::string>{"diag", "x=12.5"}));
    EXPECT_TRUE(c.wants("snapshots"));
    EXPECT_FALSE(c.wants("energy"));
}

TEST(Config, FractionsAccepted) { EXPECT_NEAR(parse("scenario = EX3\nmu = 4/3\n").mu, 4.0 / 3.0, 1e-15); }

TEST(Config, RejectsUnknownKey) {
    try {
        parse("scenario = EX1_I\ntime_step = 0.1\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("time_step"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Config, NegativeDtNamesKey) {
    try {
        parse("scenario = EX1_I\ndt = -1e-4\n");
        FAIL();
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("'dt'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("positive real"), std::string::npos) << msg;
    }
}

TEST(Config, InvalidValuesNameKeyAndType) {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"N_list = 10, abc", "N_list"},     {"N_list = 20, 10", "N_list"},   {"T_final = -1", "T_final"},
        {"basis.scale = 0", "basis.scale"}, {"nquad_factor = 1.5", "nquad_factor"}, {"snapshots = 5", "snapshots"},
        {"basis.center = 1, 2", "basis.center"}, {"outputs = pictures", "outputs"},
        {"cross_sections = z=3", "cross_sections"}, {"dt = fast", "dt"}};
    for (const auto& [line, key] : cases) {
        try {
            parse("scenario = EX1_I\n" + line + "\n");
            ADD_FAILURE() << "accepted: " << line;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
        }
    }
    EXPECT_THROW(parse("dt = 1e-4\n"), ConfigError);
    EXPECT_THROW(parse("scenario = EX9\n"), ConfigError);
    EXPECT_THROW(parse("scenario EX1_I\n"), ConfigError);
    EXPECT_THROW(parse("scenario = EX3\nreference_N = 100\n"), ConfigError);
}

TEST(Config, OverridesApplyLast) {
    ConfigEntries e = parse_config_text("scenario = EX1_I\ndt = 1e-3\n");
    add_override(e, "dt=5e-4");
    add_override(e, "N_list=10,20");
    const ScenarioConfig c = resolve_config(e);
    EXPECT_EQ(c.dt, 5e-4);
    EXPECT_EQ(c.n_list, (std::vector<int>{10, 20}));
    EXPECT_THROW(add_override(e, "bogus=1"), ConfigError);
}

TEST(Config, ReadsFile) {
    const fs::path dir = scratch("config_file");
    std::ofstream(dir / "run.cfg") << "scenario = EX2_I\nN_list = 10\n";
    const ScenarioConfig c = resolve_config(read_config_file(dir / "run.cfg"));
    EXPECT_EQ(c.scenario, "EX2_I");
    EXPECT_THROW(read_config_file(dir / "missing.cfg"), ConfigError);
}

TEST(Catalog, ContainsAllScenarios) {
    for (const char* id : {"EX1_I", "EX1_II", "EX2_I", "EX2_II", "EX3", "EX4", "EX5", "CUSTOM"})
        EXPECT_NO_THROW(find_scenario(id)) << id;
    EXPECT_THROW(find_scenario("EX6"), ConfigError);
    const ScenarioConfig ex4 = default_config("EX4");
    EXPECT_EQ(ex4.center, (std::vector<double>{10.0, 10.0}));
    const ScenarioConfig ex5 = default_config("EX5");
    EXPECT_EQ(ex5.center, (std::vector<double>{15.0, 15.0}));
    EXPECT_EQ(ex5.nquad_factor, 4);
    EXPECT_EQ(default_config("EX3").reference_n, 256);
}

TEST(Catalog, ExactSolutionsSatisfyPde) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> space(-3.0, 3.0), time(0.0, 1.0);
    for (const char* id : {"EX1_I", "EX1_II", "EX2_I", "EX2_II"}) {
        const Scenario& s = find_scenario(id);
        ASSERT_TRUE(s.exact.has_value()) << id;
        const DvweProblem p = s.build(default_config(id), 10);
        for (int k = 0; k < 100; ++k) {
            const double x = space(rng), y = s.dims == 2 ? space(rng) : 0.0, t = time(rng);
            ASSERT_LE(std::abs(pde_residual(*s.exact, p, x, y, t)), 1e-8) << id << " at " << x << "," << y << "," << t;
            ASSERT_NEAR(s.exact->u(x, y, 0.0), p.u0(x, y), 1e-14) << id;
            ASSERT_NEAR(s.exact->u_t(x, y, 0.0), p.w0(x, y), 1e-14) << id;
        }
    }
}

TEST(Catalog, WavefieldCoefficients) {
    const DvweProblem p4 = find_scenario("EX4").build(default_config("EX4"), 20);
    EXPECT_EQ(p4.alpha(3.0, 4.0), 1.0);
    EXPECT_EQ(p4.beta(3.0, 4.0), 0.01);
    EXPECT_EQ(p4.gamma(3.0, 4.0), 20.0);
    EXPECT_NEAR(p4.source(10.0, 10.0, 0.05), 1.0, 1e-15);

    const DvweProblem p5 = find_scenario("EX5").build(default_config("EX5"), 20);
    EXPECT_EQ(p5.alpha.kind, Coefficient::Kind::single_coordinate);
    EXPECT_EQ(p5.gamma(0.0, 16.5), 15.6); // interface belongs to the lower layer
    EXPECT_EQ(p5.gamma(0.0, 16.6), 20.4);
    EXPECT_EQ(p5.beta(0.0, 10.0), 0.02);
    EXPECT_EQ(p5.alpha(0.0, 20.0), 2.5);
    EXPECT_NEAR(p5.source(15.0, 15.0, 0.05), 1.0, 1e-15);
}

TEST(Io, ErrorsRoundTrip) {
    const fs::path dir = scratch("io_errors");
    std::vector<ErrorReport> rows(3);
    for (int i = 0; i < 3; ++i) {
        rows[i].N = 10 * (i + 1);
        rows[i].l2_error = std::pow(0.1, i + 3) / 3;
        rows[i].linf_error = 4.9e-320 * (i + 1); // subnormal survives
        rows[i].h1_error = 0.5 / (i + 1);
    }
    fill_rates(rows);
    io::write_errors_csv(dir / "errors.csv", rows);
    const std::string text = slurp(dir / "errors.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), "N,L2,L2_rate,Linf,Linf_rate,H1,H1_rate");
    const auto back = io::read_errors_csv(dir / "errors.csv");
    ASSERT_EQ(back.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(back[i].N, rows[i].N);
        EXPECT_EQ(back[i].l2_error, rows[i].l2_error);
        EXPECT_EQ(back[i].linf_error, rows[i].linf_error);
        EXPECT_EQ(back[i].h1_error, rows[i].h1_error);
        EXPECT_EQ(back[i].rate_l2, rows[i].rate_l2);
        EXPECT_EQ(back[i].rate_h1, rows[i].rate_h1);
    }
    for (auto& r : rows)
        r.h1_error.reset();
    io::write_errors_csv(dir / "plain.csv", rows);
    EXPECT_EQ(slurp(dir / "plain.csv").substr(0, 25), "N,L2,L2_rate,Linf,Linf_ra");
    EXPECT_FALSE(io::read_errors_csv(dir / "plain.csv")[1].h1_error.has_value());
}

TEST(Io, EnergySnapshotSectionManifestCoefficientsRoundTrip) {
    const fs::path dir = scratch("io_all");
    const std::vector<std::pair<double, double>> energy{{0.0, 1.0 / 3.0}, {1e-3, 0.1}, {2e-3, 1e-17}};
    io::write_energy_csv(dir / "energy.csv", energy);
    EXPECT_EQ(io::read_energy_csv(dir / "energy.csv"), energy);

    io::Snapshot snap;
    snap.window = {0.0, 20.0, -1.0, 30.5};
    snap.time = 0.005;
    snap.values = Eigen::MatrixXd::Random(4, 7);
    io::write_snapshot(dir / "snap.txt", snap);
    const io::Snapshot s2 = io::read_snapshot(dir / "snap.txt");
    EXPECT_EQ(s2.window, snap.window);
    EXPECT_EQ(s2.time, snap.time);
    EXPECT_EQ(s2.values, snap.values);
    EXPECT_EQ(slurp(dir / "snap.txt").substr(0, 17), "# nx 7\n# ny 4\n# w");

    io::CrossSection c{"x=17", 0.4, {0.0, 1.0}, {17.0, 17.0}, {0.0, 1.0}, {1e-3, -2.5}};
    io::write_cross_section(dir / "xsec.csv", c);
    const io::CrossSection c2 = io::read_cross_section(dir / "xsec.csv");
    EXPECT_EQ(c2.name, c.name);
    EXPECT_EQ(c2.time, c.time);
    EXPECT_EQ(c2.u, c.u);
    EXPECT_EQ(c2.x, c.x);

    const io::Manifest m{{"scenario", "EX4"}, {"basis.center", "10, 10"}, {"note", "a = b"}};
    io::write_manifest(dir / "manifest.txt", m);
    EXPECT_EQ(io::read_manifest(dir / "manifest.txt"), m);

    const SpectralField f({BasisSpec{3, 10.0, 1.25}, BasisSpec{2, -1.0, 0.5}}, Eigen::MatrixXd::Random(4, 3));
    io::write_coefficients(dir / "coeffs.txt", f);
    const SpectralField g = io::read_coefficients(dir / "coeffs.txt");
    EXPECT_EQ(g.basis, f.basis);
    EXPECT_EQ(g.coeffs, f.coeffs);
}

TEST(Io, MalformedInputsRejected) {
    const fs::path dir = scratch("io_bad");
    std::ofstream(dir / "bad.csv") << "N,L2,L2_rate,Linf,Linf_rate\n10,abc,,1,\n";
    EXPECT_THROW(io::read_errors_csv(dir / "bad.csv"), Error);
    std::ofstream(dir / "bad_snap.txt") << "# nx 2\n# ny 1\n# window 0 1 0 1\n# time 0\n1\n";
    EXPECT_THROW(io::read_snapshot(dir / "bad_snap.txt"), Error);
    EXPECT_THROW(io::read_energy_csv(dir / "none.csv"), Error);
}

TEST(Runner, Ex1ErrorColumn) {
    const fs::path dir = scratch("ex1");
    ScenarioConfig c = parse("scenario = EX1_I\nN_list = 10, 20\n");
    c.output_dir = dir.string();
    const RunResult r = run_scenario(c);
    emit_outputs(r, dir);
    const auto rows = io::read_errors_csv(dir / "errors.csv");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].N, 20);
    EXPECT_GT(rows[1].l2_error, 9.792e-7 / 2);
    EXPECT_LT(rows[1].l2_error, 9.792e-7 * 2);
    EXPECT_TRUE(rows[1].rate_l2.has_value());
    EXPECT_FALSE(rows[0].rate_l2.has_value());
    ASSERT_TRUE(rows[1].h1_error.has_value());
    EXPECT_GE(*rows[1].h1_error, rows[1].l2_error);
    EXPECT_TRUE(rows[1].rate_h1.has_value());
    const auto energy = io::read_energy_csv(dir / "N20" / "energy.csv");
    EXPECT_EQ(energy.front().first, 0.0);
    EXPECT_EQ(energy.back().first, 1.0);
    EXPECT_EQ(manifest_value(io::read_manifest(dir / "manifest.txt"), "scenario"), "EX1_I");
}

TEST(Runner, Ex2FirstRow) {
    ScenarioConfig c = parse("scenario = EX2_I\nN_list = 10\n");
    const RunResult r = run_convergence(c);
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_GT(r.errors[0].l2_error, 7.181e-4 / 2);
    EXPECT_LT(r.errors[0].l2_error, 7.181e-4 * 2);
}

TEST(Runner, ZeroFinalTimeGivesProjectionError) {
    for (const char* id : {"EX1_II", "EX2_I"}) {
        ScenarioConfig c = parse(std::string("scenario = ") + id + "\nN_list = 8, 12\nT_final = 0\n");
        const RunResult r = run_convergence(c);
        const Scenario& s = find_scenario(id);
        for (const auto& row : r.errors) {
            const DvweProblem p = s.build(c, row.N);
            double expect = 0;
            if (s.dims == 1) {
                const SpectralField u0 = project(p.basis[0], [&](double x) { return p.u0(x, 0.0); });
                expect = l2_error(u0, [&](double x) { return s.exact->u(x, 0.0, 0.0); });
            } else {
                const SpectralField u0 = project(p.basis[0], p.basis[1], p.u0);
                expect = l2_error(u0, [&](double x, double y) { return s.exact->u(x, y, 0.0); });
            }
            EXPECT_EQ(row.l2_error, expect) << id << " N=" << row.N;
        }
    }
}

TEST(Runner, ReferenceRunForEx3) {
    const fs::path dir = scratch("ex3");
    ScenarioConfig c = parse("scenario = EX3\nN_list = 16, 24, 32\nreference_N = 64\nT_final = 0.05\n");
    const RunResult r = run_scenario(c);
    emit_outputs(r, dir);
    ASSERT_TRUE(r.reference.has_value());
    EXPECT_EQ(r.reference->basis[0].degree, 64);
    const SpectralField ref = io::read_coefficients(dir / "reference_N64.txt");
    EXPECT_EQ(ref.coeffs, r.reference->coeffs);
    const auto rows = io::read_errors_csv(dir / "errors.csv");
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& row : rows) {
        ASSERT_TRUE(row.h1_error.has_value());
        EXPECT_GE(*row.h1_error, row.l2_error);
    }
    EXPECT_LT(*rows[2].h1_error, *rows[0].h1_error);
}

TEST(Runner, WavefieldOutputsAndManifest) {
    const fs::path dir = scratch("ex4");
    ScenarioConfig c = parse(R"(scenario = EX4
N_list = 24, 32
T_final = 0.01
snapshots = 0.005, 0.01
cross_sections = diag, y=10
basis.center = 10, 10
grid_points = 41
)");
    const RunResult r = run_scenario(c);
    emit_outputs(r, dir);
    const io::Snapshot s = io::read_snapshot(dir / "N32" / "snap_t0.005.txt");
    EXPECT_EQ(s.nx(), 41);
    EXPECT_EQ(s.window, (std::array<double, 4>{0.0, 20.0, 0.0, 20.0}));
    EXPECT_TRUE(fs::exists(dir / "N24" / "snap_t0.01.txt"));
    const io::CrossSection d = io::read_cross_section(dir / "N32" / "xsec_diag_t0.01.csv");
    EXPECT_EQ(d.u.size(), 81u);
    EXPECT_EQ(d.x, d.y);
    EXPECT_TRUE(fs::exists(dir / "N32" / "xsec_y10_t0.005.csv"));
    EXPECT_TRUE(fs::exists(dir / "xsec_compare.csv"));
    EXPECT_EQ(r.comparisons.size(), 4u);
    EXPECT_FALSE(fs::exists(dir / "errors.csv"));

    const auto energy = io::read_energy_csv(dir / "N32" / "energy.csv");
    for (std::size_t i = 1; i < energy.size(); ++i)
        ASSERT_GT(energy[i].first, energy[i - 1].first);
    EXPECT_EQ(energy.back().first, 0.01);

    const io::Manifest m = io::read_manifest(dir / "manifest.txt");
    EXPECT_EQ(manifest_value(m, "basis.center"), "10, 10");
    EXPECT_EQ(manifest_value(m, "gamma"), "20");
    EXPECT_EQ(manifest_value(m, "N_list"), "24, 32");
    EXPECT_NE(manifest_value(m, "workers"), "<missing>");
}

TEST(Runner, EX4SnapshotSymmetricAndCentered) {
    ScenarioConfig c = parse("scenario = EX4\nN_list = 40\nT_final = 0.005\nsnapshots = 0.005\ncross_sections = diag\n");
    const RunResult r = run_wavefield(c);
    const Eigen::MatrixXd& v = r.runs[0].snapshots[0].values;
    EXPECT_LE((v - v.transpose()).cwiseAbs().maxCoeff(), 1e-9 * v.cwiseAbs().maxCoeff());
    Eigen::Index i = 0, j = 0;
    v.cwiseAbs().maxCoeff(&i, &j);
    EXPECT_LE(std::abs(static_cast<double>(i) - 100), 1);
    EXPECT_LE(std::abs(static_cast<double>(j) - 100), 1);
}

TEST(Runner, ReproducibleAcrossRunsAndThreads) {
    const std::string cfg = "scenario = EX2_II\nN_list = 8, 12, 16\nT_final = 0.05\n";
    const fs::path a = scratch("repro_a"), b = scratch("repro_b");
    ScenarioConfig c1 = parse(cfg + "threads = 1\n");
    ScenarioConfig c3 = parse(cfg + "threads = 3\n");
    emit_outputs(run_scenario(c1), a);
    emit_outputs(run_scenario(c3), b);
    EXPECT_EQ(slurp(a / "errors.csv"), slurp(b / "errors.csv"));
    EXPECT_EQ(slurp(a / "N16" / "energy.csv"), slurp(b / "N16" / "energy.csv"));
}

TEST(Runner, DivergenceNamesScenarioAndDegree) {
    ScenarioConfig c = parse("scenario = EX4\nN_list = 60\ndt = 0.05\nT_final = 50\nsnapshots =\ncross_sections =\n");
    try {
        run_wavefield(c);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("EX4"), std::string::npos) << msg;
        EXPECT_NE(msg.find("N=60"), std::string::npos) << msg;
        EXPECT_NE(msg.find("step"), std::string::npos) << msg;
    }
}

TEST(Runner, ConvergenceNeedsExactOrReference) {
    ScenarioConfig c = parse("scenario = EX4\nN_list = 10\n");
    EXPECT_THROW(run_convergence(c), ConfigError);
}

TEST(Runner, CustomScenario) {
    ScenarioConfig c = parse(R"(scenario = CUSTOM
custom.dims = 1
custom.source = none
custom.u0_amplitude = 1
N_list = 16
T_final = 0.01
)");
    const RunResult r = run_wavefield(c);
    ASSERT_EQ(r.runs.size(), 1u);
    EXPECT_GT(r.runs[0].final_u.norm(), 0.0);
    EXPECT_EQ(r.runs[0].final_u.dims(), 1);
}
