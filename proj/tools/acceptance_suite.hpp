#ifndef HERMWAVE_ACCEPTANCE_SUITE_HPP
#define HERMWAVE_ACCEPTANCE_SUITE_HPP

// The eight acceptance criteria, shared by `hermwave verify` and the
// acceptance test binary. Each criterion returns pass/fail plus a one-line
// detail; wall time is part of the verdict.

#include "hermwave.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace hermwave::acceptance {

struct Outcome {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

struct Options {
    int threads = 1;
    // EX5 self-convergence pair; 150/300 is the full size, 80/160 the reduced one.
    int ex5_coarse = 150;
    int ex5_fine = 300;
    std::function<void(std::string_view)> log;
};

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline std::string fix(double v, int digits = 3) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

class Checks {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            passed_ = false;
            if (!failures_.empty())
                failures_ += "; ";
            failures_ += what;
        }
    }
    void note(const std::string& s) {
        if (!notes_.empty())
            notes_ += "; ";
        notes_ += s;
    }
    bool passed() const { return passed_; }
    std::string detail() const { return passed_ ? notes_ : "FAILED: " + failures_ + (notes_.empty() ? "" : " | " + notes_); }

private:
    bool passed_ = true;
    std::string failures_, notes_;
};

inline bool within_factor(double value, double target, double factor) {
    return value > 0.0 && value <= target * factor && value >= target / factor;
}

} // namespace detail

// 1. Orthonormality and Gauss-Hermite quadrature.
inline Outcome quadrature_suite() {
    detail::Checks c;
    double worst_gram = 0, worst_sum = 0, worst_moment = 0;
    for (int N : {8, 16, 32, 64}) {
        const QuadratureRule rule = gauss_hermite(N + 1);
        const Eigen::MatrixXd phi = hermite_fun_matrix(N, rule.nodes);
        const Eigen::MatrixXd gram = phi.transpose() * rule.scaled_weights.asDiagonal() * phi;
        const double g = (gram - Eigen::MatrixXd::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff();
        worst_gram = std::max(worst_gram, g);
        c.expect(g <= 1e-12, "Gram N=" + std::to_string(N) + " off by " + detail::sci(g));

        const int n = N; // moments of an n-point rule
        const QuadratureRule r = gauss_hermite(n);
        const double s = std::abs(r.weights.sum() - std::sqrt(std::numbers::pi));
        worst_sum = std::max(worst_sum, s);
        c.expect(s <= 1e-13, "sum of weights n=" + std::to_string(n) + " off by " + detail::sci(s));

        // int x^{2m} e^{-x^2} = Gamma(m + 1/2), built by the ratio (2m-1)/2.
        double exact_even = std::sqrt(std::numbers::pi);
        for (int k = 0; k <= 2 * n - 1; ++k) {
            if (k % 2 == 0 && k > 0)
                exact_even *= (k - 1) / 2.0;
            double sum = 0, abs_sum = 0;
            for (int q = 0; q < n; ++q) {
                const double term = r.weights[q] * std::pow(r.nodes[q], k);
                sum += term;
                abs_sum += std::abs(term);
            }
            const double err = k % 2 == 0 ? std::abs(sum / exact_even - 1.0) : std::abs(sum) / abs_sum;
            worst_moment = std::max(worst_moment, err);
            c.expect(err <= 1e-10, "moment x^" + std::to_string(k) + " n=" + std::to_string(n) + " rel err " +
                                       detail::sci(err));
        }
    }
    c.note("max Gram dev " + detail::sci(worst_gram) + ", weight-sum dev " + detail::sci(worst_sum) +
           ", moment rel err " + detail::sci(worst_moment));
    return {1, "orthonormality/quadrature", c.passed(), c.detail(), 0, 5};
}

// 2. Closed-form stiffness vs quadrature, Kronecker apply vs dense.
inline Outcome operator_oracles() {
    detail::Checks c;
    double worst_s = 0, worst_k = 0;
    for (double scale : {1.0, 0.7}) {
        for (int N = 0; N <= 32; ++N) {
            const BasisSpec spec{N, 0.3, scale};
            const QuadratureRule rule = gauss_hermite(2 * (N + 2));
            // derivative values from the three-term expansion, then quadrature
            const Eigen::MatrixXd phi = hermite_fun_matrix(N + 1, rule.nodes);
            Eigen::MatrixXd dphi(rule.size(), N + 1);
            for (int j = 0; j <= N; ++j) {
                dphi.col(j) = -std::sqrt((j + 1) / 2.0) * phi.col(j + 1);
                if (j > 0)
                    dphi.col(j) += std::sqrt(j / 2.0) * phi.col(j - 1);
            }
            const Eigen::MatrixXd quad =
                dphi.transpose() * rule.scaled_weights.asDiagonal() * dphi / (scale * scale);
            const double d = (stiffness_matrix(spec).matrix() - quad).cwiseAbs().maxCoeff();
            worst_s = std::max(worst_s, d);
            c.expect(d <= 1e-12, "stiffness N=" + std::to_string(N) + " off by " + detail::sci(d));
        }
    }

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_matrix = [&](int n) {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = unif(rng);
        return m;
    };
    for (int nx = 0; nx <= 8; ++nx)
        for (int ny = 0; ny <= 8; ++ny) {
            const BasisSpec sx{nx, 0.0, 1.0}, sy{ny, 1.0, 0.5};
            SeparableOperator op(2, nx + 1, ny + 1);
            op.add(stiffness_matrix(sx), mass_matrix(sy), 0.8);
            op.add(mass_matrix(sx), stiffness_matrix(sy), 1.3);
            op.add(Operator1D(random_matrix(nx + 1), nx), Operator1D(random_matrix(ny + 1), ny), -0.4);
            const Eigen::MatrixXd coeffs = random_matrix(std::max(nx, ny) + 1).topLeftCorner(nx + 1, ny + 1);

            // dense sum of Kronecker products, row index i*(ny+1)+j
            const int n = (nx + 1) * (ny + 1);
            Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
            for (const auto& t : op.terms())
                for (int i = 0; i <= nx; ++i)
                    for (int k = 0; k <= nx; ++k)
                        dense.block(i * (ny + 1), k * (ny + 1), ny + 1, ny + 1) +=
                            t.factor * t.x.matrix()(i, k) * t.y.matrix();
            Eigen::VectorXd flat(n);
            for (int i = 0; i <= nx; ++i)
                for (int j = 0; j <= ny; ++j)
                    flat[i * (ny + 1) + j] = coeffs(i, j);
            const Eigen::VectorXd expect = dense * flat;
            const Eigen::MatrixXd got = op.apply(coeffs);
            double d = 0;
            for (int i = 0; i <= nx; ++i)
                for (int j = 0; j <= ny; ++j)
                    d = std::max(d, std::abs(got(i, j) - expect[i * (ny + 1) + j]));
            worst_k = std::max(worst_k, d);
            c.expect(d <= 1e-12, "Kronecker apply " + std::to_string(nx) + "x" + std::to_string(ny) + " off by " +
                                     detail::sci(d));
        }
    c.note("stiffness dev " + detail::sci(worst_s) + " (N<=32), Kronecker dev " + detail::sci(worst_k) + " (N<=8)");
    return {2, "operator oracles", c.passed(), c.detail(), 0, 10};
}

namespace detail {

struct TableRow {
    int N;
    double l2, linf;
};

inline RunResult convergence(const std::string& scenario, std::vector<int> n_list, double dt, double t_final,
                             const Options& o) {
    ScenarioConfig cfg = default_config(scenario);
    cfg.n_list = std::move(n_list);
    cfg.dt = dt;
    cfg.t_final = t_final;
    cfg.threads = o.threads;
    return run_convergence(cfg);
}

inline void compare_table(Checks& c, const std::string& label, const RunResult& r, const std::vector<TableRow>& published,
                          bool check_linf) {
    for (const auto& p : published)
        for (const auto& row : r.errors)
            if (row.N == p.N) {
                c.expect(within_factor(row.l2_error, p.l2, 2.0),
                         label + " N=" + std::to_string(p.N) + " L2 " + sci(row.l2_error) + " vs " + sci(p.l2));
                if (check_linf)
                    c.expect(within_factor(row.linf_error, p.linf, 2.0), label + " N=" + std::to_string(p.N) +
                                                                             " Linf " + sci(row.linf_error) + " vs " +
                                                                             sci(p.linf));
            }
}

inline std::string l2_column(const RunResult& r) {
    std::string s;
    for (const auto& row : r.errors)
        s += (s.empty() ? "" : " ") + sci(row.l2_error);
    return s;
}

} // namespace detail

// Shared between criteria 3-5 so the runs happen once.
struct SmoothRuns {
    RunResult ex1_i, ex1_ii, ex2_i;
    double ex1_seconds = 0, ex2_seconds = 0;
};

inline SmoothRuns smooth_runs(const Options& o) {
    SmoothRuns s;
    auto t0 = std::chrono::steady_clock::now();
    s.ex1_i = detail::convergence("EX1_I", {10, 20, 30, 40, 50}, 1e-4, 1.0, o);
    s.ex1_ii = detail::convergence("EX1_II", {10, 20, 30, 40, 50}, 1e-4, 1.0, o);
    auto t1 = std::chrono::steady_clock::now();
    s.ex2_i = detail::convergence("EX2_I", {10, 20, 30}, 1e-4, 0.5, o);
    auto t2 = std::chrono::steady_clock::now();
    s.ex1_seconds = std::chrono::duration<double>(t1 - t0).count();
    s.ex2_seconds = std::chrono::duration<double>(t2 - t1).count();
    return s;
}

// 3. EX1 errors against the published values.
inline Outcome ex1_reference_errors(const SmoothRuns& s) {
    detail::Checks c;
    detail::compare_table(c, "EX1(i)", s.ex1_i,
                          {{10, 2.751e-4, 1.316e-4}, {20, 9.792e-7, 4.143e-7}, {30, 3.679e-9, 1.378e-9},
                           {40, 1.417e-11, 5.056e-12}},
                          true);
    detail::compare_table(c, "EX1(ii)", s.ex1_ii,
                          {{10, 7.467e-4, 4.783e-4}, {20, 2.879e-6, 1.928e-6}, {30, 1.145e-8, 7.944e-9},
                           {40, 4.607e-11, 3.281e-11}},
                          true);
    for (const auto* r : {&s.ex1_i, &s.ex1_ii}) {
        const auto& last = r->errors.back();
        c.expect(last.N == 50 && last.l2_error <= 1e-12 && last.linf_error <= 1e-12,
                 r->config.scenario + " N=50 errors " + detail::sci(last.l2_error) + "/" + detail::sci(last.linf_error) +
                     " above 1e-12");
    }
    c.note("EX1(i) L2 " + detail::l2_column(s.ex1_i));
    c.note("EX1(ii) L2 " + detail::l2_column(s.ex1_ii));
    return {3, "EX1 published errors", c.passed(), c.detail(), s.ex1_seconds, 180};
}

// 4. EX2(i) errors against the published values.
inline Outcome ex2_reference_errors(const SmoothRuns& s) {
    detail::Checks c;
    detail::compare_table(c, "EX2(i)", s.ex2_i, {{10, 7.181e-4, 0}, {20, 2.556e-6, 0}, {30, 9.603e-9, 0}}, false);
    c.note("EX2(i) L2 " + detail::l2_column(s.ex2_i));
    return {4, "EX2 published errors", c.passed(), c.detail(), s.ex2_seconds, 600};
}

// 5. Pairwise rates increase with N before the time-error floor (N=50 in 1D).
inline Outcome spectral_rates(const SmoothRuns& s) {
    detail::Checks c;
    auto check = [&](const RunResult& r, int last_n) {
        std::vector<double> l2, linf;
        for (const auto& row : r.errors)
            if (row.rate_l2 && row.N <= last_n) {
                l2.push_back(*row.rate_l2);
                linf.push_back(*row.rate_linf);
            }
        std::string list;
        for (double v : l2)
            list += (list.empty() ? "" : " ") + detail::fix(v, 2);
        c.note(r.config.scenario + " L2 rates " + list);
        c.expect(l2.size() >= 2, r.config.scenario + ": fewer than two rates");
        for (std::size_t i = 1; i < l2.size(); ++i) {
            c.expect(l2[i] > l2[i - 1], r.config.scenario + " L2 rate not increasing");
            c.expect(linf[i] > linf[i - 1], r.config.scenario + " Linf rate not increasing");
        }
    };
    check(s.ex1_i, 40);
    check(s.ex1_ii, 40);
    check(s.ex2_i, 30);
    return {5, "spectral-accuracy rates", c.passed(), c.detail(), 0, 0};
}

// 6. EX3 algebraic H1 rates against a degree-256 reference.
inline Outcome algebraic_rates(const Options& o) {
    detail::Checks c;
    for (auto [mu, expected] : {std::pair{1.0 / 3.0, 11.0 / 12.0}, std::pair{4.0 / 3.0, 17.0 / 12.0}}) {
        ScenarioConfig cfg = default_config("EX3");
        cfg.mu = mu;
        cfg.threads = o.threads;
        const RunResult r = run_convergence(cfg);
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : r.errors)
            pts.emplace_back(row.N, *row.h1_error);
        const double rate = fit_rate(pts);
        c.expect(std::abs(rate - expected) <= 0.15, "mu=" + detail::fix(mu) + " H1 rate " + detail::fix(rate) +
                                                       " outside " + detail::fix(expected) + " +- 0.15");
        c.note("mu=" + detail::fix(mu) + ": H1 rate " + detail::fix(rate) + " (expected " + detail::fix(expected) + ")");
    }
    return {6, "EX3 algebraic rates", c.passed(), c.detail(), 0, 600};
}

namespace detail {

// u'' + b u' + k u = f(t) with exact u = sin 2t + cos t.
struct Oscillator {
    double k = 4.0, b = 0.5;
    static double u(double t) { return std::sin(2 * t) + std::cos(t); }
    static double du(double t) { return 2 * std::cos(2 * t) - std::sin(t); }
    static double ddu(double t) { return -4 * std::sin(2 * t) - std::cos(t); }

    Eigen::MatrixXd apply_a(const Eigen::MatrixXd& m) const { return -k * m; }
    Eigen::MatrixXd apply_b(const Eigen::MatrixXd& m) const { return -b * m; }
    Eigen::MatrixXd load(double t) const {
        return Eigen::MatrixXd::Constant(1, 1, ddu(t) + b * du(t) + k * u(t));
    }
};

} // namespace detail

// 7. Global error of SSP-RK3 on a forced damped oscillator scales like dt^3.
inline Outcome temporal_order() {
    detail::Checks c;
    const detail::Oscillator osc;
    std::vector<std::pair<double, double>> pts;
    std::string list;
    for (double dt : {0.04, 0.02, 0.01, 0.005, 0.0025}) {
        StateVector s{Eigen::MatrixXd::Constant(1, 1, osc.u(0)), Eigen::MatrixXd::Constant(1, 1, osc.du(0)), 0.0};
        s = integrate(osc, s, dt, 2.0);
        const double err = std::hypot(s.u(0, 0) - osc.u(2.0), s.v(0, 0) - osc.du(2.0));
        pts.emplace_back(1.0 / dt, err);
        list += (list.empty() ? "" : " ") + detail::sci(err);
    }
    const double slope = fit_rate(pts);
    c.expect(slope >= 2.8 && slope <= 3.2, "slope " + detail::fix(slope) + " outside [2.8, 3.2]");
    c.note("errors " + list + ", slope " + detail::fix(slope));
    return {7, "temporal order", c.passed(), c.detail(), 0, 5};
}

namespace detail {

inline DvweProblem layered_gaussian_pulse(int N) {
    ScenarioConfig cfg = default_config("EX5");
    DvweProblem p = find_scenario("EX5").build(cfg, N);
    p.source = Source::zero();
    p.u0 = [](double x, double y) { return std::exp(-((x - 15) * (x - 15) + (y - 16) * (y - 16))); };
    p.w0 = [](double x, double y) { return (x - 15) * std::exp(-((x - 15) * (x - 15) + (y - 15) * (y - 15))); };
    p.t_final = 0.1;
    return p;
}

} // namespace detail

// 8. Structural properties: zero stays zero, energy decay, EX4 symmetry,
// EX5 self-convergence.
inline Outcome structural(const Options& o) {
    detail::Checks c;

    {
        ScenarioConfig cfg = default_config("EX5");
        DvweProblem p = find_scenario("EX5").build(cfg, 24);
        p.source = Source::zero();
        p.t_final = 0.05;
        const SemiDiscreteSystem sys = assemble(p);
        auto [u0, v0] = initial_coefficients(p);
        const StateVector end = integrate(sys, StateVector{u0, v0, 0.0}, p.dt, p.t_final);
        const bool zero = (end.u.array() == 0.0).all() && (end.v.array() == 0.0).all();
        c.expect(zero, "zero-data run left zero");
        c.note(std::string("zero data ") + (zero ? "stays exactly zero" : "drifted"));
    }

    {
        const DvweProblem p = detail::layered_gaussian_pulse(40);
        const SemiDiscreteSystem sys = assemble(p);
        auto [u0, v0] = initial_coefficients(p);
        EnergyHistory history(sys);
        integrate(sys, StateVector{u0, v0, 0.0}, p.dt, p.t_final, {history.observer(1)});
        const double e0 = history.samples().front().second;
        const double tol = 10.0 * p.dt * p.dt * p.dt * e0;
        const double inc = history.max_increase();
        c.expect(inc <= tol, "energy increased by " + detail::sci(inc) + " > " + detail::sci(tol));
        c.note("energy " + detail::sci(e0) + " -> " + detail::sci(history.samples().back().second) +
               ", max step increase " + detail::sci(inc));
    }

    {
        ScenarioConfig cfg = default_config("EX4");
        cfg.n_list = {100};
        cfg.t_final = 0.1;
        cfg.snapshots = {0.005, 0.1};
        cfg.cross_sections = {};
        cfg.threads = o.threads;
        const RunResult r = run_wavefield(cfg);
        double worst = 0;
        for (const auto& snap : r.runs[0].snapshots) {
            const Eigen::MatrixXd& v = snap.values;
            const double rel = (v - v.transpose()).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
            worst = std::max(worst, rel);
        }
        c.expect(worst <= 1e-9, "EX4 swap asymmetry " + detail::sci(worst));
        const auto& first = r.runs[0].snapshots.front();
        Eigen::Index row = 0, col = 0;
        first.values.cwiseAbs().maxCoeff(&row, &col);
        const double h = (first.window[1] - first.window[0]) / (first.nx() - 1);
        const double px = first.window[0] + col * h, py = first.window[2] + row * h;
        c.expect(std::abs(px - 10) <= h + 1e-12 && std::abs(py - 10) <= h + 1e-12,
                 "EX4 T=0.005 peak at (" + detail::fix(px) + ", " + detail::fix(py) + ")");
        c.note("EX4 swap asymmetry " + detail::sci(worst));
    }

    {
        ScenarioConfig cfg = default_config("EX5");
        cfg.n_list = {o.ex5_coarse, o.ex5_fine};
        cfg.t_final = 0.4;
        cfg.snapshots = {0.05, 0.15, 0.25, 0.4};
        cfg.cross_sections = {"x=17"};
        cfg.outputs = {"cross_sections"};
        cfg.threads = o.threads;
        const RunResult r = run_wavefield(cfg);
        double worst = 0;
        for (const auto& cmp : r.comparisons)
            worst = std::max(worst, cmp.relative());
        c.expect(!r.comparisons.empty() && worst <= 0.02, "EX5 x=17 mismatch " + detail::fix(100 * worst, 2) + "% of peak");
        c.note("EX5 N=" + std::to_string(o.ex5_coarse) + "/" + std::to_string(o.ex5_fine) + " x=17 mismatch " +
               detail::fix(100 * worst, 2) + "% of peak");
    }
    // 15 min at 150/300, scaled by the O(N^3) cost for a smaller pair
    const double budget = 900.0 * std::min(1.0, std::pow(o.ex5_fine / 300.0, 3));
    return {8, "structural/physics properties", c.passed(), c.detail(), 0, std::max(budget, 60.0)};
}

inline std::string format(const Outcome& o) {
    std::ostringstream s;
    s << (o.passed ? "[PASS] " : "[FAIL] ") << o.id << ". " << o.name << " (" << detail::fix(o.seconds, 1) << " s";
    if (o.budget_seconds > 0)
        s << ", budget " << detail::fix(o.budget_seconds, 0) << " s";
    s << "): " << o.detail;
    return s.str();
}

/// Run the selected criteria (all when `only` is empty), reporting each as it
/// finishes.
inline std::vector<Outcome> run_all(const Options& o, const std::vector<int>& only = {},
                                    const std::function<void(const Outcome&)>& report = {}) {
    auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
    std::vector<Outcome> out;
    auto finish = [&](Outcome r) {
        if (r.budget_seconds > 0 && r.seconds > r.budget_seconds) {
            r.passed = false;
            r.detail = "over time budget | " + r.detail;
        }
        if (report)
            report(r);
        out.push_back(std::move(r));
    };
    auto timed = [&](int id, auto&& fn) {
        if (!wanted(id))
            return;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), 0, 0};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        finish(std::move(r));
    };

    timed(1, [] { return quadrature_suite(); });
    timed(2, [] { return operator_oracles(); });
    if (wanted(3) || wanted(4) || wanted(5)) {
        SmoothRuns s;
        std::string failure;
        try {
            s = smooth_runs(o);
        } catch (const std::exception& e) {
            failure = e.what();
        }
        for (int id : {3, 4, 5}) {
            if (!wanted(id))
                continue;
            Outcome r;
            if (!failure.empty())
                r = {id, "criterion " + std::to_string(id), false, "exception: " + failure, 0, 0};
            else
                r = id == 3 ? ex1_reference_errors(s) : id == 4 ? ex2_reference_errors(s) : spectral_rates(s);
            if (id == 5)
                r.seconds = s.ex1_seconds + s.ex2_seconds;
            finish(std::move(r));
        }
    }
    timed(6, [&] { return algebraic_rates(o); });
    timed(7, [] { return temporal_order(); });
    timed(8, [&] { return structural(o); });
    return out;
}

} // namespace hermwave::acceptance

#endif
