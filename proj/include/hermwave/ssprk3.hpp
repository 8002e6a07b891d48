#ifndef HERMWAVE_SSPRK3_HPP
#define HERMWAVE_SSPRK3_HPP

// Three-stage, third-order SSP Runge-Kutta (Shu-Osher form) for
//   U' = V,   V' = A U + B V + F(t).
//
// Stage source times are t, t + dt and t + dt/2. In the last stage the load
// is multiplied by dt together with the operator terms.

#include "hermwave/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <iostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace hermwave {

struct StateVector {
    Eigen::MatrixXd u;
    Eigen::MatrixXd v;
    double t = 0.0;
};

/// Anything that can supply A U, B V and F(t) on coefficient matrices.
template <class S>
concept FirstOrderSystem = requires(const S& s, const Eigen::MatrixXd& m, double t) {
    { s.apply_a(m) } -> std::convertible_to<Eigen::MatrixXd>;
    { s.apply_b(m) } -> std::convertible_to<Eigen::MatrixXd>;
    { s.load(t) } -> std::convertible_to<Eigen::MatrixXd>;
};

namespace detail {

template <FirstOrderSystem S>
Eigen::MatrixXd acceleration(const S& system, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v, double t) {
    Eigen::MatrixXd out = system.apply_a(u);
    out.noalias() += system.apply_b(v);
    bool skip_load = false;
    if constexpr (requires { system.has_load(); })
        skip_load = !system.has_load();
    if (!skip_load)
        out += system.load(t);
    return out;
}

} // namespace detail

/// One SSP-RK3 step. `step_index` is only used in error messages.
template <FirstOrderSystem S>
StateVector step(const S& system, const StateVector& s, double dt, std::size_t step_index = 0) {
    if (!(dt > 0.0))
        throw Error("ssprk3::step: dt must be positive");
    if (s.u.rows() != s.v.rows() || s.u.cols() != s.v.cols())
        throw DimensionError("ssprk3::step: U and V shapes differ");

    const double t = s.t;

    const Eigen::MatrixXd u1 = s.u + dt * s.v;
    const Eigen::MatrixXd v1 = s.v + dt * detail::acceleration(system, s.u, s.v, t);

    const Eigen::MatrixXd u2 = 0.75 * s.u + 0.25 * (u1 + dt * v1);
    const Eigen::MatrixXd v2 = 0.75 * s.v + 0.25 * (v1 + dt * detail::acceleration(system, u1, v1, t + dt));

    StateVector out;
    out.u = (1.0 / 3.0) * s.u + (2.0 / 3.0) * (u2 + dt * v2);
    out.v = (1.0 / 3.0) * s.v + (2.0 / 3.0) * (v2 + dt * detail::acceleration(system, u2, v2, t + 0.5 * dt));
    out.t = t + dt;

    if (!out.u.allFinite() || !out.v.allFinite()) {
        std::ostringstream msg;
        msg << "time integration diverged at step " << step_index << " (t=" << out.t << ", dt=" << dt
            << "); the step size is likely unstable";
        throw DivergenceError(msg.str(), step_index, out.t);
    }
    return out;
}

/// Callback run on the initial state, every `every` steps, and on the final state.
struct Observer {
    std::size_t every = 1;
    std::function<void(const StateVector&, std::size_t step)> callback;
};

struct IntegrateOptions {
    /// Warn when dt * sqrt(|A|_1) exceeds this.
    double stability_threshold = 1.5;
    std::function<void(std::string_view)> warn = [](std::string_view msg) {
        std::cerr << "[hermwave] warning: " << msg << '\n';
    };
};

/// Number of full steps of size dt in [t0, T] and the trailing partial step
/// (0 when dt divides the interval up to rounding).
inline std::pair<std::size_t, double> step_plan(double t0, double t_final, double dt) {
    const double span = t_final - t0;
    const double ratio = span / dt;
    auto full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
    double rest = span - static_cast<double>(full) * dt;
    if (rest <= 1e-12 * std::max(1.0, std::abs(t_final)))
        rest = 0.0;
    return {full, rest};
}

/// Fixed-step march from state0.t to t_final with a shortened last step so
/// the returned state sits exactly at t_final.
template <FirstOrderSystem S>
StateVector integrate(const S& system, const StateVector& state0, double dt, double t_final,
                      const std::vector<Observer>& observers = {}, const IntegrateOptions& options = {}) {
    if (!(dt > 0.0))
        throw Error("ssprk3::integrate: dt must be positive");
    if (t_final < state0.t)
        throw Error("ssprk3::integrate: final time precedes the initial time");

    if constexpr (requires { system.a_norm1_bound(); }) {
        const double indicator = dt * std::sqrt(system.a_norm1_bound());
        if (indicator > options.stability_threshold && options.warn) {
            std::ostringstream msg;
            msg << "dt * sqrt(|A|_1) = " << indicator << " exceeds " << options.stability_threshold
                << "; explicit SSP-RK3 may be unstable";
            options.warn(msg.str());
        }
    }

    const auto [full, rest] = step_plan(state0.t, t_final, dt);
    const std::size_t total = full + (rest > 0.0 ? 1 : 0);

    for (const auto& obs : observers)
        obs.callback(state0, 0);
    if (total == 0)
        return state0;

    StateVector s = state0;
    const double t0 = state0.t;
    for (std::size_t k = 0; k < total; ++k) {
        const bool last = k + 1 == total;
        const double h = (k < full) ? dt : rest;
        s = step(system, s, h, k + 1);
        s.t = last ? t_final : t0 + static_cast<double>(k + 1) * dt;
        for (const auto& obs : observers)
            if (last || (obs.every > 0 && (k + 1) % obs.every == 0))
                obs.callback(s, k + 1);
    }
    return s;
}

} // namespace hermwave

#endif
