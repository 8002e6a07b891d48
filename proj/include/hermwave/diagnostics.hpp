#ifndef HERMWAVE_DIAGNOSTICS_HPP
#define HERMWAVE_DIAGNOSTICS_HPP

#include "hermwave/dvwe.hpp"
#include "hermwave/error.hpp"
#include "hermwave/field.hpp"
#include "hermwave/operators.hpp"
#include "hermwave/ssprk3.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace hermwave {

/// One row of a convergence table. Rates are relative to the previous row.
struct ErrorReport {
    int N = 0;
    double l2_error = 0.0;
    double linf_error = 0.0;
    std::optional<double> h1_error;
    std::optional<double> rate_l2;
    std::optional<double> rate_linf;
    std::optional<double> rate_h1;
};

/// Order between (N1, e1) and (N2, e2): log(e1/e2) / log(N2/N1).
inline double pairwise_rate(int n1, double e1, int n2, double e2) {
    return std::log(e1 / e2) / std::log(static_cast<double>(n2) / n1);
}

/// Fill the rate columns of consecutive rows.
inline void fill_rates(std::vector<ErrorReport>& rows) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& p = rows[i - 1];
        auto& r = rows[i];
        r.rate_l2 = pairwise_rate(p.N, p.l2_error, r.N, r.l2_error);
        r.rate_linf = pairwise_rate(p.N, p.linf_error, r.N, r.linf_error);
        if (p.h1_error && r.h1_error)
            r.rate_h1 = pairwise_rate(p.N, *p.h1_error, r.N, *r.h1_error);
    }
}

/// Least-squares slope of log(error) vs log(N), negated: error ~ N^{-rate}.
inline double fit_rate(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2)
        throw Error("fit_rate: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, e] : points) {
        if (!(e > 0.0) || !(n > 0.0))
            throw Error("fit_rate: N and errors must be positive");
        const double lx = std::log(n), ly = std::log(e);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(points.size());
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0)
        throw Error("fit_rate: all N values are equal");
    return -(m * sxy - sx * sy) / denom;
}

inline std::vector<double> uniform_grid(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = 0.5 * (a + b);
        return out;
    }
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

/// Default L-infinity grid: 2001 points on center +- 10 scale.
inline std::vector<double> default_linf_grid(const BasisSpec& spec, int points = 2001) {
    return uniform_grid(spec.center - 10.0 * spec.scale, spec.center + 10.0 * spec.scale, points);
}

/// Quadrature L^2 norm of (field - exact) on 2(N+1) mapped Gauss-Hermite
/// nodes per dimension (or `nquad` when positive).
template <std::invocable<double> F>
double l2_error(const SpectralField& field, F&& exact, int nquad = 0) {
    if (field.dims() != 1)
        throw DimensionError("l2_error: expected a 1D field");
    const Transform1D t(field.basis[0], nquad > 0 ? nquad : default_nquad(field.basis[0]));
    const Eigen::VectorXd diff = t.synthesize(field.coeffs).col(0) - sample(t, exact).col(0);
    return std::sqrt((t.physical_weights().array() * diff.array().square()).sum());
}

template <std::invocable<double, double> F>
double l2_error(const SpectralField& field, F&& exact, int nquad = 0) {
    if (field.dims() != 2)
        throw DimensionError("l2_error: expected a 2D field");
    const Transform1D tx(field.basis[0], nquad > 0 ? nquad : default_nquad(field.basis[0]));
    const Transform1D ty(field.basis[1], nquad > 0 ? nquad : default_nquad(field.basis[1]));
    const Eigen::MatrixXd grid = ty.synthesize(tx.synthesize(field.coeffs).transpose()).transpose();
    const Eigen::MatrixXd diff = grid - sample(tx, ty, exact);
    const Eigen::MatrixXd w = tx.physical_weights() * ty.physical_weights().transpose();
    return std::sqrt((w.array() * diff.array().square()).sum());
}

template <std::invocable<double> F>
double linf_error(const SpectralField& field, F&& exact, std::span<const double> grid) {
    const std::vector<double> v = evaluate(field, grid);
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        m = std::max(m, std::abs(v[i] - exact(grid[i])));
    return m;
}

template <std::invocable<double, double> F>
double linf_error(const SpectralField& field, F&& exact, std::span<const double> xs, std::span<const double> ys) {
    const Eigen::MatrixXd v = evaluate_grid(field, xs, ys);
    double m = 0.0;
    for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i)
            m = std::max(m, std::abs(v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - exact(xs[i], ys[j])));
    return m;
}

/// Coefficients of u' in the degree N+1 basis (physical derivative).
inline SpectralField derivative(const SpectralField& field) {
    if (field.dims() != 1)
        throw DimensionError("derivative: expected a 1D field");
    BasisSpec wide = field.basis[0];
    wide.degree += 1;
    return SpectralField({wide}, derivative_matrix(field.basis[0].degree) * field.coeffs / field.basis[0].scale);
}

/// H^1 error (|e|^2 + |e'|^2)^{1/2} against an exact solution and its derivative.
template <std::invocable<double> F, std::invocable<double> G>
double h1_error(const SpectralField& field, F&& exact, G&& exact_deriv, int nquad = 0) {
    const int nq = nquad > 0 ? nquad : default_nquad(field.basis[0]) + 2;
    const double e0 = l2_error(field, exact, nq);
    const double e1 = l2_error(derivative(field), exact_deriv, nq);
    return std::sqrt(e0 * e0 + e1 * e1);
}

namespace detail {

inline SpectralField difference(const SpectralField& a, const SpectralField& b) {
    if (a.dims() != b.dims())
        throw DimensionError("field difference: dimension mismatch");
    std::vector<int> degrees;
    for (int d = 0; d < a.dims(); ++d) {
        const auto& ba = a.basis[static_cast<std::size_t>(d)];
        const auto& bb = b.basis[static_cast<std::size_t>(d)];
        if (ba.center != bb.center || ba.scale != bb.scale)
            throw DimensionError("field difference: bases have different placement");
        degrees.push_back(std::max(ba.degree, bb.degree));
    }
    SpectralField out = resize_degree(a, degrees);
    out.coeffs -= resize_degree(b, degrees).coeffs;
    return out;
}

} // namespace detail

/// Exact L^2 distance between two fields on the same placement (Parseval).
inline double l2_distance(const SpectralField& a, const SpectralField& b) {
    return detail::difference(a, b).norm();
}

/// Exact H^1 distance: sqrt(|dC|^2 + dC^T K dC) summed over dimensions.
inline double h1_distance(const SpectralField& a, const SpectralField& b) {
    const SpectralField d = detail::difference(a, b);
    double s = d.coeffs.squaredNorm();
    const Operator1D kx = stiffness_matrix(d.basis[0]);
    s += (d.coeffs.cwiseProduct(kx.apply_left(d.coeffs))).sum();
    if (d.dims() == 2) {
        const Operator1D ky = stiffness_matrix(d.basis[1]);
        s += (d.coeffs.cwiseProduct(ky.apply_right(d.coeffs))).sum();
    }
    return std::sqrt(s);
}

/// Energy time series collected through an integrate() observer.
class EnergyHistory {
public:
    explicit EnergyHistory(const SemiDiscreteSystem& system) : system_(&system) {}

    Observer observer(std::size_t every = 1) {
        return {every, [this](const StateVector& s, std::size_t) {
                    // segment boundaries report the same state twice
                    if (samples_.empty() || s.t > samples_.back().first)
                        samples_.emplace_back(s.t, energy(*system_, s.u, s.v));
                }};
    }

    const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

    /// Largest increase between consecutive samples (0 if monotone).
    double max_increase() const {
        double m = 0.0;
        for (std::size_t i = 1; i < samples_.size(); ++i)
            m = std::max(m, samples_[i].second - samples_[i - 1].second);
        return m;
    }

private:
    const SemiDiscreteSystem* system_;
    std::vector<std::pair<double, double>> samples_;
};

} // namespace hermwave

#endif
