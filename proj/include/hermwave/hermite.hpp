#ifndef HERMWAVE_HERMITE_HPP
#define HERMWAVE_HERMITE_HPP

// Orthonormal Hermite polynomials H_n (weight e^{-x^2}), Hermite functions
// phi_n(x) = e^{-x^2/2} H_n(x) (orthonormal in L^2(R)), their derivative
// expansion, and Gauss-Hermite quadrature.

#include "hermwave/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace hermwave {

inline constexpr double kPiQuarterInv = 0.75112554446494248285870300477623; // pi^{-1/4}

/// Degree and affine placement of a one-dimensional Hermite-function basis.
///
/// The mapped basis is phi~_j(x) = s^{-1/2} phi_j((x - c) / s), j = 0..degree,
/// which is orthonormal in L^2(dx) for any center c and scale s > 0.
struct BasisSpec {
    int degree = 0;
    double center = 0.0;
    double scale = 1.0;

    int size() const noexcept { return degree + 1; }

    void validate() const {
        if (degree < 0)
            throw Error("BasisSpec: degree must be >= 0, got " + std::to_string(degree));
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw Error("BasisSpec: scale must be positive and finite");
        if (!std::isfinite(center))
            throw Error("BasisSpec: center must be finite");
    }

    friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

inline double to_reference(const BasisSpec& spec, double x_phys) noexcept {
    return (x_phys - spec.center) / spec.scale;
}

inline double from_reference(const BasisSpec& spec, double xi) noexcept {
    return spec.center + spec.scale * xi;
}

/// Orthonormal Hermite polynomial values [H_0(x), ..., H_N(x)].
///
/// Grows like e^{x^2/2} for large |x| and overflows once that exceeds the
/// double range; evaluate Hermite functions instead in that regime.
inline Eigen::VectorXd hermite_poly_eval(int N, double x) {
    Eigen::VectorXd h(N + 1);
    h[0] = kPiQuarterInv;
    if (N >= 1)
        h[1] = std::numbers::sqrt2 * kPiQuarterInv * x;
    for (int n = 1; n < N; ++n) {
        const double dn = n;
        h[n + 1] = x * std::sqrt(2.0 / (dn + 1.0)) * h[n] - std::sqrt(dn / (dn + 1.0)) * h[n - 1];
    }
    return h;
}

/// Hermite function values [phi_0(x), ..., phi_N(x)].
///
/// The Gaussian factor is carried through the recurrence as a running
/// exponent, with periodic rescaling, so no intermediate overflows for any
/// finite x. Entries whose magnitude is below the double range come back as 0.
inline Eigen::VectorXd hermite_fun_eval(int N, double x) {
    constexpr double kRescaleAt = 1e150;
    constexpr double kRescaleBy = 1e-150;
    const double log_step = std::log(kRescaleAt);

    Eigen::VectorXd phi(N + 1);
    double log_scale = -0.5 * x * x;
    double factor = std::exp(log_scale);

    double prev = kPiQuarterInv;
    phi[0] = prev * factor;
    if (N == 0)
        return phi;
    double curr = std::numbers::sqrt2 * x * prev;
    phi[1] = curr * factor;
    for (int n = 1; n < N; ++n) {
        const double dn = n;
        double next = x * std::sqrt(2.0 / (dn + 1.0)) * curr - std::sqrt(dn / (dn + 1.0)) * prev;
        prev = curr;
        curr = next;
        if (std::abs(curr) > kRescaleAt) {
            prev *= kRescaleBy;
            curr *= kRescaleBy;
            log_scale += log_step;
            factor = std::exp(log_scale);
        }
        phi[n + 1] = curr * factor;
    }
    return phi;
}

/// phi'_n = lower * phi_{n-1} + upper * phi_{n+1}.
struct DerivativePair {
    double lower;
    double upper;
};

/// Derivative expansion coefficients for n = 0..N. The caller drops the
/// phi_{N+1} contribution when the result must stay in the degree-N basis.
inline std::vector<DerivativePair> hermite_fun_deriv_coeffs(int N) {
    std::vector<DerivativePair> out;
    out.reserve(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n)
        out.push_back({std::sqrt(n / 2.0), -std::sqrt((n + 1) / 2.0)});
    return out;
}

/// (N+2) x (N+1) matrix D with phi'_j = sum_m D(m, j) phi_m, exact in the
/// degree N+1 basis. Reference coordinate; divide by the basis scale for the
/// physical derivative.
inline Eigen::MatrixXd derivative_matrix(int N) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N + 2, N + 1);
    const auto pairs = hermite_fun_deriv_coeffs(N);
    for (int j = 0; j <= N; ++j) {
        if (j > 0)
            D(j - 1, j) = pairs[j].lower;
        D(j + 1, j) = pairs[j].upper;
    }
    return D;
}

/// Gauss-Hermite rule for integrals against e^{-x^2}.
///
/// `scaled_weights` holds w_k e^{x_k^2}, which is what integrals of Hermite
/// functions need: sum_k scaled_weights[k] f(x_k) approximates int f dx. It
/// stays finite where w_k itself underflows.
struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    Eigen::VectorXd scaled_weights;

    int size() const noexcept { return static_cast<int>(nodes.size()); }
};

namespace detail {

// phi_n(x) / phi'_n(x) at a root candidate, using H'_n = sqrt(2n) H_{n-1}.
inline double newton_correction(int n, double x, double& phi_nm1) {
    const Eigen::VectorXd phi = hermite_fun_eval(n, x);
    phi_nm1 = phi[n - 1];
    // d/dx of H_n is sqrt(2n) H_{n-1}; the Gaussian factor cancels in the ratio.
    return phi[n] / (std::sqrt(2.0 * n) * phi[n - 1]);
}

} // namespace detail

/// n-point Gauss-Hermite rule.
///
/// Eigenvalues of the symmetric Jacobi matrix seed a Newton polish on the
/// Hermite-function recurrence. Nodes are symmetric by construction.
/// Throws ConvergenceError if a node needs more than 100 Newton steps to
/// reach 1e-13.
inline QuadratureRule gauss_hermite(int n) {
    if (n < 1)
        throw Error("gauss_hermite: need at least one node, got " + std::to_string(n));

    constexpr double kTol = 1e-13;
    constexpr int kMaxIter = 100;

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.scaled_weights.resize(n);

    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = std::sqrt(std::numbers::pi);
        rule.scaled_weights[0] = rule.weights[0];
        return rule;
    }

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k)
        sub[k - 1] = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw ConvergenceError("gauss_hermite: tridiagonal eigensolver failed for n=" + std::to_string(n));
    const Eigen::VectorXd guess = eig.eigenvalues(); // ascending

    // Polish the non-negative half and mirror it.
    const int half = n / 2;
    for (int k = 0; k < half; ++k) {
        const int idx = n - 1 - k;
        double x = std::abs(guess[idx]);
        double phi_nm1 = 0.0;
        bool converged = false;
        for (int it = 0; it < kMaxIter; ++it) {
            const double dx = detail::newton_correction(n, x, phi_nm1);
            x -= dx;
            if (!std::isfinite(x))
                break;
            if (std::abs(dx) <= kTol * std::max(1.0, std::abs(x))) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw ConvergenceError("gauss_hermite: Newton iteration did not converge for node " +
                                   std::to_string(idx) + " of n=" + std::to_string(n));
        const Eigen::VectorXd phi = hermite_fun_eval(n - 1, x);
        const double sw = 1.0 / (n * phi[n - 1] * phi[n - 1]);
        rule.nodes[idx] = x;
        rule.nodes[k] = -x;
        rule.scaled_weights[idx] = sw;
        rule.scaled_weights[k] = sw;
        const double w = sw * std::exp(-x * x);
        rule.weights[idx] = w;
        rule.weights[k] = w;
    }
    if (n % 2 == 1) {
        const Eigen::VectorXd phi = hermite_fun_eval(n - 1, 0.0);
        const double sw = 1.0 / (n * phi[n - 1] * phi[n - 1]);
        rule.nodes[half] = 0.0;
        rule.scaled_weights[half] = sw;
        rule.weights[half] = sw;
    }
    return rule;
}

/// m-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch). `scaled_weights`
/// equals `weights`.
inline QuadratureRule gauss_legendre(int m) {
    if (m < 1)
        throw Error("gauss_legendre: need at least one node, got " + std::to_string(m));
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int k = 1; k < m; ++k)
        sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success)
        throw ConvergenceError("gauss_legendre: tridiagonal eigensolver failed for m=" + std::to_string(m));
    QuadratureRule rule;
    rule.nodes = eig.eigenvalues();
    rule.weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
    for (int k = 0; k < m / 2; ++k) { // exact symmetry
        const double x = 0.5 * (rule.nodes[m - 1 - k] - rule.nodes[k]);
        const double w = 0.5 * (rule.weights[m - 1 - k] + rule.weights[k]);
        rule.nodes[k] = -x;
        rule.nodes[m - 1 - k] = x;
        rule.weights[k] = rule.weights[m - 1 - k] = w;
    }
    if (m % 2 == 1)
        rule.nodes[m / 2] = 0.0;
    rule.scaled_weights = rule.weights;
    return rule;
}

/// nq x (N+1) matrix with entry (k, j) = phi_j(nodes[k]).
inline Eigen::MatrixXd hermite_fun_matrix(int N, const Eigen::VectorXd& nodes) {
    Eigen::MatrixXd out(nodes.size(), N + 1);
    for (Eigen::Index k = 0; k < nodes.size(); ++k)
        out.row(k) = hermite_fun_eval(N, nodes[k]).transpose();
    return out;
}

} // namespace hermwave

#endif
