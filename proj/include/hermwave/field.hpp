#ifndef HERMWAVE_FIELD_HPP
#define HERMWAVE_FIELD_HPP

#include "hermwave/error.hpp"
#include "hermwave/hermite.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hermwave {

/// A function expanded in the tensorized mapped Hermite-function basis.
///
/// In 1D `coeffs` is a (N+1) x 1 column; in 2D entry (i, j) multiplies
/// phi~_i(x) phi~_j(y).
struct SpectralField {
    std::vector<BasisSpec> basis;
    Eigen::MatrixXd coeffs;

    SpectralField() = default;

    explicit SpectralField(const BasisSpec& bx)
        : basis{bx}, coeffs(Eigen::MatrixXd::Zero(bx.size(), 1)) {}

    SpectralField(const BasisSpec& bx, const BasisSpec& by)
        : basis{bx, by}, coeffs(Eigen::MatrixXd::Zero(bx.size(), by.size())) {}

    SpectralField(std::vector<BasisSpec> b, Eigen::MatrixXd c) : basis(std::move(b)), coeffs(std::move(c)) {
        check_shape();
    }

    int dims() const noexcept { return static_cast<int>(basis.size()); }

    void check_shape() const {
        if (basis.empty() || basis.size() > 2)
            throw DimensionError("SpectralField: only 1D and 2D fields are supported");
        const Eigen::Index cols = basis.size() == 2 ? basis[1].size() : 1;
        if (coeffs.rows() != basis[0].size() || coeffs.cols() != cols)
            throw DimensionError("SpectralField: coefficient shape does not match basis degrees");
    }

    /// Parseval: equals the L^2 norm of the represented function.
    double norm() const { return coeffs.norm(); }
};

inline int default_nquad(const BasisSpec& spec) { return 2 * spec.size(); }

/// Precomputed synthesis/analysis matrices between the coefficients of one
/// basis and its values at the mapped Gauss-Hermite nodes.
class Transform1D {
public:
    Transform1D(const BasisSpec& spec, const QuadratureRule& rule) : spec_(spec), rule_(rule) {
        spec.validate();
        if (rule.size() < spec.size())
            throw Error("Transform1D: quadrature rule with " + std::to_string(rule.size()) +
                        " nodes cannot resolve degree " + std::to_string(spec.degree));
        basis_at_nodes_ = hermite_fun_matrix(spec.degree, rule.nodes);
        physical_nodes_.resize(rule.size());
        for (int k = 0; k < rule.size(); ++k)
            physical_nodes_[k] = from_reference(spec, rule.nodes[k]);
    }

    Transform1D(const BasisSpec& spec, int nquad) : Transform1D(spec, gauss_hermite(nquad)) {}

    explicit Transform1D(const BasisSpec& spec) : Transform1D(spec, default_nquad(spec)) {}

    const BasisSpec& spec() const noexcept { return spec_; }
    const QuadratureRule& rule() const noexcept { return rule_; }
    int nquad() const noexcept { return rule_.size(); }

    /// phi_j(xi_k), reference coordinate, unscaled.
    const Eigen::MatrixXd& basis_at_nodes() const noexcept { return basis_at_nodes_; }
    const Eigen::VectorXd& physical_nodes() const noexcept { return physical_nodes_; }

    /// Physical-coordinate integration weights: int f dx ~= sum_k dx_k f(x_k).
    Eigen::VectorXd physical_weights() const { return spec_.scale * rule_.scaled_weights; }

    /// Coefficients -> function values at the physical nodes (operates on columns).
    Eigen::MatrixXd synthesize(const Eigen::MatrixXd& coeffs) const {
        return (basis_at_nodes_ * coeffs) / std::sqrt(spec_.scale);
    }

    /// Node values -> coefficients (operates on columns).
    Eigen::MatrixXd analyze(const Eigen::MatrixXd& values) const {
        return std::sqrt(spec_.scale) * (basis_at_nodes_.transpose() * (rule_.scaled_weights.asDiagonal() * values));
    }

private:
    BasisSpec spec_;
    QuadratureRule rule_;
    Eigen::MatrixXd basis_at_nodes_;
    Eigen::VectorXd physical_nodes_;
};

namespace detail {

inline void check_finite_sample(double value, double x) {
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "non-finite sample at quadrature node x=" << x;
        throw NonFiniteSampleError(msg.str());
    }
}

inline void check_finite_sample(double value, double x, double y) {
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "non-finite sample at quadrature node (x=" << x << ", y=" << y << ")";
        throw NonFiniteSampleError(msg.str());
    }
}

} // namespace detail

/// Sample a 1D function at the physical nodes of a transform.
template <std::invocable<double> F>
Eigen::MatrixXd sample(const Transform1D& tx, F&& g) {
    Eigen::MatrixXd values(tx.nquad(), 1);
    for (int k = 0; k < tx.nquad(); ++k) {
        const double x = tx.physical_nodes()[k];
        values(k, 0) = g(x);
        detail::check_finite_sample(values(k, 0), x);
    }
    return values;
}

/// Sample a 2D function on the tensor grid of two transforms.
template <std::invocable<double, double> F>
Eigen::MatrixXd sample(const Transform1D& tx, const Transform1D& ty, F&& g) {
    Eigen::MatrixXd values(tx.nquad(), ty.nquad());
    for (int j = 0; j < ty.nquad(); ++j) {
        const double y = ty.physical_nodes()[j];
        for (int i = 0; i < tx.nquad(); ++i) {
            const double x = tx.physical_nodes()[i];
            values(i, j) = g(x, y);
            detail::check_finite_sample(values(i, j), x, y);
        }
    }
    return values;
}

/// Discrete L^2 projection of g onto the mapped basis, by quadrature.
///
/// g must decay fast enough to be integrable against the basis with the
/// chosen rule; that is the caller's responsibility.
template <std::invocable<double> F>
SpectralField project(const Transform1D& tx, F&& g) {
    return SpectralField({tx.spec()}, tx.analyze(sample(tx, std::forward<F>(g))));
}

template <std::invocable<double> F>
SpectralField project(const BasisSpec& spec, F&& g, int nquad = 0) {
    const Transform1D tx(spec, nquad > 0 ? nquad : default_nquad(spec));
    return project(tx, std::forward<F>(g));
}

template <std::invocable<double, double> F>
SpectralField project(const Transform1D& tx, const Transform1D& ty, F&& g) {
    const Eigen::MatrixXd values = sample(tx, ty, std::forward<F>(g));
    return SpectralField({tx.spec(), ty.spec()}, tx.analyze(ty.analyze(values.transpose()).transpose()));
}

template <std::invocable<double, double> F>
SpectralField project(const BasisSpec& sx, const BasisSpec& sy, F&& g, int nquad_x = 0, int nquad_y = 0) {
    const Transform1D tx(sx, nquad_x > 0 ? nquad_x : default_nquad(sx));
    const Transform1D ty(sy, nquad_y > 0 ? nquad_y : default_nquad(sy));
    return project(tx, ty, std::forward<F>(g));
}

/// Mapped basis values s^{-1/2} phi_j((x-c)/s) at arbitrary physical points,
/// one row per point.
inline Eigen::MatrixXd basis_values(const BasisSpec& spec, std::span<const double> xs) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), spec.size());
    const double norm = 1.0 / std::sqrt(spec.scale);
    for (std::size_t k = 0; k < xs.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = norm * hermite_fun_eval(spec.degree, to_reference(spec, xs[k])).transpose();
    return out;
}

/// Point values of a 1D field.
inline std::vector<double> evaluate(const SpectralField& field, std::span<const double> xs) {
    if (field.dims() != 1)
        throw DimensionError("evaluate: expected a 1D field");
    const Eigen::VectorXd v = basis_values(field.basis[0], xs) * field.coeffs.col(0);
    return {v.data(), v.data() + v.size()};
}

inline double evaluate(const SpectralField& field, double x) {
    return evaluate(field, std::span<const double>(&x, 1))[0];
}

/// Point values of a 2D field at scattered points (xs[k], ys[k]).
inline std::vector<double> evaluate(const SpectralField& field, std::span<const double> xs,
                                    std::span<const double> ys) {
    if (field.dims() != 2)
        throw DimensionError("evaluate: expected a 2D field");
    if (xs.size() != ys.size())
        throw DimensionError("evaluate: x and y point lists differ in length");
    const Eigen::MatrixXd bx = basis_values(field.basis[0], xs);
    const Eigen::MatrixXd by = basis_values(field.basis[1], ys);
    const Eigen::MatrixXd tmp = bx * field.coeffs; // points x (Ny+1)
    std::vector<double> out(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        out[k] = tmp.row(r).dot(by.row(r));
    }
    return out;
}

inline double evaluate(const SpectralField& field, double x, double y) {
    return evaluate(field, std::span<const double>(&x, 1), std::span<const double>(&y, 1))[0];
}

/// Values of a 2D field on the tensor grid xs x ys; entry (i, j) is u(xs[i], ys[j]).
inline Eigen::MatrixXd evaluate_grid(const SpectralField& field, std::span<const double> xs,
                                     std::span<const double> ys) {
    if (field.dims() != 2)
        throw DimensionError("evaluate_grid: expected a 2D field");
    return basis_values(field.basis[0], xs) * field.coeffs * basis_values(field.basis[1], ys).transpose();
}

/// Field values at the mapped nodes of `rule` (same rule in every dimension).
inline Eigen::MatrixXd to_grid(const SpectralField& field, const QuadratureRule& rule) {
    field.check_shape();
    const Transform1D tx(field.basis[0], rule);
    if (field.dims() == 1)
        return tx.synthesize(field.coeffs);
    const Transform1D ty(field.basis[1], rule);
    return ty.synthesize(tx.synthesize(field.coeffs).transpose()).transpose();
}

inline SpectralField from_grid(const BasisSpec& spec, const QuadratureRule& rule, const Eigen::MatrixXd& values) {
    const Transform1D tx(spec, rule);
    if (values.rows() != rule.size() || values.cols() != 1)
        throw DimensionError("from_grid: grid shape does not match the rule");
    return SpectralField({spec}, tx.analyze(values));
}

inline SpectralField from_grid(const BasisSpec& sx, const BasisSpec& sy, const QuadratureRule& rule,
                               const Eigen::MatrixXd& values) {
    const Transform1D tx(sx, rule);
    const Transform1D ty(sy, rule);
    if (values.rows() != rule.size() || values.cols() != rule.size())
        throw DimensionError("from_grid: grid shape does not match the rule");
    return SpectralField({sx, sy}, tx.analyze(ty.analyze(values.transpose()).transpose()));
}

/// Zero-pad or truncate a field onto a basis with other degrees (same
/// centers and scales). Used to compare runs at different resolutions.
inline SpectralField resize_degree(const SpectralField& field, const std::vector<int>& degrees) {
    if (degrees.size() != field.basis.size())
        throw DimensionError("resize_degree: dimension mismatch");
    std::vector<BasisSpec> basis = field.basis;
    for (std::size_t d = 0; d < basis.size(); ++d)
        basis[d].degree = degrees[d];
    const Eigen::Index rows = basis[0].size();
    const Eigen::Index cols = basis.size() == 2 ? basis[1].size() : 1;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows, cols);
    const Eigen::Index r = std::min(rows, field.coeffs.rows());
    const Eigen::Index k = std::min(cols, field.coeffs.cols());
    c.topLeftCorner(r, k) = field.coeffs.topLeftCorner(r, k);
    return SpectralField(std::move(basis), std::move(c));
}

} // namespace hermwave

#endif
