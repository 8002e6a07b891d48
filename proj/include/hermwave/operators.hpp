#ifndef HERMWAVE_OPERATORS_HPP
#define HERMWAVE_OPERATORS_HPP

// Spectral matrices in the mapped Hermite-function basis and their 2D
// tensor-product composition.
//
//   mass            M_ij   = (phi~_j, phi~_i)            (identity)
//   weighted mass   M_w,ij = (w phi~_j, phi~_i)
//   stiffness       K_ij   = (phi~_j', phi~_i')
//   weighted stiff  S_w,ij = (w phi~_j', phi~_i')
//
// 2D operators are sums of Kronecker terms X (x) Y acting on a coefficient
// matrix C as X C Y^T, so the (N+1)^2 x (N+1)^2 matrix is never formed.

#include "hermwave/error.hpp"
#include "hermwave/field.hpp"
#include "hermwave/hermite.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>
#include <utility>
#include <vector>

namespace hermwave {

/// Dense symmetric (N+1) x (N+1) operator with a sparsity hint used by apply.
///
/// bandwidth_hint: 0 = diagonal, b > 0 = entries only within |i-j| <= b,
/// -1 = full.
class Operator1D {
public:
    Operator1D() = default;

    Operator1D(Eigen::MatrixXd matrix, int bandwidth_hint) : matrix_(std::move(matrix)), bandwidth_(bandwidth_hint) {
        if (matrix_.rows() != matrix_.cols())
            throw DimensionError("Operator1D: matrix must be square");
        if (bandwidth_ < 0 || bandwidth_ >= size())
            bandwidth_ = -1;
        classify();
    }

    static Operator1D identity(int n) { return Operator1D(Eigen::MatrixXd::Identity(n, n), 0); }

    int size() const noexcept { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    int bandwidth_hint() const noexcept { return bandwidth_; }
    bool is_identity() const noexcept { return identity_; }

    double norm1() const { return matrix_.cwiseAbs().colwise().sum().maxCoeff(); }

    /// out = K * C
    Eigen::MatrixXd apply_left(const Eigen::MatrixXd& c) const {
        check_rows(c.rows());
        if (identity_)
            return c;
        if (bandwidth_ < 0)
            return matrix_ * c;
        const Eigen::Index n = size();
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c.rows(), c.cols());
        for (int off : offsets_) {
            const Eigen::Index m = n - std::abs(off);
            const auto d = matrix_.diagonal(off);
            if (off >= 0)
                out.topRows(m).noalias() += d.asDiagonal() * c.bottomRows(m);
            else
                out.bottomRows(m).noalias() += d.asDiagonal() * c.topRows(m);
        }
        return out;
    }

    /// out = C * K^T
    Eigen::MatrixXd apply_right(const Eigen::MatrixXd& c) const {
        check_rows(c.cols());
        if (identity_)
            return c;
        if (bandwidth_ < 0)
            return c * matrix_.transpose();
        const Eigen::Index n = size();
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c.rows(), c.cols());
        for (int off : offsets_) {
            const Eigen::Index m = n - std::abs(off);
            const auto d = matrix_.diagonal(off);
            if (off >= 0)
                out.leftCols(m).noalias() += c.rightCols(m) * d.asDiagonal();
            else
                out.rightCols(m).noalias() += c.leftCols(m) * d.asDiagonal();
        }
        return out;
    }

    Operator1D scaled(double a) const { return Operator1D(a * matrix_, bandwidth_); }

    friend Operator1D operator+(const Operator1D& a, const Operator1D& b) {
        if (a.size() != b.size())
            throw DimensionError("Operator1D: size mismatch in sum");
        const int bw = (a.bandwidth_ < 0 || b.bandwidth_ < 0) ? -1 : std::max(a.bandwidth_, b.bandwidth_);
        return Operator1D(a.matrix_ + b.matrix_, bw);
    }

private:
    void check_rows(Eigen::Index n) const {
        if (n != size())
            throw DimensionError("Operator1D: operand has " + std::to_string(n) + " rows, operator is " +
                                 std::to_string(size()));
    }

    void classify() {
        identity_ = bandwidth_ == 0 && matrix_.isIdentity(0.0);
        offsets_.clear();
        if (bandwidth_ < 0)
            return;
        for (int off = -bandwidth_; off <= bandwidth_; ++off)
            if (matrix_.diagonal(off).cwiseAbs().maxCoeff() != 0.0)
                offsets_.push_back(off);
    }

    Eigen::MatrixXd matrix_;
    int bandwidth_ = -1;
    bool identity_ = false;
    std::vector<int> offsets_;
};

inline Operator1D mass_matrix(const BasisSpec& spec) {
    spec.validate();
    return Operator1D::identity(spec.size());
}

/// Closed-form (phi~_j', phi~_i'): diagonal (2n+1)/2, (n, n+2) entries
/// -sqrt((n+1)(n+2))/2, all scaled by s^{-2}.
inline Operator1D stiffness_matrix(const BasisSpec& spec) {
    spec.validate();
    const int n = spec.size();
    const double inv_s2 = 1.0 / (spec.scale * spec.scale);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        k(i, i) = (2.0 * i + 1.0) / 2.0 * inv_s2;
        if (i + 2 < n) {
            const double v = -std::sqrt((i + 1.0) * (i + 2.0)) / 2.0 * inv_s2;
            k(i, i + 2) = v;
            k(i + 2, i) = v;
        }
    }
    return Operator1D(std::move(k), 2);
}

namespace detail {

inline void check_nquad(const BasisSpec& spec, int nquad, const char* who) {
    if (nquad < spec.size())
        throw Error(std::string(who) + ": nquad=" + std::to_string(nquad) + " is below N+1=" +
                    std::to_string(spec.size()));
}

template <std::invocable<double> W>
Eigen::VectorXd weighted_node_weights(const Transform1D& t, W&& w) {
    Eigen::VectorXd out(t.nquad());
    for (int k = 0; k < t.nquad(); ++k) {
        const double x = t.physical_nodes()[k];
        const double v = w(x);
        check_finite_sample(v, x);
        out[k] = t.rule().scaled_weights[k] * v;
    }
    return out;
}

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Composite Gauss-Legendre rule in the reference variable for integrands
// phi_i phi_j w with i, j <= deg and w smooth between `breaks` (physical
// coordinates). Panels of width <= 1 cover the turning points plus a margin
// where phi_0^2 ~ 1e-21; every break is a panel edge. Returns (nodes, weights).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> panel_rule(const BasisSpec& spec, int deg,
                                                              const std::vector<double>& breaks) {
    const double reach = std::sqrt(2.0 * deg + 3.0) + 7.0;
    std::vector<double> edges;
    const int panels = static_cast<int>(std::ceil(2.0 * reach));
    for (int k = 0; k <= panels; ++k)
        edges.push_back(-reach + 2.0 * reach * k / panels);
    for (double b : breaks) {
        const double xi = (b - spec.center) / spec.scale;
        if (xi > -reach && xi < reach)
            edges.push_back(xi);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // up to ~2 sqrt(2 deg) oscillations of the product per unit panel
    const QuadratureRule gl = gauss_legendre(static_cast<int>(std::ceil(std::sqrt(2.0 * deg + 3.0))) + 16);
    Eigen::VectorXd nodes((edges.size() - 1) * gl.size()), weights(nodes.size());
    Eigen::Index at = 0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]), half = 0.5 * (edges[p + 1] - edges[p]);
        for (int k = 0; k < gl.size(); ++k, ++at) {
            nodes[at] = mid + half * gl.nodes[k];
            weights[at] = half * gl.weights[k];
        }
    }
    return {nodes, weights};
}

template <std::invocable<double> W>
Eigen::VectorXd weighted_panel_weights(const BasisSpec& spec, const Eigen::VectorXd& xi, const Eigen::VectorXd& wq,
                                       W&& w) {
    Eigen::VectorXd out(xi.size());
    for (Eigen::Index k = 0; k < xi.size(); ++k) {
        const double x = from_reference(spec, xi[k]);
        const double v = w(x);
        check_finite_sample(v, x);
        out[k] = wq[k] * v;
    }
    return out;
}

} // namespace detail

/// (w phi~_j, phi~_i) by nquad-point Gauss-Hermite quadrature, w sampled at
/// the physical nodes c + s xi_k. If w jumps, pass the jump locations in
/// `breaks`: Gauss-Hermite nodes straddle a jump arbitrarily and the error
/// then depends erratically on N, so a panel rule split at the jumps is used
/// instead and nquad is ignored.
template <std::invocable<double> W>
Operator1D weighted_mass(const BasisSpec& spec, W&& w, int nquad, const std::vector<double>& breaks = {}) {
    spec.validate();
    detail::check_nquad(spec, nquad, "weighted_mass");
    if (!breaks.empty()) {
        const auto [xi, wq] = detail::panel_rule(spec, spec.degree, breaks);
        const Eigen::VectorXd ww = detail::weighted_panel_weights(spec, xi, wq, std::forward<W>(w));
        const Eigen::MatrixXd phi = hermite_fun_matrix(spec.degree, xi);
        return Operator1D(detail::symmetrize(phi.transpose() * ww.asDiagonal() * phi), -1);
    }
    const Transform1D t(spec, nquad);
    const Eigen::VectorXd ww = detail::weighted_node_weights(t, std::forward<W>(w));
    const Eigen::MatrixXd& phi = t.basis_at_nodes();
    return Operator1D(detail::symmetrize(phi.transpose() * ww.asDiagonal() * phi), -1);
}

/// (w phi~_j', phi~_i'). Derivatives are expanded exactly in the degree N+1
/// basis, the weighted Gram is formed there and contracted back.
template <std::invocable<double> W>
Operator1D weighted_stiffness(const BasisSpec& spec, W&& w, int nquad, const std::vector<double>& breaks = {}) {
    spec.validate();
    detail::check_nquad(spec, nquad, "weighted_stiffness");
    BasisSpec wide = spec;
    wide.degree = spec.degree + 1;
    const double inv_s2 = 1.0 / (spec.scale * spec.scale);
    if (!breaks.empty()) {
        const auto [xi, wq] = detail::panel_rule(wide, wide.degree, breaks);
        const Eigen::VectorXd ww = detail::weighted_panel_weights(spec, xi, wq, std::forward<W>(w));
        const Eigen::MatrixXd dphi = hermite_fun_matrix(wide.degree, xi) * derivative_matrix(spec.degree);
        return Operator1D(detail::symmetrize(inv_s2 * (dphi.transpose() * ww.asDiagonal() * dphi)), -1);
    }
    const Transform1D t(wide, nquad);
    const Eigen::VectorXd ww = detail::weighted_node_weights(t, std::forward<W>(w));
    const Eigen::MatrixXd dphi = t.basis_at_nodes() * derivative_matrix(spec.degree); // nq x (N+1)
    return Operator1D(detail::symmetrize(inv_s2 * (dphi.transpose() * ww.asDiagonal() * dphi)), -1);
}

/// One Kronecker term factor * (x (x) y). In 1D only `x` is used.
struct KroneckerTerm {
    Operator1D x;
    Operator1D y;
    double factor = 1.0;
};

/// Sum of Kronecker terms, applied as sum_t factor_t X_t C Y_t^T.
class SeparableOperator {
public:
    SeparableOperator() = default;
    SeparableOperator(int dims, int nx, int ny) : dims_(dims), nx_(nx), ny_(dims == 2 ? ny : 1) {
        if (dims != 1 && dims != 2)
            throw DimensionError("SeparableOperator: dims must be 1 or 2");
    }

    int dims() const noexcept { return dims_; }
    int rows() const noexcept { return nx_; }
    int cols() const noexcept { return ny_; }
    const std::vector<KroneckerTerm>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    void add(const Operator1D& x, double factor = 1.0) {
        if (dims_ != 1)
            throw DimensionError("SeparableOperator: 1D term added to a 2D operator");
        if (x.size() != nx_)
            throw DimensionError("SeparableOperator: factor size does not match");
        terms_.push_back({x, Operator1D{}, factor});
    }

    void add(const Operator1D& x, const Operator1D& y, double factor = 1.0) {
        if (dims_ != 2)
            throw DimensionError("SeparableOperator: 2D term added to a 1D operator");
        if (x.size() != nx_ || y.size() != ny_)
            throw DimensionError("SeparableOperator: factor sizes do not match");
        terms_.push_back({x, y, factor});
    }

    /// Fold terms that share an identity factor into one term.
    void simplify() {
        std::vector<KroneckerTerm> out;
        if (dims_ == 1) {
            if (terms_.empty())
                return;
            Operator1D sum = terms_[0].x.scaled(terms_[0].factor);
            for (std::size_t i = 1; i < terms_.size(); ++i)
                sum = sum + terms_[i].x.scaled(terms_[i].factor);
            terms_ = {{sum, Operator1D{}, 1.0}};
            return;
        }
        Operator1D x_only, y_only;
        bool have_x = false, have_y = false;
        for (const auto& t : terms_) {
            if (t.y.is_identity()) {
                const Operator1D s = t.x.scaled(t.factor);
                x_only = have_x ? x_only + s : s;
                have_x = true;
            } else if (t.x.is_identity()) {
                const Operator1D s = t.y.scaled(t.factor);
                y_only = have_y ? y_only + s : s;
                have_y = true;
            } else {
                out.push_back(t);
            }
        }
        if (have_x)
            out.push_back({x_only, Operator1D::identity(ny_), 1.0});
        if (have_y)
            out.push_back({Operator1D::identity(nx_), y_only, 1.0});
        terms_ = std::move(out);
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& c) const {
        if (c.rows() != nx_ || c.cols() != ny_)
            throw DimensionError("SeparableOperator: coefficient shape mismatch");
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nx_, ny_);
        for (const auto& t : terms_) {
            if (dims_ == 1)
                out.noalias() += t.factor * t.x.apply_left(c);
            else
                out.noalias() += t.factor * t.y.apply_right(t.x.apply_left(c));
        }
        return out;
    }

    /// Upper bound on the induced 1-norm of the full operator.
    double norm1_bound() const {
        double s = 0.0;
        for (const auto& t : terms_)
            s += std::abs(t.factor) * t.x.norm1() * (dims_ == 2 ? t.y.norm1() : 1.0);
        return s;
    }

    /// Explicit matrix; row index i * ny + j matches coefficient C(i, j).
    /// For tests and small sizes only.
    Eigen::MatrixXd dense() const {
        const Eigen::Index n = static_cast<Eigen::Index>(nx_) * ny_;
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
        for (const auto& t : terms_) {
            if (dims_ == 1) {
                out += t.factor * t.x.matrix();
                continue;
            }
            for (int i = 0; i < nx_; ++i)
                for (int k = 0; k < nx_; ++k) {
                    const double xv = t.x.matrix()(i, k);
                    if (xv != 0.0)
                        out.block(i * ny_, k * ny_, ny_, ny_) += t.factor * xv * t.y.matrix();
                }
        }
        return out;
    }

private:
    int dims_ = 1;
    int nx_ = 0;
    int ny_ = 1;
    std::vector<KroneckerTerm> terms_;
};

inline SeparableOperator compose_2d(const std::vector<KroneckerTerm>& term_list) {
    if (term_list.empty())
        throw DimensionError("compose_2d: empty term list");
    SeparableOperator op(2, term_list[0].x.size(), term_list[0].y.size());
    for (const auto& t : term_list)
        op.add(t.x, t.y, t.factor);
    return op;
}

inline SpectralField apply(const SeparableOperator& op, const SpectralField& field) {
    if (field.dims() != op.dims())
        throw DimensionError("apply: field and operator dimensions differ");
    return SpectralField(field.basis, op.apply(field.coeffs));
}

enum class WeightedMode { mass, stiffness };

/// Matrix-free weighted mass or stiffness for a 2D coefficient without
/// separable structure: transform to the tensor quadrature grid, multiply
/// pointwise, transform back. O(N^3) per application.
class GeneralOperator2D {
public:
    template <std::invocable<double, double> W>
    GeneralOperator2D(const BasisSpec& sx, const BasisSpec& sy, W&& w, WeightedMode mode, int nquad_x, int nquad_y)
        : mode_(mode), nx_(sx.size()), ny_(sy.size()) {
        sx.validate();
        sy.validate();
        detail::check_nquad(sx, nquad_x, "GeneralOperator2D");
        detail::check_nquad(sy, nquad_y, "GeneralOperator2D");
        const QuadratureRule rx = gauss_hermite(nquad_x);
        const QuadratureRule ry = nquad_y == nquad_x ? rx : gauss_hermite(nquad_y);

        BasisSpec wx = sx, wy = sy;
        if (mode == WeightedMode::stiffness) {
            wx.degree += 1;
            wy.degree += 1;
        }
        const Transform1D tx(wx, rx);
        const Transform1D ty(wy, ry);
        // Values of phi_j (and of phi_j' in stiffness mode) at the nodes.
        const Eigen::MatrixXd px = hermite_fun_matrix(sx.degree, rx.nodes);
        const Eigen::MatrixXd py = hermite_fun_matrix(sy.degree, ry.nodes);
        vx_ = px;
        vy_ = py;
        if (mode == WeightedMode::stiffness) {
            dx_ = tx.basis_at_nodes() * derivative_matrix(sx.degree);
            dy_ = ty.basis_at_nodes() * derivative_matrix(sy.degree);
            inv_sx2_ = 1.0 / (sx.scale * sx.scale);
            inv_sy2_ = 1.0 / (sy.scale * sy.scale);
        }
        weights_.resize(nquad_x, nquad_y);
        max_abs_w_ = 0.0;
        for (int j = 0; j < nquad_y; ++j) {
            const double y = from_reference(sy, ry.nodes[j]);
            for (int i = 0; i < nquad_x; ++i) {
                const double x = from_reference(sx, rx.nodes[i]);
                const double v = w(x, y);
                detail::check_finite_sample(v, x, y);
                max_abs_w_ = std::max(max_abs_w_, std::abs(v));
                weights_(i, j) = rx.scaled_weights[i] * ry.scaled_weights[j] * v;
            }
        }
        if (mode == WeightedMode::stiffness) {
            const Operator1D kx = stiffness_matrix(sx);
            const Operator1D ky = stiffness_matrix(sy);
            norm_bound_ = max_abs_w_ * (kx.norm1() + ky.norm1());
        } else {
            norm_bound_ = max_abs_w_;
        }
    }

    WeightedMode mode() const noexcept { return mode_; }
    int rows() const noexcept { return nx_; }
    int cols() const noexcept { return ny_; }
    double norm1_bound() const noexcept { return norm_bound_; }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& c) const {
        if (c.rows() != nx_ || c.cols() != ny_)
            throw DimensionError("GeneralOperator2D: coefficient shape mismatch");
        if (mode_ == WeightedMode::mass)
            return sandwich(vx_, vy_, c);
        return inv_sx2_ * sandwich(dx_, vy_, c) + inv_sy2_ * sandwich(vx_, dy_, c);
    }

private:
    // ex^T (W .* (ex C ey^T)) ey
    Eigen::MatrixXd sandwich(const Eigen::MatrixXd& ex, const Eigen::MatrixXd& ey, const Eigen::MatrixXd& c) const {
        Eigen::MatrixXd grid = ex * c * ey.transpose();
        grid.array() *= weights_.array();
        return ex.transpose() * grid * ey;
    }

    WeightedMode mode_;
    int nx_, ny_;
    Eigen::MatrixXd vx_, vy_, dx_, dy_;
    Eigen::MatrixXd weights_;
    double inv_sx2_ = 1.0, inv_sy2_ = 1.0;
    double max_abs_w_ = 0.0;
    double norm_bound_ = 0.0;
};

template <std::invocable<double, double> W>
SpectralField apply_general_2d(const BasisSpec& sx, const BasisSpec& sy, W&& w, WeightedMode mode,
                               const SpectralField& field, int nquad = 0) {
    if (field.dims() != 2 || !(field.basis[0] == sx) || !(field.basis[1] == sy))
        throw DimensionError("apply_general_2d: field basis does not match");
    const int nqx = nquad > 0 ? nquad : default_nquad(sx);
    const int nqy = nquad > 0 ? nquad : default_nquad(sy);
    const GeneralOperator2D op(sx, sy, std::forward<W>(w), mode, nqx, nqy);
    return SpectralField(field.basis, op.apply(field.coeffs));
}

/// A separable part plus any number of scaled matrix-free parts.
class SumOperator {
public:
    SumOperator() = default;
    explicit SumOperator(SeparableOperator separable) : separable_(std::move(separable)) {}

    SeparableOperator& separable() noexcept { return separable_; }
    const SeparableOperator& separable() const noexcept { return separable_; }
    const std::vector<std::pair<double, GeneralOperator2D>>& general() const noexcept { return general_; }

    void add_general(double factor, GeneralOperator2D op) { general_.emplace_back(factor, std::move(op)); }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& c) const {
        Eigen::MatrixXd out = separable_.apply(c);
        for (const auto& [factor, op] : general_)
            out.noalias() += factor * op.apply(c);
        return out;
    }

    double norm1_bound() const {
        double s = separable_.norm1_bound();
        for (const auto& [factor, op] : general_)
            s += std::abs(factor) * op.norm1_bound();
        return s;
    }

private:
    SeparableOperator separable_;
    std::vector<std::pair<double, GeneralOperator2D>> general_;
};

} // namespace hermwave

#endif
