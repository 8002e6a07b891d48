#ifndef HERMWAVE_DVWE_HPP
#define HERMWAVE_DVWE_HPP

// Diffusive-viscous wave equation
//
//   u_tt + alpha u_t - div(beta grad u_t) - div(gamma^2 grad u) = f   on R^d,
//   u(., 0) = u0,  u_t(., 0) = w0,
//
// and its Hermite-Galerkin semi-discretization written as the first-order
// system U' = V, V' = A U + B V + F(t) with A = -S_gamma and
// B = -(M_alpha + S_beta). The basis is orthonormal, so M = I and no linear
// solve is needed anywhere.

#include "hermwave/error.hpp"
#include "hermwave/field.hpp"
#include "hermwave/hermite.hpp"
#include "hermwave/operators.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hermwave {

using SpaceFunction = std::function<double(double x, double y)>;
using TimeFunction = std::function<double(double t)>;
using SpaceTimeFunction = std::function<double(double x, double y, double t)>;

/// A material coefficient. The structural kind is declared, not detected:
/// it decides which operator form assembly uses.
struct Coefficient {
    enum class Kind { constant, single_coordinate, general };

    Kind kind = Kind::constant;
    double value = 1.0;
    int axis = 0; // 0 = x, 1 = y (single_coordinate only)
    std::function<double(double)> along;
    std::vector<double> breaks; // jump locations of `along`, if any
    SpaceFunction field;

    static Coefficient constant(double v) {
        Coefficient c;
        c.kind = Kind::constant;
        c.value = v;
        return c;
    }

    static Coefficient along_axis(int axis, std::function<double(double)> fn, std::vector<double> breaks = {}) {
        if (axis != 0 && axis != 1)
            throw Error("Coefficient: axis must be 0 (x) or 1 (y)");
        Coefficient c;
        c.kind = Kind::single_coordinate;
        c.axis = axis;
        c.along = std::move(fn);
        c.breaks = std::move(breaks);
        return c;
    }

    static Coefficient general(SpaceFunction fn) {
        Coefficient c;
        c.kind = Kind::general;
        c.field = std::move(fn);
        return c;
    }

    double operator()(double x, double y = 0.0) const {
        switch (kind) {
        case Kind::constant:
            return value;
        case Kind::single_coordinate:
            return along(axis == 0 ? x : y);
        case Kind::general:
            return field(x, y);
        }
        return value;
    }

    /// Coefficient with every value squared (gamma -> gamma^2).
    Coefficient squared() const {
        switch (kind) {
        case Kind::constant:
            return constant(value * value);
        case Kind::single_coordinate:
            return along_axis(
                axis,
                [fn = along](double s) {
                    const double v = fn(s);
                    return v * v;
                },
                breaks);
        case Kind::general:
            return general([fn = field](double x, double y) {
                const double v = fn(x, y);
                return v * v;
            });
        }
        return *this;
    }
};

/// Source term f. The separable kind f = sum_k g_k(x) h_k(t) is projected
/// once per term; the general kind is re-projected at every requested time.
struct Source {
    enum class Kind { zero, separable, general };

    struct Term {
        SpaceFunction space;
        TimeFunction time;
    };

    Kind kind = Kind::zero;
    std::vector<Term> terms;
    SpaceTimeFunction full;

    static Source zero() { return {}; }

    static Source separable(SpaceFunction g, TimeFunction h) { return separable_sum({{std::move(g), std::move(h)}}); }

    static Source separable_sum(std::vector<Term> terms) {
        Source s;
        s.kind = Kind::separable;
        s.terms = std::move(terms);
        return s;
    }

    static Source general(SpaceTimeFunction f) {
        Source s;
        s.kind = Kind::general;
        s.full = std::move(f);
        return s;
    }

    double operator()(double x, double y, double t) const {
        switch (kind) {
        case Kind::zero:
            return 0.0;
        case Kind::separable: {
            double v = 0.0;
            for (const auto& term : terms)
                v += term.space(x, y) * term.time(t);
            return v;
        }
        case Kind::general:
            return full(x, y, t);
        }
        return 0.0;
    }
};

/// Ricker wavelet [1 - 2 (pi f0 (t - t0))^2] exp(-(pi f0 (t - t0))^2).
inline double ricker(double t, double f0, double t0) {
    const double a = std::numbers::pi * f0 * (t - t0);
    const double a2 = a * a;
    return (1.0 - 2.0 * a2) * std::exp(-a2);
}

struct DvweProblem {
    int dims = 1;
    Coefficient alpha = Coefficient::constant(1.0);
    Coefficient beta = Coefficient::constant(1.0);
    Coefficient gamma = Coefficient::constant(1.0);
    Source source = Source::zero();
    SpaceFunction u0 = [](double, double) { return 0.0; };
    SpaceFunction w0 = [](double, double) { return 0.0; };
    double t_final = 0.0;
    double dt = 1e-4;
    std::vector<BasisSpec> basis;
    /// Quadrature points per dimension for variable coefficients, projections
    /// and loads; 0 selects 2(N+1).
    int nquad = 0;
    /// Lower bound every coefficient must satisfy at every quadrature node.
    double coefficient_floor = 1e-12;

    int nquad_for(int d) const { return nquad > 0 ? nquad : default_nquad(basis.at(static_cast<std::size_t>(d))); }

    void validate() const {
        if (dims != 1 && dims != 2)
            throw Error("DvweProblem: dims must be 1 or 2");
        if (basis.size() != static_cast<std::size_t>(dims))
            throw Error("DvweProblem: need one BasisSpec per dimension");
        for (const auto& b : basis)
            b.validate();
        if (!(dt > 0.0))
            throw Error("DvweProblem: dt must be positive");
        if (!(t_final >= 0.0))
            throw Error("DvweProblem: T_final must be non-negative");
        if (!(coefficient_floor > 0.0))
            throw Error("DvweProblem: coefficient floor must be positive");
        for (int d = 0; d < dims; ++d)
            if (nquad_for(d) < basis[static_cast<std::size_t>(d)].size())
                throw Error("DvweProblem: nquad below N+1");
    }
};

namespace detail {

inline void check_positive(const char* name, const Coefficient& c, const DvweProblem& p) {
    auto fail = [&](double v, double x, double y) {
        std::ostringstream msg;
        msg << "coefficient " << name << " = " << v << " is below the floor " << p.coefficient_floor
            << " at quadrature node (x=" << x;
        if (p.dims == 2)
            msg << ", y=" << y;
        msg << ")";
        throw CoefficientError(msg.str());
    };
    if (c.kind == Coefficient::Kind::constant) {
        if (!(c.value >= p.coefficient_floor))
            fail(c.value, p.basis[0].center, p.dims == 2 ? p.basis[1].center : 0.0);
        return;
    }
    std::vector<Eigen::VectorXd> nodes;
    for (int d = 0; d < p.dims; ++d) {
        const auto& spec = p.basis[static_cast<std::size_t>(d)];
        const QuadratureRule rule = gauss_hermite(p.nquad_for(d));
        Eigen::VectorXd x(rule.size());
        for (int k = 0; k < rule.size(); ++k)
            x[k] = from_reference(spec, rule.nodes[k]);
        nodes.push_back(std::move(x));
    }
    if (c.kind == Coefficient::Kind::single_coordinate) {
        if (c.axis >= p.dims)
            throw Error(std::string("coefficient ") + name + " varies along an axis the problem does not have");
        for (double s : nodes[static_cast<std::size_t>(c.axis)]) {
            const double v = c.along(s);
            if (!(v >= p.coefficient_floor))
                fail(v, c.axis == 0 ? s : 0.0, c.axis == 1 ? s : 0.0);
        }
        return;
    }
    if (p.dims == 1) {
        for (double x : nodes[0]) {
            const double v = c(x, 0.0);
            if (!(v >= p.coefficient_floor))
                fail(v, x, 0.0);
        }
        return;
    }
    for (double y : nodes[1])
        for (double x : nodes[0]) {
            const double v = c(x, y);
            if (!(v >= p.coefficient_floor))
                fail(v, x, y);
        }
}

// Adds the operator of (w u, v) (mass) or (w grad u, grad v) (stiffness),
// scaled by `factor`, to `out`.
inline void add_weighted(SumOperator& out, const DvweProblem& p, const Coefficient& w, WeightedMode mode,
                         double factor) {
    auto& sep = out.separable();
    const BasisSpec& bx = p.basis[0];
    if (p.dims == 1) {
        const int nq = p.nquad_for(0);
        Operator1D op;
        if (w.kind == Coefficient::Kind::constant)
            op = (mode == WeightedMode::mass ? mass_matrix(bx) : stiffness_matrix(bx)).scaled(w.value);
        else if (mode == WeightedMode::mass)
            op = weighted_mass(bx, [&](double x) { return w(x, 0.0); }, nq, w.breaks);
        else
            op = weighted_stiffness(bx, [&](double x) { return w(x, 0.0); }, nq, w.breaks);
        sep.add(op, factor);
        return;
    }

    const BasisSpec& by = p.basis[1];
    const Operator1D ix = Operator1D::identity(bx.size());
    const Operator1D iy = Operator1D::identity(by.size());
    switch (w.kind) {
    case Coefficient::Kind::constant:
        if (mode == WeightedMode::mass) {
            sep.add(ix, iy, factor * w.value);
        } else {
            sep.add(stiffness_matrix(bx), iy, factor * w.value);
            sep.add(ix, stiffness_matrix(by), factor * w.value);
        }
        return;
    case Coefficient::Kind::single_coordinate: {
        const int axis = w.axis;
        const BasisSpec& bs = axis == 0 ? bx : by;
        const int nq = p.nquad_for(axis);
        const Operator1D m = weighted_mass(bs, w.along, nq, w.breaks);
        if (mode == WeightedMode::mass) {
            if (axis == 0)
                sep.add(m, iy, factor);
            else
                sep.add(ix, m, factor);
            return;
        }
        const Operator1D s = weighted_stiffness(bs, w.along, nq, w.breaks);
        if (axis == 0) {
            sep.add(s, iy, factor);
            sep.add(m, stiffness_matrix(by), factor);
        } else {
            sep.add(stiffness_matrix(bx), m, factor);
            sep.add(ix, s, factor);
        }
        return;
    }
    case Coefficient::Kind::general:
        out.add_general(factor, GeneralOperator2D(bx, by, w.field, mode, p.nquad_for(0), p.nquad_for(1)));
        return;
    }
}

} // namespace detail

/// Projected load F(t) = [(f(., t), Phi_i)]_i, as a coefficient matrix.
class LoadFunction {
public:
    LoadFunction() = default;

    explicit LoadFunction(const DvweProblem& p) : source_(p.source), dims_(p.dims) {
        rows_ = p.basis[0].size();
        cols_ = p.dims == 2 ? p.basis[1].size() : 1;
        if (source_.kind == Source::Kind::zero)
            return;
        tx_ = std::make_shared<Transform1D>(p.basis[0], p.nquad_for(0));
        if (p.dims == 2)
            ty_ = std::make_shared<Transform1D>(p.basis[1], p.nquad_for(1));
        if (source_.kind == Source::Kind::separable)
            for (const auto& term : source_.terms)
                spatial_.push_back(project_at(term.space));
    }

    bool is_zero() const noexcept { return source_.kind == Source::Kind::zero; }

    Eigen::MatrixXd operator()(double t) const {
        switch (source_.kind) {
        case Source::Kind::zero:
            return Eigen::MatrixXd::Zero(rows_, cols_);
        case Source::Kind::separable: {
            Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows_, cols_);
            for (std::size_t k = 0; k < spatial_.size(); ++k) {
                const double h = source_.terms[k].time(t);
                if (!std::isfinite(h)) {
                    std::ostringstream msg;
                    msg << "non-finite source time factor at t=" << t;
                    throw NonFiniteSampleError(msg.str());
                }
                out += h * spatial_[k];
            }
            return out;
        }
        case Source::Kind::general:
            return project_at([&f = source_.full, t](double x, double y) { return f(x, y, t); });
        }
        return Eigen::MatrixXd::Zero(rows_, cols_);
    }

private:
    template <class G>
    Eigen::MatrixXd project_at(G&& g) const {
        if (dims_ == 1)
            return project(*tx_, [&](double x) { return g(x, 0.0); }).coeffs;
        return project(*tx_, *ty_, g).coeffs;
    }

    Source source_;
    int dims_ = 1;
    Eigen::Index rows_ = 0, cols_ = 1;
    std::shared_ptr<const Transform1D> tx_, ty_;
    std::vector<Eigen::MatrixXd> spatial_;
};

/// U' = V, V' = A U + B V + F(t); immutable after assembly.
class SemiDiscreteSystem {
public:
    SemiDiscreteSystem(std::vector<BasisSpec> basis, SumOperator a, SumOperator b, LoadFunction load)
        : basis_(std::move(basis)), a_(std::move(a)), b_(std::move(b)), load_(std::move(load)) {}

    const std::vector<BasisSpec>& basis() const noexcept { return basis_; }
    int dims() const noexcept { return static_cast<int>(basis_.size()); }
    Eigen::Index rows() const { return basis_[0].size(); }
    Eigen::Index cols() const { return dims() == 2 ? basis_[1].size() : 1; }

    const SumOperator& a_op() const noexcept { return a_; }
    const SumOperator& b_op() const noexcept { return b_; }
    const LoadFunction& load_function() const noexcept { return load_; }

    Eigen::MatrixXd apply_a(const Eigen::MatrixXd& u) const { return a_.apply(u); }
    Eigen::MatrixXd apply_b(const Eigen::MatrixXd& v) const { return b_.apply(v); }
    Eigen::MatrixXd load(double t) const { return load_(t); }
    bool has_load() const noexcept { return !load_.is_zero(); }

    double a_norm1_bound() const { return a_.norm1_bound(); }

    SpectralField as_field(const Eigen::MatrixXd& coeffs) const { return SpectralField(basis_, coeffs); }

private:
    std::vector<BasisSpec> basis_;
    SumOperator a_, b_;
    LoadFunction load_;
};

/// Build A = -S_gamma and B = -(M_alpha + S_beta) in the cheapest faithful
/// form for each coefficient's declared kind.
inline SemiDiscreteSystem assemble(const DvweProblem& p) {
    p.validate();
    detail::check_positive("alpha", p.alpha, p);
    detail::check_positive("beta", p.beta, p);
    detail::check_positive("gamma", p.gamma, p);

    const int nx = p.basis[0].size();
    const int ny = p.dims == 2 ? p.basis[1].size() : 1;
    SumOperator a(SeparableOperator(p.dims, nx, ny));
    SumOperator b(SeparableOperator(p.dims, nx, ny));
    detail::add_weighted(a, p, p.gamma.squared(), WeightedMode::stiffness, -1.0);
    detail::add_weighted(b, p, p.alpha, WeightedMode::mass, -1.0);
    detail::add_weighted(b, p, p.beta, WeightedMode::stiffness, -1.0);
    a.separable().simplify();
    b.separable().simplify();
    return SemiDiscreteSystem(p.basis, std::move(a), std::move(b), LoadFunction(p));
}

inline Eigen::MatrixXd load_vector(const DvweProblem& p, double t) { return LoadFunction(p)(t); }

/// Projected initial data (U0, V0) = (Pi u0, Pi w0).
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> initial_coefficients(const DvweProblem& p) {
    if (p.dims == 1) {
        const Transform1D tx(p.basis[0], p.nquad_for(0));
        return {project(tx, [&](double x) { return p.u0(x, 0.0); }).coeffs,
                project(tx, [&](double x) { return p.w0(x, 0.0); }).coeffs};
    }
    const Transform1D tx(p.basis[0], p.nquad_for(0));
    const Transform1D ty(p.basis[1], p.nquad_for(1));
    return {project(tx, ty, p.u0).coeffs, project(tx, ty, p.w0).coeffs};
}

/// Discrete energy 1/2 (|V|^2 + U^T S_gamma U).
inline double energy(const SemiDiscreteSystem& system, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
    if (u.rows() != system.rows() || u.cols() != system.cols() || v.rows() != u.rows() || v.cols() != u.cols())
        throw DimensionError("energy: state shape does not match the system");
    const double potential = -(u.cwiseProduct(system.apply_a(u))).sum();
    return 0.5 * (v.squaredNorm() + potential);
}

} // namespace hermwave

#endif
