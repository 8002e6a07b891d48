#include "hermwave/dvwe.hpp"
#include "hermwave/scenarios.hpp"
#include "hermwave/ssprk3.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

using namespace hermwave;

namespace {

DvweProblem unit_problem_1d(int N) {
    DvweProblem p;
    p.dims = 1;
    p.basis = {BasisSpec{N}};
    p.t_final = 0.1;
    return p;
}

Eigen::MatrixXd dense_of(const SemiDiscreteSystem& sys, bool a_op) {
    const Eigen::Index n = sys.rows() * sys.cols();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index p = 0; p < n; ++p) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(sys.rows(), sys.cols());
        e(p % sys.rows(), p / sys.rows()) = 1.0;
        const Eigen::MatrixXd r = a_op ? sys.apply_a(e) : sys.apply_b(e);
        out.col(p) = Eigen::Map<const Eigen::VectorXd>(r.data(), n);
    }
    return out;
}

double mapped(const BasisSpec& s, int n, double x) {
    return hermite_fun_eval(n, to_reference(s, x))[n] / std::sqrt(s.scale);
}

// second derivative of the mapped Hermite function: phi'' = (xi^2 - (2n+1)) phi
double mapped_dd(const BasisSpec& s, int n, double x) {
    const double xi = to_reference(s, x);
    return (xi * xi - (2.0 * n + 1.0)) * mapped(s, n, x) / (s.scale * s.scale);
}

} // namespace

TEST(Assemble, UnitCoefficientsGiveClosedForms) {
    const DvweProblem p = unit_problem_1d(6);
    const SemiDiscreteSystem sys = assemble(p);
    const Eigen::MatrixXd k = stiffness_matrix(p.basis[0]).matrix();
    EXPECT_LE((dense_of(sys, true) + k).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((dense_of(sys, false) + Eigen::MatrixXd::Identity(7, 7) + k).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assemble, N2Example) {
    const SemiDiscreteSystem sys = assemble(unit_problem_1d(2));
    const Eigen::MatrixXd a = dense_of(sys, true);
    EXPECT_NEAR(a(0, 0), -0.5, 1e-15);
    EXPECT_NEAR(a(1, 1), -1.5, 1e-15);
    EXPECT_NEAR(a(2, 2), -2.5, 1e-15);
    EXPECT_NEAR(a(0, 2), std::sqrt(2.0) / 2, 1e-15);
    const Eigen::MatrixXd b = dense_of(sys, false);
    EXPECT_NEAR(b(0, 0), -1.5, 1e-15);
    EXPECT_NEAR(b(2, 0), std::sqrt(2.0) / 2, 1e-15);
}

TEST(Assemble, GammaEntersSquared) {
    DvweProblem p = unit_problem_1d(8);
    p.gamma = Coefficient::constant(1.7);
    const Eigen::MatrixXd a1 = dense_of(assemble(p), true);
    p.gamma = Coefficient::constant(3.4);
    const Eigen::MatrixXd a2 = dense_of(assemble(p), true);
    EXPECT_LE((a2 - 4.0 * a1).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assemble, SingleCoordinateMatchesGeneral2D) {
    auto layer = [](double y) { return 1.0 + 0.5 * std::tanh(y - 0.3); };
    DvweProblem p;
    p.dims = 2;
    p.basis = {BasisSpec{7, 0.0, 1.0}, BasisSpec{6, 0.5, 0.8}};
    p.alpha = Coefficient::along_axis(1, layer);
    p.beta = Coefficient::along_axis(0, [](double x) { return 0.2 + 0.1 * x * x / (1 + x * x); });
    p.gamma = Coefficient::along_axis(1, layer);
    const SemiDiscreteSystem fast = assemble(p);

    DvweProblem q = p;
    q.alpha = Coefficient::general([&](double, double y) { return layer(y); });
    q.beta = Coefficient::general([](double x, double) { return 0.2 + 0.1 * x * x / (1 + x * x); });
    q.gamma = Coefficient::general([&](double, double y) { return layer(y); });
    const SemiDiscreteSystem slow = assemble(q);
    EXPECT_FALSE(slow.a_op().general().empty());
    EXPECT_TRUE(fast.a_op().general().empty());
    EXPECT_LE((dense_of(fast, true) - dense_of(slow, true)).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LE((dense_of(fast, false) - dense_of(slow, false)).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Assemble, OperatorsSymmetricNegativeSemidefinite) {
    DvweProblem p;
    p.dims = 2;
    p.basis = {BasisSpec{5}, BasisSpec{5}};
    p.alpha = Coefficient::general([](double x, double y) { return 1.0 + 0.3 * std::sin(x * y); });
    p.beta = Coefficient::constant(0.2);
    p.gamma = Coefficient::along_axis(0, [](double x) { return x < 0.5 ? 1.0 : 2.0; });
    const SemiDiscreteSystem sys = assemble(p);
    for (bool a_op : {true, false}) {
        const Eigen::MatrixXd m = dense_of(sys, a_op);
        EXPECT_LE((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12 * m.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
        EXPECT_LE(eig.eigenvalues().maxCoeff(), 1e-10);
    }
}

TEST(Assemble, RejectsNonPositiveCoefficients) {
    DvweProblem p = unit_problem_1d(6);
    p.alpha = Coefficient::constant(0.0);
    EXPECT_THROW(assemble(p), CoefficientError);
    p = unit_problem_1d(6);
    p.gamma = Coefficient::along_axis(0, [](double x) { return x; });
    try {
        assemble(p);
        FAIL() << "expected CoefficientError";
    } catch (const CoefficientError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("gamma"), std::string::npos) << msg;
        EXPECT_NE(msg.find("x="), std::string::npos) << msg;
    }
}

TEST(Assemble, RejectsBadTimes) {
    DvweProblem p = unit_problem_1d(4);
    p.dt = 0.0;
    EXPECT_THROW(assemble(p), Error);
    p.dt = -1e-3;
    EXPECT_THROW(assemble(p), Error);
    p = unit_problem_1d(4);
    p.t_final = -1.0;
    EXPECT_THROW(assemble(p), Error);
    p = unit_problem_1d(4);
    p.basis = {BasisSpec{4}, BasisSpec{4}};
    EXPECT_THROW(assemble(p), Error);
}

TEST(Load, ZeroSource) {
    const DvweProblem p = unit_problem_1d(5);
    const SemiDiscreteSystem sys = assemble(p);
    EXPECT_FALSE(sys.has_load());
    for (double t : {0.0, 0.5, 3.0})
        EXPECT_EQ(load_vector(p, t).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Load, Ex1CaseTwoAtTimeZero) {
    const ScenarioConfig cfg = default_config("EX1_II");
    const DvweProblem p = find_scenario("EX1_II").build(cfg, 20);
    const SpectralField expect = project(p.basis[0], [](double x) { return std::exp(-x * x) * (3 - 4 * x * x); });
    EXPECT_LE((load_vector(p, 0.0) - expect.coeffs).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Load, RickerPeakGivesSpatialProjection) {
    DvweProblem p;
    p.dims = 2;
    p.basis = {BasisSpec{12, 10.0, 1.0}, BasisSpec{12, 10.0, 1.0}};
    auto g = [](double x, double y) { return std::exp(-((x - 10) * (x - 10) + (y - 10) * (y - 10))); };
    p.source = Source::separable(g, [](double t) { return ricker(t, 15.0, 0.05); });
    EXPECT_DOUBLE_EQ(ricker(0.05, 15.0, 0.05), 1.0);
    const SpectralField expect = project(p.basis[0], p.basis[1], g);
    EXPECT_LE((load_vector(p, 0.05) - expect.coeffs).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Load, GeneralSourceReprojects) {
    DvweProblem p = unit_problem_1d(10);
    p.source = Source::general([](double x, double, double t) { return std::exp(-x * x) * (1 + t * x); });
    const SpectralField expect = project(p.basis[0], [](double x) { return std::exp(-x * x) * (1 + 0.7 * x); });
    EXPECT_LE((load_vector(p, 0.7) - expect.coeffs).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Load, NonFiniteTimeFactorRejected) {
    DvweProblem p = unit_problem_1d(4);
    p.source = Source::separable([](double x, double) { return std::exp(-x * x); },
                                 [](double t) { return 1.0 / t; });
    const SemiDiscreteSystem sys = assemble(p);
    EXPECT_THROW(sys.load(0.0), NonFiniteSampleError);
}

TEST(Energy, SimpleStates) {
    const SemiDiscreteSystem sys = assemble(unit_problem_1d(4));
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 1);
    EXPECT_EQ(energy(sys, zero, zero), 0.0);
    Eigen::MatrixXd e0 = zero;
    e0(0, 0) = 1.0;
    EXPECT_DOUBLE_EQ(energy(sys, zero, e0), 0.5);
    EXPECT_DOUBLE_EQ(energy(sys, e0, zero), 0.25); // (1/2) K_00 = 1/4
    EXPECT_THROW(energy(sys, Eigen::MatrixXd::Zero(4, 1), zero), DimensionError);
}

TEST(Energy, DecaysForEx1Data) {
    const ScenarioConfig cfg = default_config("EX1_I");
    DvweProblem p = find_scenario("EX1_I").build(cfg, 30);
    const SemiDiscreteSystem sys = assemble(p);
    auto [u0, v0] = initial_coefficients(p);
    const double e0 = energy(sys, u0, v0);
    const StateVector end = integrate(sys, StateVector{u0, v0, 0.0}, 1e-4, 0.5);
    EXPECT_LT(energy(sys, end.u, end.v), e0);
}

TEST(Energy, NonIncreasingPerStepVariableCoefficients) {
    DvweProblem p;
    p.dims = 2;
    p.basis = {BasisSpec{20, 0.0, 1.0}, BasisSpec{20, 0.0, 1.0}};
    p.alpha = Coefficient::along_axis(1, [](double y) { return y <= 0.5 ? 1.0 : 2.5; });
    p.beta = Coefficient::along_axis(1, [](double y) { return y <= 0.5 ? 0.02 : 0.05; });
    p.gamma = Coefficient::along_axis(1, [](double y) { return y <= 0.5 ? 3.0 : 4.0; });
    p.nquad = 4 * 21;
    p.u0 = [](double x, double y) { return std::exp(-(x * x + (y - 0.4) * (y - 0.4))); };
    p.w0 = [](double x, double y) { return y * std::exp(-(x * x + y * y)); };
    p.dt = 1e-3;
    const SemiDiscreteSystem sys = assemble(p);
    auto [u, v] = initial_coefficients(p);
    StateVector s{u, v, 0.0};
    const double e0 = energy(sys, u, v);
    double prev = e0;
    for (int k = 0; k < 300; ++k) {
        s = step(sys, s, p.dt);
        const double e = energy(sys, s.u, s.v);
        ASSERT_LE(e - prev, 10 * p.dt * p.dt * p.dt * e0) << "step " << k;
        prev = e;
    }
    EXPECT_LT(prev, e0);
}

TEST(ZeroData, StaysExactlyZero) {
    for (int dims : {1, 2}) {
        DvweProblem p;
        p.dims = dims;
        p.basis.assign(dims, BasisSpec{16, 0.0, 1.0});
        p.alpha = Coefficient::along_axis(0, [](double x) { return 1.0 + x * x; });
        p.gamma = Coefficient::constant(5.0);
        const SemiDiscreteSystem sys = assemble(p);
        auto [u, v] = initial_coefficients(p);
        const StateVector end = integrate(sys, StateVector{u, v, 0.0}, 1e-3, 0.2);
        EXPECT_TRUE((end.u.array() == 0.0).all() && (end.v.array() == 0.0).all()) << dims << "D";
    }
}

// u* in the discrete space with f* built from closed-form derivatives: the
// assembled system must hold for u*'s coefficients.
TEST(Residual, ManufacturedSolution1D) {
    const BasisSpec spec{7, 0.5, 0.9};
    const double alpha = 1.5, beta = 0.3, gamma = 2.0;
    // u* = cos t phi0 + sin 2t phi1 + e^{-t} phi3
    auto c = [](double t) { return std::array<double, 3>{std::cos(t), std::sin(2 * t), std::exp(-t)}; };
    auto ct = [](double t) { return std::array<double, 3>{-std::sin(t), 2 * std::cos(2 * t), -std::exp(-t)}; };
    auto ctt = [](double t) { return std::array<double, 3>{-std::cos(t), -4 * std::sin(2 * t), std::exp(-t)}; };
    const int idx[3] = {0, 1, 3};

    DvweProblem p;
    p.dims = 1;
    p.basis = {spec};
    p.alpha = Coefficient::constant(alpha);
    p.beta = Coefficient::constant(beta);
    p.gamma = Coefficient::constant(gamma);
    p.source = Source::general([&](double x, double, double t) {
        double f = 0;
        const auto a = c(t), at = ct(t), att = ctt(t);
        for (int k = 0; k < 3; ++k) {
            const double phi = mapped(spec, idx[k], x), dd = mapped_dd(spec, idx[k], x);
            f += att[k] * phi + alpha * at[k] * phi - beta * at[k] * dd - gamma * gamma * a[k] * dd;
        }
        return f;
    });
    const SemiDiscreteSystem sys = assemble(p);
    for (double t : {0.0, 0.3, 1.1, 2.5}) {
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(8, 1), ut = u, utt = u;
        for (int k = 0; k < 3; ++k) {
            u(idx[k], 0) = c(t)[k];
            ut(idx[k], 0) = ct(t)[k];
            utt(idx[k], 0) = ctt(t)[k];
        }
        const Eigen::MatrixXd r = utt - (sys.apply_a(u) + sys.apply_b(ut) + sys.load(t));
        EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-10) << "t=" << t;
    }
}

TEST(Residual, ManufacturedSolution2D) {
    const BasisSpec sx{5, 0.0, 1.0}, sy{6, 1.0, 1.2};
    const double alpha = 0.7, beta = 0.05, gamma = 1.3;
    // u* = sin t phi1(x) phi2(y) + t^2 phi0(x) phi3(y)
    DvweProblem p;
    p.dims = 2;
    p.basis = {sx, sy};
    p.alpha = Coefficient::constant(alpha);
    p.beta = Coefficient::constant(beta);
    p.gamma = Coefficient::constant(gamma);
    auto lap = [&](int i, int j, double x, double y) {
        return mapped_dd(sx, i, x) * mapped(sy, j, y) + mapped(sx, i, x) * mapped_dd(sy, j, y);
    };
    p.source = Source::general([&](double x, double y, double t) {
        const double a = std::sin(t), at = std::cos(t), att = -std::sin(t);
        const double b = t * t, bt = 2 * t, btt = 2.0;
        const double p12 = mapped(sx, 1, x) * mapped(sy, 2, y), p03 = mapped(sx, 0, x) * mapped(sy, 3, y);
        return (att + alpha * at) * p12 + (btt + alpha * bt) * p03 - (beta * at + gamma * gamma * a) * lap(1, 2, x, y) -
               (beta * bt + gamma * gamma * b) * lap(0, 3, x, y);
    });
    const SemiDiscreteSystem sys = assemble(p);
    for (double t : {0.2, 0.9, 1.7}) {
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(6, 7), ut = u, utt = u;
        u(1, 2) = std::sin(t);
        ut(1, 2) = std::cos(t);
        utt(1, 2) = -std::sin(t);
        u(0, 3) = t * t;
        ut(0, 3) = 2 * t;
        utt(0, 3) = 2.0;
        const Eigen::MatrixXd r = utt - (sys.apply_a(u) + sys.apply_b(ut) + sys.load(t));
        EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-10) << "t=" << t;
    }
}

TEST(InitialData, ProjectsBothFields) {
    const ScenarioConfig cfg = default_config("EX2_I");
    const DvweProblem p = find_scenario("EX2_I").build(cfg, 10);
    auto [u0, v0] = initial_coefficients(p);
    EXPECT_LE((u0 + v0).cwiseAbs().maxCoeff(), 1e-15); // w0 = -u0 for this case
    EXPECT_GT(u0(0, 0), 0.0);
}
