#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "sbw/dynamics.hpp"
#include "sbw/numerics.hpp"

using sbw::numerics::expm;
using sbw::numerics::jacobian_fd;
using sbw::numerics::Matrix;
using sbw::numerics::observability;
using sbw::numerics::rk4_step;
using sbw::numerics::Vector;

namespace {

// Brute-force oracle: raw 60-term Taylor series, valid for small ||M||.
Matrix taylor_expm(const Matrix& m, int terms = 60) {
    Matrix sum = Matrix::Identity(m.rows(), m.cols());
    Matrix term = sum;
    for (int k = 1; k <= terms; ++k) {
        term = term * m / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

Matrix random_matrix(std::mt19937& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
    return m;
}

}  // namespace

TEST(Expm, ZeroMatrixGivesIdentity) {
    const Matrix e = expm(Matrix::Zero(4, 4));
    EXPECT_LT((e - Matrix::Identity(4, 4)).norm(), 1e-15);
}

TEST(Expm, DiagonalCase) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -0.5;
    const Matrix e = expm(m);
    EXPECT_NEAR(e(0, 0), 2.718281828459045, 1e-12);
    EXPECT_NEAR(e(1, 1), std::exp(-0.5), 1e-12);
    EXPECT_NEAR(e(0, 1), 0.0, 1e-15);
    EXPECT_NEAR(e(1, 0), 0.0, 1e-15);
}

TEST(Expm, MatchesTaylorOracleOnRandom5x5) {
    std::mt19937 rng(42);
    for (int rep = 0; rep < 50; ++rep) {
        const Matrix m = random_matrix(rng, 5);
        const Matrix ref = taylor_expm(m);
        const double rel = (expm(m) - ref).norm() / ref.norm();
        EXPECT_LT(rel, 1e-10) << "rep " << rep;
    }
}

TEST(Expm, NonSquareThrows) {
    EXPECT_THROW(expm(Matrix::Zero(2, 3)), sbw::DimensionError);
}

TEST(Expm, InverseProperty) {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix m = random_matrix(rng, 4);
        m *= 5.0 / std::max(1.0, m.norm());
        const Matrix prod = expm(m) * expm(-m);
        EXPECT_LT((prod - Matrix::Identity(4, 4)).norm(), 1e-8) << "rep " << rep;
    }
}

TEST(Expm, AdditivityInScalarMultiples) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix m = random_matrix(rng, 3);
        const double s = dist(rng);
        const double t = dist(rng);
        const Matrix lhs = expm((s + t) * m);
        const Matrix rhs = expm(s * m) * expm(t * m);
        EXPECT_LT((lhs - rhs).norm(), 1e-8) << "rep " << rep;
    }
}

TEST(Rk4, ScalarExponentialDecay) {
    using Scalar = Eigen::Matrix<double, 1, 1>;
    auto f = [](const Scalar& x, const Scalar&) -> Scalar { return -x; };
    const Scalar x0 = Scalar::Constant(1.0);
    const Scalar x1 = rk4_step(f, x0, Scalar::Zero(), 0.001);
    EXPECT_NEAR(x1(0), std::exp(-0.001), 1e-12);
    EXPECT_NEAR(x1(0), 0.9990004998333751, 1e-12);
}

TEST(Rk4, ConstantDerivativeExact) {
    using Scalar = Eigen::Matrix<double, 1, 1>;
    const double c = 3.7;
    auto f = [&](const Scalar&, const Scalar&) -> Scalar { return Scalar::Constant(c); };
    const Scalar x1 = rk4_step(f, Scalar::Constant(2.0), Scalar::Zero(), 0.01);
    EXPECT_NEAR(x1(0), 2.0 + c * 0.01, 1e-15);
}

TEST(Rk4, MatchesExpmOnTableScaleLinearSystem) {
    const auto lin = sbw::dynamics::linear_matrices(sbw::dynamics::HwLinearParams{});
    const Matrix a = lin.a;
    const double dt = 0.001;
    auto f = [&](const Vector& x, const Vector&) -> Vector { return a * x; };

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const Matrix a_d = expm(a * dt);
    for (int rep = 0; rep < 10; ++rep) {
        Vector x(4);
        for (int i = 0; i < 4; ++i) x[i] = dist(rng);
        const Vector exact = a_d * x;
        const Vector approx = rk4_step(f, x, Vector::Zero(1), dt);
        EXPECT_LT((approx - exact).norm() / exact.norm(), 1e-4);
    }
}

TEST(Rk4, ObservedConvergenceOrderIsFive) {
    using Scalar = Eigen::Matrix<double, 1, 1>;
    auto f = [](const Scalar& x, const Scalar&) -> Scalar { return -x; };

    std::vector<double> log_dt, log_err;
    for (double dt : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
        const Scalar x1 = rk4_step(f, Scalar::Constant(1.0), Scalar::Zero(), dt);
        const double err = std::abs(x1(0) - std::exp(-dt));
        log_dt.push_back(std::log(dt));
        log_err.push_back(std::log(err));
    }
    // least-squares slope of log err vs log dt
    const auto n = static_cast<double>(log_dt.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_dt.size(); ++i) {
        sx += log_dt[i];
        sy += log_err[i];
        sxx += log_dt[i] * log_dt[i];
        sxy += log_dt[i] * log_err[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope, 5.0, 0.3);
}

TEST(JacobianFd, ExactForLinearMaps) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    Matrix a(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = dist(rng);
    auto f = [&](const Vector& x) -> Vector { return a * x; };
    Vector x(3);
    x << 0.3, -1.2, 2.0;
    EXPECT_LT((jacobian_fd(f, x) - a).norm(), 1e-6);
}

TEST(JacobianFd, ScalarSquare) {
    auto f = [](const Vector& x) -> Vector {
        Vector y(1);
        y[0] = x[0] * x[0];
        return y;
    };
    Vector x(1);
    x << 3.0;
    EXPECT_NEAR(jacobian_fd(f, x)(0, 0), 6.0, 1e-6);
}

TEST(JacobianFd, MatchesAnalyticAugmentedJacobianAwayFromZeroVelocity) {
    const auto p = sbw::dynamics::HwParams::defaults();
    sbw::dynamics::AugState x;
    x << 0.2, 1.5, -0.1, 2.4, 0.8;  // both velocities well away from the friction kink
    const sbw::dynamics::Input u(0.5, -0.2);

    auto f = [&](const Vector& v) -> Vector {
        return sbw::dynamics::augmented_nonlinear_dynamics(p, sbw::dynamics::AugState(v.head<5>()), u);
    };
    const Matrix fd = jacobian_fd(f, Vector(x));
    const Matrix analytic = sbw::dynamics::augmented_nonlinear_jacobian(p, x);
    EXPECT_LT((fd - analytic).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Observability, IdentitySystem) {
    const auto rep = observability(Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    EXPECT_EQ(rep.rank, 2);
    EXPECT_NEAR(rep.condition_2norm, 1.0, 1e-12);
}

TEST(Observability, DoubleIntegratorFromPosition) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;
    Matrix c = Matrix::Zero(1, 2);
    c(0, 0) = 1.0;
    const auto rep = observability(a, c);
    EXPECT_EQ(rep.rank, 2);
}

TEST(Observability, AugmentedTableSystemHasFullRank) {
    const auto aug = sbw::dynamics::augmented_linear_matrices(sbw::dynamics::HwParams::defaults());
    const auto rep = observability(Matrix(aug.a), Matrix(aug.c));
    EXPECT_EQ(rep.rank, 5);
    EXPECT_GT(rep.condition_2norm, 1.0);
    EXPECT_TRUE(std::isfinite(rep.condition_2norm));
}

TEST(Observability, DecoupledGearLosesRank) {
    auto p = sbw::dynamics::HwParams::defaults();
    p.linear.c_g = 0.0;
    p.linear.d_g = 0.0;
    const auto aug = sbw::dynamics::augmented_linear_matrices(p);
    const auto rep = observability(Matrix(aug.a), Matrix(aug.c));
    EXPECT_LT(rep.rank, 5);
}

TEST(Observability, RankInvariantUnderDiagonalRescaling) {
    const auto aug = sbw::dynamics::augmented_linear_matrices(sbw::dynamics::HwParams::defaults());
    const Matrix a(aug.a);
    const Matrix c(aug.c);
    const auto base = observability(a, c);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(0.1, 10.0);
    for (int rep = 0; rep < 5; ++rep) {
        Vector d(5);
        for (int i = 0; i < 5; ++i) d[i] = dist(rng);
        const Matrix dm = d.asDiagonal();
        const Matrix dinv = d.cwiseInverse().asDiagonal();
        const auto scaled = observability(dm * a * dinv, c * dinv);
        EXPECT_EQ(scaled.rank, base.rank);
    }
}

TEST(Observability, DimensionMismatchThrows) {
    EXPECT_THROW(observability(Matrix::Zero(3, 3), Matrix::Zero(1, 2)), sbw::DimensionError);
    EXPECT_THROW(observability(Matrix::Zero(3, 2), Matrix::Zero(1, 2)), sbw::DimensionError);
}
