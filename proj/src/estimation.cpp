#include "sbw/estimation.hpp"

#include <cmath>

namespace sbw::estimation {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void NoiseConfig::validate() const {
    if (q.rows() != q.cols() || r.rows() != r.cols())
        throw DimensionError("NoiseConfig: Q and R must be square");
    if (!q.isApprox(q.transpose(), 1e-12) || !r.isApprox(r.transpose(), 1e-12))
        throw ParamError("NoiseConfig: Q and R must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> qe(q);
    if (qe.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, qe.eigenvalues().maxCoeff()))
        throw ParamError("NoiseConfig: Q must be positive semidefinite");
    Eigen::SelfAdjointEigenSolver<Matrix> re(r);
    if (!(re.eigenvalues().minCoeff() > 0.0))
        throw ParamError("NoiseConfig: R must be positive definite");
}

NoiseConfig NoiseConfig::defaults() {
    NoiseConfig n;
    Vector qd(5);
    qd << 1.0, 1.0, 1.0, 1.0, 1e6;
    n.q = 1e-7 * qd.asDiagonal().toDenseMatrix();
    n.r = 1e-6 * Matrix::Identity(2, 2);
    return n;
}

FilterBelief FilterBelief::initial(Eigen::Index n, double p0) {
    return FilterBelief{Vector::Zero(n), p0 * Matrix::Identity(n, n)};
}

std::pair<Matrix, Matrix> discretize(const Matrix& a, const Matrix& b, double dt) {
    if (a.rows() != a.cols()) throw DimensionError("discretize: A must be square");
    if (b.rows() != a.rows()) throw DimensionError("discretize: B rows must match A");
    if (!(dt > 0.0)) throw ParamError("discretize: dt must be > 0");

    const Eigen::Index n = a.rows();
    const Eigen::Index m = b.cols();
    Matrix block = Matrix::Zero(n + m, n + m);
    block.topLeftCorner(n, n) = a * dt;
    block.topRightCorner(n, m) = b * dt;
    const Matrix e = numerics::expm(block);
    return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

KfModel make_kf_model(const dynamics::AugmentedLinearModel& m, double dt) {
    auto [a_d, b_d] = discretize(m.a, m.b, dt);
    return KfModel{std::move(a_d), std::move(b_d), m.c, dt};
}

FilterBelief kf_predict(const KfModel& model, const FilterBelief& belief, const Vector& u,
                        const NoiseConfig& noise) {
    FilterBelief out;
    out.x_hat = model.a_d * belief.x_hat + model.b_d * u;
    out.p = symmetrized(model.a_d * belief.p * model.a_d.transpose() + noise.q);
    return out;
}

CorrectionResult kf_correct(const KfModel& model, const FilterBelief& belief, const Vector& z,
                            const NoiseConfig& noise) {
    const Matrix& c = model.c;
    const Matrix s = c * belief.p * c.transpose() + noise.r;

    Eigen::FullPivLU<Matrix> lu(s);
    if (!lu.isInvertible())
        throw FilterDegenerateError("kf_correct: innovation covariance numerically singular");

    CorrectionResult res;
    res.gain = belief.p * c.transpose() * lu.inverse();
    res.innovation = z - c * belief.x_hat;
    res.belief.x_hat = belief.x_hat + res.gain * res.innovation;
    const Matrix ident = Matrix::Identity(belief.p.rows(), belief.p.cols());
    res.belief.p = symmetrized((ident - res.gain * c) * belief.p);
    return res;
}

CorrectionResult ekf_step(const dynamics::HwParams& p, const FilterBelief& belief,
                          const dynamics::Input& u, const Eigen::Vector2d& z, double dt,
                          const NoiseConfig& noise, JacobianMode jacobian) {
    using dynamics::AugState;

    const AugState x0 = belief.x_hat.head<5>();

    Matrix a_t;
    if (jacobian == JacobianMode::analytic) {
        a_t = dynamics::augmented_nonlinear_jacobian(p, x0);
    } else {
        a_t = numerics::jacobian_fd(
            [&](const Vector& x) -> Vector {
                return dynamics::augmented_nonlinear_dynamics(p, AugState(x.head<5>()), u);
            },
            belief.x_hat);
    }

    const AugState x_pred = numerics::rk4_step(
        [&p](const AugState& x, const dynamics::Input& uu) {
            return dynamics::augmented_nonlinear_dynamics(p, x, uu);
        },
        x0, u, dt);

    const Matrix a_d = numerics::expm(a_t * dt);

    KfModel model;
    model.a_d = a_d;
    model.c = Matrix::Zero(2, 5);
    model.c(0, 2) = 1.0;
    model.c(1, 3) = 1.0;
    model.dt = dt;

    FilterBelief prior;
    prior.x_hat = x_pred;
    prior.p = symmetrized(a_d * belief.p * a_d.transpose() + noise.q);
    return kf_correct(model, prior, z, noise);
}

SteadyState steady_state(const KfModel& model, const NoiseConfig& noise, double tol,
                         int max_iter) {
    const Matrix& a = model.a_d;
    const Matrix& c = model.c;

    SteadyState out;
    Matrix p = noise.q;
    for (int k = 0; k < max_iter; ++k) {
        const Matrix s = c * p * c.transpose() + noise.r;
        const Matrix gain = p * c.transpose() * s.inverse();
        const Matrix p_post = p - gain * c * p;
        const Matrix p_next = symmetrized(a * p_post * a.transpose() + noise.q);
        const double change = (p_next - p).norm();
        p = p_next;
        out.iterations = k + 1;
        if (change < tol) {
            out.converged = true;
            break;
        }
    }
    const Matrix s = c * p * c.transpose() + noise.r;
    out.k_inf = p * c.transpose() * s.inverse();
    out.p_inf = p;
    return out;
}

}  // namespace sbw::estimation
