#pragma once

#include <Eigen/Dense>
#include <utility>

#include "sbw/dynamics.hpp"
#include "sbw/errors.hpp"
#include "sbw/numerics.hpp"

namespace sbw::estimation {

using numerics::Matrix;
using numerics::Vector;

/// Process/measurement noise covariances. Defaults follow the published
/// tuning: large process uncertainty on the driver-torque state, which is
/// only partially captured by the first-order lag model.
struct NoiseConfig {
    Matrix q;  ///< process noise covariance (n x n)
    Matrix r;  ///< measurement noise covariance (m x m)

    void validate() const;
    static NoiseConfig defaults();
};

/// State estimate and error covariance of one filter instance.
struct FilterBelief {
    Vector x_hat;
    Matrix p;

    static FilterBelief initial(Eigen::Index n, double p0 = 1e-3);
};

/// Discretized linear model the filter propagates with.
struct KfModel {
    Matrix a_d;  ///< discrete transition
    Matrix b_d;  ///< discrete input
    Matrix c;    ///< measurement
    double dt = 0.0;
};

/// Zero-order-hold discretization: A_d = e^{A dt}, B_d = (integral of
/// e^{A tau} d tau) B, both read off the block exponential of [[A,B],[0,0]]*dt.
std::pair<Matrix, Matrix> discretize(const Matrix& a, const Matrix& b, double dt);

/// Discretized augmented hand-wheel model ready for kf_predict/kf_correct.
KfModel make_kf_model(const dynamics::AugmentedLinearModel& m, double dt);

/// Prediction: x^- = A_d x + B_d u, P^- = A_d P A_d' + Q (symmetrized).
FilterBelief kf_predict(const KfModel& model, const FilterBelief& belief, const Vector& u,
                        const NoiseConfig& noise);

struct CorrectionResult {
    FilterBelief belief;
    Vector innovation;
    Matrix gain;
};

/// Correction: K = P^- C'(C P^- C' + R)^-1, state + K*(z - C x^-),
/// P = (I - K C) P^- symmetrized. Throws FilterDegenerateError when the
/// innovation covariance is numerically singular.
CorrectionResult kf_correct(const KfModel& model, const FilterBelief& belief, const Vector& z,
                            const NoiseConfig& noise);

enum class JacobianMode { finite_difference, analytic };

/// One EKF disturbance-observer step on the augmented nonlinear model:
/// RK4 mean propagation, Jacobian linearization at the incoming estimate,
/// exact discretization of the Jacobian for the covariance, then the
/// standard linear correction (the measurement map is a selector).
CorrectionResult ekf_step(const dynamics::HwParams& p, const FilterBelief& belief,
                          const dynamics::Input& u, const Eigen::Vector2d& z, double dt,
                          const NoiseConfig& noise,
                          JacobianMode jacobian = JacobianMode::finite_difference);

/// Fixed point of the a-priori Riccati recursion and its gain.
struct SteadyState {
    Matrix k_inf;   ///< steady-state Kalman gain
    Matrix p_inf;   ///< steady-state a-priori covariance
    int iterations = 0;
    bool converged = false;  ///< false: divergence report, members hold the last iterate
};

/// Iterates P <- A_d (P - P C'(C P C' + R)^-1 C P) A_d' + Q from P0 = Q
/// until the Frobenius change drops below tol.
SteadyState steady_state(const KfModel& model, const NoiseConfig& noise, double tol = 1e-12,
                         int max_iter = 100000);

}  // namespace sbw::estimation
