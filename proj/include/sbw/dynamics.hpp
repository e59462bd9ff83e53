#pragma once

#include <Eigen/Dense>

#include "sbw/errors.hpp"

namespace sbw::dynamics {

using HwState = Eigen::Vector4d;               ///< [phi_sw, omega_sw, phi_m, omega_m]
using AugState = Eigen::Matrix<double, 5, 1>;  ///< HwState plus x5 = T_d [Nm]
using Input = Eigen::Vector2d;                 ///< [T_d, T_m] driver and motor torque [Nm]

/// Linear two-mass spring-damper parameters of the hand-wheel module,
/// referenced to the steering-wheel coordinate frame.
struct HwLinearParams {
    double j_sw = 0.04;     ///< steering-wheel inertia [kg m^2]
    double j_m = 0.002;     ///< motor inertia [kg m^2]
    double d_sw = 0.225;    ///< steering-wheel friction coefficient [Nm/(rad/s)]
    double d_m = 0.0034;    ///< motor friction coefficient [Nm/(rad/s)]
    double c_g = 76.9731;   ///< gear spring coefficient [Nm/rad]
    double d_g = 1e-5;      ///< gear damping coefficient [Nm/(rad/s)]

    void validate() const;
};

/// Stribeck friction curve: static/kinetic transition plus viscous term.
struct StribeckParams {
    double d_v = 0.0;      ///< viscous coefficient [Nm/(rad/s)]
    double d_s = 0.0;      ///< static friction torque [Nm]
    double d_k = 0.0;      ///< kinetic friction torque [Nm]
    double omega_c = 0.85; ///< characteristic angular velocity [rad/s]
    double delta = 2.0;    ///< shape exponent [-]

    void validate() const;
};

/// Nonlinear gear stiffness/damping; the linear coefficients c_g1/d_g1 carry
/// the gear's Table-1 values, the power-law terms default to zero.
struct GearNonlinParams {
    double c_g1 = 76.9731;
    double c_g2 = 0.0;
    double alpha = 1.0;
    double d_g1 = 1e-5;
    double d_g2 = 0.0;
    double beta = 1.0;

    void validate() const;
};

/// First-order lag bridging the driver torque into the filter state.
struct Pt1Params {
    double time_constant = 0.08;  ///< T [s]
    double gain = 1.0;            ///< K [-]

    void validate() const;
};

/// Full parameter set of the hand-wheel module; defaults are the published
/// simulation values.
struct HwParams {
    HwLinearParams linear;
    StribeckParams stribeck_sw{0.0084, 0.735, 0.4620, 0.85, 2.0};
    StribeckParams stribeck_m{0.0036, 0.3150, 0.1980, 0.85, 2.0};
    GearNonlinParams gear;
    Pt1Params pt1;

    void validate() const;
    static HwParams defaults() { return HwParams{}; }
};

struct LinearModel {
    Eigen::Matrix4d a;
    Eigen::Matrix<double, 4, 2> b;
    Eigen::Matrix<double, 2, 4> c;
};

struct AugmentedLinearModel {
    Eigen::Matrix<double, 5, 5> a;
    Eigen::Matrix<double, 5, 2> b;
    Eigen::Matrix<double, 2, 5> c;
};

/// Continuous-time state-space matrices of the two-mass model; the output
/// selects the measurable motor angle and angular velocity.
LinearModel linear_matrices(const HwLinearParams& p);

/// Five-state extension where the driver torque becomes state x5 driven
/// through the first-order lag; u1 now feeds x5 only.
AugmentedLinearModel augmented_linear_matrices(const HwParams& p);

/// Friction torque s(w)*(d_k + (d_s - d_k)*exp(-|w/w_c|^delta)) + d_v*w,
/// with s the sign function and s(0) = 0 so the origin stays an equilibrium.
double stribeck_torque(const StribeckParams& p, double omega);

struct GearTorques {
    double spring;   ///< T_g^c [Nm]
    double damping;  ///< T_g^d [Nm]
};

/// Gear spring/damper torques from the angle and velocity differences
/// (x3 - x1) and (x4 - x2), linear plus power-law terms.
GearTorques gear_torques(const GearNonlinParams& p, const HwState& x);

/// Nonlinear state derivative of the two-mass model (Stribeck friction and
/// nonlinear gear terms), driver torque applied directly through u1.
HwState nonlinear_dynamics(const HwParams& p, const HwState& x, const Input& u);

/// Nonlinear derivative of the augmented model: x5 replaces u1 on the wheel
/// and follows the first-order lag driven by u1.
AugState augmented_nonlinear_dynamics(const HwParams& p, const AugState& x, const Input& u);

/// Analytic Jacobian of augmented_nonlinear_dynamics with d(sign)/domega
/// taken as 0; agrees with finite differences away from omega = 0.
Eigen::Matrix<double, 5, 5> augmented_nonlinear_jacobian(const HwParams& p, const AugState& x);

/// Measurement map: the motor angle and angular velocity (x3, x4).
Eigen::Vector2d measure(const HwState& x);
Eigen::Vector2d measure(const AugState& x);

}  // namespace sbw::dynamics
