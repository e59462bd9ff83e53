#pragma once

#include <Eigen/Dense>

#include "sbw/errors.hpp"

namespace sbw::control {

/// Static virtual impedance emulating a conventional steering feel, plus the
/// feedforward rejection path driven by the high-passed torque estimate.
struct ImpedanceParams {
    double c_ref = 2.0;  ///< virtual stiffness [Nm/rad]
    double d_ref = 0.5;  ///< virtual damping [Nm/(rad/s)]
    double k_rej = 1.0;  ///< rejection gain [-]
    bool rejection_enabled = false;

    void validate() const;
};

/// T_m = -c_ref*phi_m - d_ref*omega_m - k_rej*t_d_hp (rejection term only
/// when enabled).
double motor_torque(const ImpedanceParams& p, const Eigen::Vector2d& z, double t_d_hp);

}  // namespace sbw::control
