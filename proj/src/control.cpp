#include "sbw/control.hpp"

namespace sbw::control {

void ImpedanceParams::validate() const {
    if (c_ref < 0.0 || d_ref < 0.0 || k_rej < 0.0)
        throw ParamError("ImpedanceParams: gains must be >= 0");
}

double motor_torque(const ImpedanceParams& p, const Eigen::Vector2d& z, double t_d_hp) {
    double t_m = -p.c_ref * z[0] - p.d_ref * z[1];
    if (p.rejection_enabled) t_m -= p.k_rej * t_d_hp;
    return t_m;
}

}  // namespace sbw::control
