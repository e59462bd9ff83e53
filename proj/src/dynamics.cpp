#include "sbw/dynamics.hpp"

#include <cmath>

namespace sbw::dynamics {

namespace {

// sign with s(0) = 0, keeping the origin an equilibrium
double sgn(double v) { return static_cast<double>(v > 0.0) - static_cast<double>(v < 0.0); }

double stribeck_derivative(const StribeckParams& p, double omega) {
    if (omega == 0.0) return p.d_v;
    const double r = std::abs(omega / p.omega_c);
    const double e = std::exp(-std::pow(r, p.delta));
    return p.d_v - (p.d_s - p.d_k) * (p.delta / p.omega_c) * std::pow(r, p.delta - 1.0) * e;
}

double gear_spring_slope(const GearNonlinParams& p, double dphi) {
    return p.c_g1 + p.c_g2 * p.alpha * std::pow(std::abs(dphi), p.alpha - 1.0);
}

double gear_damping_slope(const GearNonlinParams& p, double domega) {
    return p.d_g1 + p.d_g2 * p.beta * std::pow(std::abs(domega), p.beta - 1.0);
}

}  // namespace

void HwLinearParams::validate() const {
    if (!(j_sw > 0.0)) throw ParamError("HwLinearParams: J_sw must be > 0");
    if (!(j_m > 0.0)) throw ParamError("HwLinearParams: J_m must be > 0");
    if (d_sw < 0.0 || d_m < 0.0 || c_g < 0.0 || d_g < 0.0)
        throw ParamError("HwLinearParams: damping/stiffness coefficients must be >= 0");
}

void StribeckParams::validate() const {
    if (!(d_s >= d_k && d_k >= 0.0))
        throw ParamError("StribeckParams: need d_s >= d_k >= 0");
    if (!(omega_c > 0.0)) throw ParamError("StribeckParams: omega_c must be > 0");
    if (!(delta > 0.0)) throw ParamError("StribeckParams: delta must be > 0");
    if (d_v < 0.0) throw ParamError("StribeckParams: d_v must be >= 0");
}

void GearNonlinParams::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw ParamError("GearNonlinParams: exponents must be > 0");
    if (c_g1 < 0.0 || d_g1 < 0.0)
        throw ParamError("GearNonlinParams: linear coefficients must be >= 0");
}

void Pt1Params::validate() const {
    if (!(time_constant > 0.0)) throw ParamError("Pt1Params: time constant must be > 0");
}

void HwParams::validate() const {
    linear.validate();
    stribeck_sw.validate();
    stribeck_m.validate();
    gear.validate();
    pt1.validate();
}

LinearModel linear_matrices(const HwLinearParams& p) {
    p.validate();
    LinearModel m;
    m.a << 0.0, 1.0, 0.0, 0.0,
        -p.c_g / p.j_sw, (-p.d_g - p.d_sw) / p.j_sw, p.c_g / p.j_sw, p.d_g / p.j_sw,
        0.0, 0.0, 0.0, 1.0,
        p.c_g / p.j_m, p.d_g / p.j_m, -p.c_g / p.j_m, (-p.d_g - p.d_m) / p.j_m;
    m.b << 0.0, 0.0,
        1.0 / p.j_sw, 0.0,
        0.0, 0.0,
        0.0, 1.0 / p.j_m;
    m.c << 0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0;
    return m;
}

AugmentedLinearModel augmented_linear_matrices(const HwParams& p) {
    p.validate();
    const LinearModel lin = linear_matrices(p.linear);
    AugmentedLinearModel m;
    m.a.setZero();
    m.a.topLeftCorner<4, 4>() = lin.a;
    m.a(1, 4) = 1.0 / p.linear.j_sw;
    m.a(4, 4) = -1.0 / p.pt1.time_constant;
    m.b.setZero();
    m.b(3, 1) = 1.0 / p.linear.j_m;
    m.b(4, 0) = p.pt1.gain / p.pt1.time_constant;
    m.c.setZero();
    m.c(0, 2) = 1.0;
    m.c(1, 3) = 1.0;
    return m;
}

double stribeck_torque(const StribeckParams& p, double omega) {
    const double transition =
        p.d_k + (p.d_s - p.d_k) * std::exp(-std::pow(std::abs(omega / p.omega_c), p.delta));
    return sgn(omega) * transition + p.d_v * omega;
}

GearTorques gear_torques(const GearNonlinParams& p, const HwState& x) {
    const double dphi = x[2] - x[0];
    const double domega = x[3] - x[1];
    GearTorques t;
    t.spring = p.c_g1 * dphi + p.c_g2 * std::pow(std::abs(dphi), p.alpha) * sgn(dphi);
    t.damping = p.d_g1 * domega + p.d_g2 * std::pow(std::abs(domega), p.beta) * sgn(domega);
    return t;
}

HwState nonlinear_dynamics(const HwParams& p, const HwState& x, const Input& u) {
    const GearTorques g = gear_torques(p.gear, x);
    const double t_sw = stribeck_torque(p.stribeck_sw, x[1]);
    const double t_m = stribeck_torque(p.stribeck_m, x[3]);
    HwState dx;
    dx[0] = x[1];
    dx[1] = (g.spring + g.damping - t_sw + u[0]) / p.linear.j_sw;
    dx[2] = x[3];
    dx[3] = (-g.spring - g.damping - t_m + u[1]) / p.linear.j_m;
    return dx;
}

AugState augmented_nonlinear_dynamics(const HwParams& p, const AugState& x, const Input& u) {
    const HwState mech = x.head<4>();
    const GearTorques g = gear_torques(p.gear, mech);
    const double t_sw = stribeck_torque(p.stribeck_sw, x[1]);
    const double t_m = stribeck_torque(p.stribeck_m, x[3]);
    AugState dx;
    dx[0] = x[1];
    dx[1] = (g.spring + g.damping - t_sw + x[4]) / p.linear.j_sw;
    dx[2] = x[3];
    dx[3] = (-g.spring - g.damping - t_m + u[1]) / p.linear.j_m;
    dx[4] = -x[4] / p.pt1.time_constant + p.pt1.gain / p.pt1.time_constant * u[0];
    return dx;
}

Eigen::Matrix<double, 5, 5> augmented_nonlinear_jacobian(const HwParams& p, const AugState& x) {
    const double gc = gear_spring_slope(p.gear, x[2] - x[0]);
    const double gd = gear_damping_slope(p.gear, x[3] - x[1]);
    const double fsw = stribeck_derivative(p.stribeck_sw, x[1]);
    const double fm = stribeck_derivative(p.stribeck_m, x[3]);
    const double j_sw = p.linear.j_sw;
    const double j_m = p.linear.j_m;

    Eigen::Matrix<double, 5, 5> jac;
    jac.setZero();
    jac(0, 1) = 1.0;
    jac(1, 0) = -gc / j_sw;
    jac(1, 1) = (-gd - fsw) / j_sw;
    jac(1, 2) = gc / j_sw;
    jac(1, 3) = gd / j_sw;
    jac(1, 4) = 1.0 / j_sw;
    jac(2, 3) = 1.0;
    jac(3, 0) = gc / j_m;
    jac(3, 1) = gd / j_m;
    jac(3, 2) = -gc / j_m;
    jac(3, 3) = (-gd - fm) / j_m;
    jac(4, 4) = -1.0 / p.pt1.time_constant;
    return jac;
}

Eigen::Vector2d measure(const HwState& x) { return {x[2], x[3]}; }

Eigen::Vector2d measure(const AugState& x) { return {x[2], x[3]}; }

}  // namespace sbw::dynamics
