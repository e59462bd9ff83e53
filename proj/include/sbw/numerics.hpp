#pragma once

#include <Eigen/Dense>
#include <type_traits>
#include <vector>

#include "sbw/errors.hpp"

namespace sbw::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix exponential e^M by scaling-and-squaring with a Pade(13) core.
/// Relative accuracy on well-conditioned inputs is ~1e-13; throws
/// DimensionError for non-square input.
Matrix expm(const Matrix& m);

/// One classical 4th-order Runge-Kutta step of x' = f(x, u) with the input
/// held constant over the step (zero-order hold). Accepts any Eigen vector
/// (expressions are materialized to the derivative's plain type).
template <typename F, typename State, typename Input>
auto rk4_step(F&& f, const State& x, const Input& u, double dt) {
    if (dt <= 0.0) throw ParamError("rk4_step: dt must be > 0");
    using Plain = std::decay_t<decltype(f(x, u))>;
    const Plain k1 = f(x, u);
    const Plain x2 = x + (0.5 * dt) * k1;
    const Plain k2 = f(x2, u);
    const Plain x3 = x + (0.5 * dt) * k2;
    const Plain k3 = f(x3, u);
    const Plain x4 = x + dt * k3;
    const Plain k4 = f(x4, u);
    return Plain(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Central-difference Jacobian of f at x, column i = (f(x+h_i e_i) - f(x-h_i e_i)) / 2h_i.
/// Per-component step h_i = h_scale * max(1, |x_i|); default h_scale = 1e-6.
template <typename F>
Matrix jacobian_fd(F&& f, const Vector& x, double h_scale = 1e-6) {
    if (h_scale <= 0.0) throw ParamError("jacobian_fd: step must be > 0");
    const Vector f0 = f(x);
    Matrix jac(f0.size(), x.size());
    Vector xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = h_scale * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return jac;
}

/// Rank and conditioning of the observability matrix [C; CA; ...; CA^(n-1)].
struct ObservabilityReport {
    Eigen::Index rank = 0;
    double condition_2norm = 0.0;          ///< sigma_max / sigma_min; +inf if rank-deficient
    std::vector<double> singular_values;   ///< descending
    bool full_rank(Eigen::Index n) const { return rank == n; }
};

/// Numerical rank uses the tolerance sigma > sigma_max * max(rows, cols) * eps.
ObservabilityReport observability(const Matrix& a, const Matrix& c);

}  // namespace sbw::numerics
