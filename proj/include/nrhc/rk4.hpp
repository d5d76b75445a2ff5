#pragma once

#include <Eigen/Dense>

namespace nrhc {

/// One classical Runge-Kutta 4 step for an autonomous ODE y' = rhs(y).
/// Every fixed-step integration in the project funnels through this
/// function so that decoupled subsystems reproduce bit-for-bit.
template <class Rhs>
Eigen::VectorXd rk4_step(const Rhs& rhs, const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = rhs(y);
  const Eigen::VectorXd k2 = rhs(y + (0.5 * h) * k1);
  const Eigen::VectorXd k3 = rhs(y + (0.5 * h) * k2);
  const Eigen::VectorXd k4 = rhs(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace nrhc
