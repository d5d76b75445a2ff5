#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

namespace nrhc {

/// A per-agent vector field with the derivative information the costate
/// and sweep equations consume: the Jacobian F_x and the contraction
/// H(lambda, x) = d^2(lambda^T F)/dx^2. The contraction is all the sweep
/// needs and stays constant-sparse for the bilinear benchmark systems.
struct DynamicsModel {
  int state_dim = 0;
  std::string name;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> field;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  // (lambda, x) -> symmetric state_dim x state_dim matrix
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      costate_hessian;
  std::optional<double> lipschitz_bound;
};

/// Lorenz oscillator: (10(x2-x1), 28x1 - x1x3 - x2, x1x2 - 8/3 x3).
DynamicsModel lorenz();

/// Lu oscillator: (36(x2-x1), -x1x3 + 13x2, x1x2 - 3x3).
DynamicsModel lu_system();

/// Chen oscillator: (35(x2-x1), -7x1 - x1x3 + 28x2, x1x2 - 3x3).
DynamicsModel chen();

/// Lookup by scenario-file name: "lorenz" | "lu" | "chen".
DynamicsModel model_by_name(const std::string& name);

// Checked evaluation surface. Rejects dimension mismatches and
// non-finite inputs; the returned values are always analytic.
Eigen::VectorXd eval_field(const DynamicsModel& model, const Eigen::VectorXd& x);
Eigen::MatrixXd eval_jacobian(const DynamicsModel& model, const Eigen::VectorXd& x);
Eigen::MatrixXd eval_costate_hessian(const DynamicsModel& model,
                                     const Eigen::VectorXd& lambda,
                                     const Eigen::VectorXd& x);

}  // namespace nrhc
