#include "nrhc/dynamics.hpp"

#include <stdexcept>

namespace nrhc {

namespace {

void require_state(const DynamicsModel& model, const Eigen::VectorXd& v,
                   const char* what) {
  if (v.size() != model.state_dim) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

// All three benchmark systems share the bilinear structure
//   F2 contains -x1*x3 (plus linear terms), F3 contains +x1*x2,
// so the costate-contracted Hessian is
//   lambda2 * d2(-x1x3)/dx2 + lambda3 * d2(x1x2)/dx2.
Eigen::MatrixXd bilinear_costate_hessian(const Eigen::VectorXd& lambda) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, 3);
  h(0, 2) = -lambda(1);
  h(2, 0) = -lambda(1);
  h(0, 1) += lambda(2);
  h(1, 0) += lambda(2);
  return h;
}

}  // namespace

DynamicsModel lorenz() {
  DynamicsModel m;
  m.state_dim = 3;
  m.name = "lorenz";
  m.field = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd f(3);
    f(0) = 10.0 * (x(1) - x(0));
    f(1) = 28.0 * x(0) - x(0) * x(2) - x(1);
    f(2) = x(0) * x(1) - (8.0 / 3.0) * x(2);
    return f;
  };
  m.jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(3, 3);
    j << -10.0, 10.0, 0.0,
         28.0 - x(2), -1.0, -x(0),
         x(1), x(0), -8.0 / 3.0;
    return j;
  };
  m.costate_hessian = [](const Eigen::VectorXd& lambda, const Eigen::VectorXd&) {
    return bilinear_costate_hessian(lambda);
  };
  return m;
}

DynamicsModel lu_system() {
  DynamicsModel m;
  m.state_dim = 3;
  m.name = "lu";
  m.field = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd f(3);
    f(0) = 36.0 * (x(1) - x(0));
    f(1) = -x(0) * x(2) + 13.0 * x(1);
    f(2) = x(0) * x(1) - 3.0 * x(2);
    return f;
  };
  m.jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(3, 3);
    j << -36.0, 36.0, 0.0,
         -x(2), 13.0, -x(0),
         x(1), x(0), -3.0;
    return j;
  };
  m.costate_hessian = [](const Eigen::VectorXd& lambda, const Eigen::VectorXd&) {
    return bilinear_costate_hessian(lambda);
  };
  return m;
}

DynamicsModel chen() {
  DynamicsModel m;
  m.state_dim = 3;
  m.name = "chen";
  m.field = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd f(3);
    f(0) = 35.0 * (x(1) - x(0));
    f(1) = -7.0 * x(0) - x(0) * x(2) + 28.0 * x(1);
    f(2) = x(0) * x(1) - 3.0 * x(2);
    return f;
  };
  m.jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(3, 3);
    j << -35.0, 35.0, 0.0,
         -7.0 - x(2), 28.0, -x(0),
         x(1), x(0), -3.0;
    return j;
  };
  m.costate_hessian = [](const Eigen::VectorXd& lambda, const Eigen::VectorXd&) {
    return bilinear_costate_hessian(lambda);
  };
  return m;
}

DynamicsModel model_by_name(const std::string& name) {
  if (name == "lorenz") return lorenz();
  if (name == "lu") return lu_system();
  if (name == "chen") return chen();
  throw std::invalid_argument("unknown model: " + name);
}

Eigen::VectorXd eval_field(const DynamicsModel& model, const Eigen::VectorXd& x) {
  require_state(model, x, "eval_field");
  return model.field(x);
}

Eigen::MatrixXd eval_jacobian(const DynamicsModel& model, const Eigen::VectorXd& x) {
  require_state(model, x, "eval_jacobian");
  return model.jacobian(x);
}

Eigen::MatrixXd eval_costate_hessian(const DynamicsModel& model,
                                     const Eigen::VectorXd& lambda,
                                     const Eigen::VectorXd& x) {
  require_state(model, x, "eval_costate_hessian");
  require_state(model, lambda, "eval_costate_hessian");
  return model.costate_hessian(lambda, x);
}

}  // namespace nrhc
