#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "nrhc/costs.hpp"
#include "nrhc/dynamics.hpp"
#include "nrhc/tpbvp.hpp"

namespace nrhc {

/// Backward-sweep trajectories S(tau) and c(tau) on the horizon grid.
/// S is symmetrized after every step; the Riccati flow preserves
/// symmetry analytically and the symmetrization suppresses drift.
struct SweepGrid {
  std::vector<Eigen::MatrixXd> S;
  std::vector<Eigen::VectorXd> c;
};

/// Hurwitz test for the continuation gain A_s: true iff every eigenvalue
/// of m has negative real part. Scenario load rejects unstable gains.
bool is_hurwitz(const Eigen::MatrixXd& m);

/// Coefficients of the linear variational system along the horizon:
///   A = F_x(x),  B = R^{-1},  C = H_xx = (sum_j a_ij) Q + (lambda^T F)_xx.
/// (f_u is the identity and H_ux vanishes for this problem class.)
struct VariationalCoefficients {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
};

VariationalCoefficients variational_matrices(const DynamicsModel& model,
                                             const CostSpec& spec,
                                             const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& lambda,
                                             const FrozenNeighbors& frozen);

/// Coefficient source along a stored forward grid. Midpoint states are
/// cubic-Hermite interpolants built from the grid nodes and the horizon
/// ODE right-hand sides, which keeps the backward RK4 pass at full order.
class GridCoefficients {
 public:
  GridCoefficients(const HorizonGrid& grid, const DynamicsModel& model,
                   const CostSpec& spec);

  VariationalCoefficients node(int k) const;
  VariationalCoefficients midpoint(int k) const;  // between nodes k and k+1

  std::pair<Eigen::VectorXd, Eigen::VectorXd> state_at_midpoint(int k) const;

 private:
  const HorizonGrid& grid_;
  const DynamicsModel& model_;
  const CostSpec& spec_;
  std::vector<Eigen::VectorXd> dx_;   // dx/dtau at nodes
  std::vector<Eigen::VectorXd> dl_;   // dlambda/dtau at nodes
};

struct SweepTerminal {
  Eigen::MatrixXd S;
  Eigen::VectorXd c;
};

/// Terminal conditions of the backward sweep:
///   S(T,t) = phi_xx|_{tau=T},
///   c(T,t) = (H_x + phi_xx (F + u) - phi-target drift)|_{tau=T} (1 + dT/dt)
///            + A_s P.
/// The drift term is d/dt of the terminal-cost targets: the predicted
/// neighbor (and leader) terminal states slide along their own flow as t
/// advances, at rate F(x_j(T)) per unit of (1 + dT/dt)-scaled time, and
/// the continuation has to account for that motion or it reads it as a
/// residual and fights it. A leader held frozen drifts at F(x_0(t))
/// without the horizon-growth factor. Terminal quantities are evaluated
/// on the grid's last node.
SweepTerminal sweep_terminal_conditions(const DynamicsModel& model,
                                        const CostSpec& spec,
                                        const HorizonGrid& grid, double dT_dt,
                                        const Eigen::VectorXd& residual_P,
                                        const Eigen::MatrixXd& A_s);

/// Integrates the Riccati and affine sweep ODEs
///   dS/dtau = -A^T S - S A + S B S - C,
///   dc/dtau = -(A^T - S B) c,
/// backward from tau = T to tau = 0 with RK4 on the forward grid.
SweepGrid integrate_sweep_backward(const DynamicsModel& model, const CostSpec& spec,
                                   const HorizonGrid& grid,
                                   const SweepTerminal& terminal);

/// Advances the real-time costate by one step of
///   dLambda/dt = -H_x|_{tau=0} + c(0,t),
/// with RK4 over [t, t+dt]. The agent state, the frozen neighbor data and
/// c(0,t) are held constant across the step, so the right-hand side is
/// linear in Lambda.
Eigen::VectorXd costate_time_update(const DynamicsModel& model, const CostSpec& spec,
                                    const Eigen::VectorXd& x_t,
                                    const Eigen::VectorXd& lambda_t,
                                    const FrozenNeighbors& frozen,
                                    const Eigen::VectorXd& c_at_0, double dt);

}  // namespace nrhc
