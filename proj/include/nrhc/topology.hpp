#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace nrhc {

struct Connectivity {
  bool weak = false;    // path between every pair, edge directions ignored
  bool strong = false;  // directed path both ways between every pair
};

/// Weighted communication graph with an optional leader attachment.
/// Immutable after construction; shared read-only by all agent solvers.
class Topology {
 public:
  /// `adjacency` is the weight matrix a_ij (zero diagonal, nonnegative).
  /// `leader_adjacency` holds a_i0 >= 0 per agent when a leader exists.
  Topology(Eigen::MatrixXd adjacency, bool directed,
           std::optional<Eigen::VectorXd> leader_adjacency = std::nullopt);

  int n_agents() const { return static_cast<int>(adjacency_.rows()); }
  bool directed() const { return directed_; }
  const Eigen::MatrixXd& adjacency() const { return adjacency_; }
  const std::optional<Eigen::VectorXd>& leader_adjacency() const {
    return leader_adjacency_;
  }
  bool has_leader() const { return leader_adjacency_.has_value(); }

  /// Indices j with a_ij > 0, ascending. Never contains i.
  std::vector<int> neighbors(int i) const;

  /// In-degree matrix D = diag(sum_j a_ij).
  Eigen::MatrixXd degree_matrix() const;

  /// Graph Laplacian L = D - A. Rows sum to zero.
  Eigen::MatrixXd laplacian() const;

  Connectivity connectivity() const;

  /// Undirected: connected in the usual sense. Directed: weak
  /// connectivity; callers needing the stronger notion should inspect
  /// connectivity().strong.
  bool is_connected() const { return connectivity().weak; }

  /// H = A + diag(a_i0). Requires a leader adjacency.
  Eigen::MatrixXd augmented_matrix() const;

 private:
  Eigen::MatrixXd adjacency_;
  std::optional<Eigen::VectorXd> leader_adjacency_;
  bool directed_;
};

}  // namespace nrhc
