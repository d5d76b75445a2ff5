#include "nrhc/topology.hpp"

#include <queue>
#include <stdexcept>

namespace nrhc {

namespace {

// Reachability from `start` following edges selected by `edge`.
template <class EdgePred>
int reachable_count(int n, int start, const EdgePred& edge) {
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  seen[start] = true;
  frontier.push(start);
  int count = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < n; ++v) {
      if (!seen[v] && edge(u, v)) {
        seen[v] = true;
        frontier.push(v);
        ++count;
      }
    }
  }
  return count;
}

}  // namespace

Topology::Topology(Eigen::MatrixXd adjacency, bool directed,
                   std::optional<Eigen::VectorXd> leader_adjacency)
    : adjacency_(std::move(adjacency)),
      leader_adjacency_(std::move(leader_adjacency)),
      directed_(directed) {
  const auto n = adjacency_.rows();
  if (n < 1 || adjacency_.cols() != n) {
    throw std::invalid_argument("adjacency must be a square matrix, n >= 1");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency_(i, i) != 0.0) {
      throw std::invalid_argument("self-loop: adjacency diagonal must be zero");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(adjacency_(i, j) >= 0.0)) {
        throw std::invalid_argument("adjacency weights must be nonnegative");
      }
    }
  }
  if (!directed_ && adjacency_ != adjacency_.transpose().eval()) {
    throw std::invalid_argument("undirected topology requires symmetric adjacency");
  }
  if (leader_adjacency_) {
    if (leader_adjacency_->size() != n) {
      throw std::invalid_argument("leader adjacency must have one entry per agent");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!((*leader_adjacency_)(i) >= 0.0)) {
        throw std::invalid_argument("leader adjacency weights must be nonnegative");
      }
    }
  }
}

std::vector<int> Topology::neighbors(int i) const {
  if (i < 0 || i >= n_agents()) {
    throw std::out_of_range("agent index out of range");
  }
  std::vector<int> out;
  for (int j = 0; j < n_agents(); ++j) {
    if (adjacency_(i, j) > 0.0) out.push_back(j);
  }
  return out;
}

Eigen::MatrixXd Topology::degree_matrix() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_agents(), n_agents());
  for (int i = 0; i < n_agents(); ++i) d(i, i) = adjacency_.row(i).sum();
  return d;
}

Eigen::MatrixXd Topology::laplacian() const {
  return degree_matrix() - adjacency_;
}

Connectivity Topology::connectivity() const {
  const int n = n_agents();
  Connectivity result;
  const auto& a = adjacency_;
  result.weak = reachable_count(n, 0, [&](int u, int v) {
                  return a(u, v) > 0.0 || a(v, u) > 0.0;
                }) == n;
  if (!directed_) {
    result.strong = result.weak;
  } else {
    const bool fwd = reachable_count(n, 0, [&](int u, int v) {
                       return a(u, v) > 0.0;
                     }) == n;
    const bool bwd = reachable_count(n, 0, [&](int u, int v) {
                       return a(v, u) > 0.0;
                     }) == n;
    result.strong = fwd && bwd;
  }
  return result;
}

Eigen::MatrixXd Topology::augmented_matrix() const {
  if (!leader_adjacency_) {
    throw std::logic_error("augmented_matrix requires a leader adjacency");
  }
  Eigen::MatrixXd h = adjacency_;
  h.diagonal() += *leader_adjacency_;
  return h;
}

}  // namespace nrhc
