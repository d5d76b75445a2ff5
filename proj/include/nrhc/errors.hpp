#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nrhc {

/// Raised when an integration produces non-finite values. Carries the
/// location (agent index, real time t, horizon time tau) when known;
/// a field is -1 when the failing layer cannot attribute it.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string message, int agent = -1, double t = -1.0,
                  double tau = -1.0)
      : std::runtime_error(std::move(message)), agent(agent), t(t), tau(tau) {}

  int agent;
  double t;
  double tau;
};

/// Scenario ingestion failure. `errors` lists every validation problem
/// found, not just the first.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors(std::move(errors)) {}

  std::vector<std::string> errors;

 private:
  static std::string join(const std::vector<std::string>& errs) {
    std::string out = "scenario validation failed:";
    for (const auto& e : errs) out += "\n  - " + e;
    return out;
  }
};

}  // namespace nrhc
