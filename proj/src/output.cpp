#include "nrhc/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "nrhc/metrics.hpp"

namespace nrhc {

namespace {

using nlohmann::json;

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

std::string sci12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

std::ofstream open_file(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

// First time the series drops to `threshold` or below; null if never.
json crossing_time(const TrajectoryLog& log,
                   const std::function<double(const StepRecord&)>& value,
                   double threshold) {
  for (const auto& rec : log.records) {
    if (value(rec) <= threshold) return rec.t;
  }
  return nullptr;
}

}  // namespace

void write_outputs(const TrajectoryLog& log, const Scenario& scenario,
                   const std::filesystem::path& out_dir) {
  if (log.records.empty()) {
    throw std::invalid_argument("write_outputs requires a non-empty log");
  }
  std::filesystem::create_directories(out_dir);

  const int m = static_cast<int>(log.records.front().states.size());
  const int n = static_cast<int>(log.records.front().states.front().size());
  const bool leader = log.records.front().leader.has_value();

  {
    auto out = open_file(out_dir / "trajectories.csv");
    out << "t,agent";
    for (int c = 1; c <= n; ++c) out << ",x" << c;
    for (int c = 1; c <= n; ++c) out << ",u" << c;
    out << "\n";
    for (const auto& rec : log.records) {
      if (leader) {
        out << fixed9(rec.t) << ",0";
        for (int c = 0; c < n; ++c) out << "," << fixed9((*rec.leader)(c));
        for (int c = 0; c < n; ++c) out << "," << fixed9(0.0);
        out << "\n";
      }
      for (int i = 0; i < m; ++i) {
        out << fixed9(rec.t) << "," << (i + 1);
        for (int c = 0; c < n; ++c) out << "," << fixed9(rec.states[i](c));
        for (int c = 0; c < n; ++c) out << "," << fixed9(rec.controls[i](c));
        out << "\n";
      }
    }
  }

  {
    auto out = open_file(out_dir / "diagnostics.csv");
    out << "t,agent,residual_norm,max_pairwise\n";
    for (const auto& rec : log.records) {
      for (int i = 0; i < m; ++i) {
        out << fixed9(rec.t) << "," << (i + 1) << ","
            << sci12(rec.residual_norms[i]) << "," << sci12(rec.max_pairwise)
            << "\n";
      }
    }
  }

  {
    const auto& first = log.records.front();
    const auto& last = log.records.back();

    json summary;
    summary["scenario"] = to_json(scenario);
    summary["diverged"] = log.diverged;
    if (log.diverged) summary["divergence_message"] = log.divergence_message;
    summary["steps_recorded"] = log.records.size();
    summary["final_time"] = last.t;

    json metrics;
    metrics["initial_max_pairwise"] = first.max_pairwise;
    metrics["final_max_pairwise"] = last.max_pairwise;
    metrics["time_to_10pct"] = crossing_time(
        log, [](const StepRecord& r) { return r.max_pairwise; },
        0.1 * first.max_pairwise);
    metrics["time_to_1pct"] = crossing_time(
        log, [](const StepRecord& r) { return r.max_pairwise; },
        0.01 * first.max_pairwise);

    double final_residual_max = 0.0;
    for (double r : last.residual_norms) {
      final_residual_max = std::max(final_residual_max, r);
    }
    metrics["final_residual_max"] = final_residual_max;

    double horizon_cost_total = 0.0;
    for (double c : last.horizon_costs) horizon_cost_total += c;
    metrics["final_horizon_cost_total"] = horizon_cost_total;

    if (leader) {
      const auto max_of = [](const std::vector<double>& v) {
        double out = 0.0;
        for (double x : v) out = std::max(out, x);
        return out;
      };
      metrics["initial_max_leader_error"] = max_of(first.leader_errors);
      metrics["final_max_leader_error"] = max_of(last.leader_errors);
      metrics["leader_time_to_10pct"] = crossing_time(
          log,
          [&](const StepRecord& r) { return max_of(r.leader_errors); },
          0.1 * max_of(first.leader_errors));
      metrics["leader_time_to_1pct"] = crossing_time(
          log,
          [&](const StepRecord& r) { return max_of(r.leader_errors); },
          0.01 * max_of(first.leader_errors));
    }

    const auto realized = running_cost(log, scenario.costs, scenario.topology);
    metrics["realized_cost_per_agent"] = realized;

    summary["metrics"] = metrics;

    auto out = open_file(out_dir / "summary.json");
    out << summary.dump(2) << "\n";
  }
}

}  // namespace nrhc
