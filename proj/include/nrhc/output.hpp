#pragma once

#include <filesystem>

#include "nrhc/log.hpp"
#include "nrhc/scenario.hpp"

namespace nrhc {

/// Writes trajectories.csv, diagnostics.csv and summary.json into
/// `out_dir` (created if absent). Fixed formatting makes the files
/// byte-stable across runs of the same scenario.
///
///   trajectories.csv  t,agent,x1..xn,u1..un   one row per agent per step
///                     (the leader, when present, is agent 0 with zero u)
///   diagnostics.csv   t,agent,residual_norm,max_pairwise
///   summary.json      scenario echo, final metrics, threshold crossings
void write_outputs(const TrajectoryLog& log, const Scenario& scenario,
                   const std::filesystem::path& out_dir);

}  // namespace nrhc
