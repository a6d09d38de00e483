#include "tabagent/core/trajectory.hpp"

#include "tabagent/core/errors.hpp"

namespace tabagent {

double length_normalized_logprob(const Trajectory& traj) {
  if (traj.tokens.empty())
    throw EmptyTrajectory("trajectory for task '" + traj.task_id +
                          "' has no tokens");
  double sum = 0.0;
  for (const auto& tok : traj.tokens) sum += tok.logprob_old;
  return sum / static_cast<double>(traj.tokens.size());
}

std::vector<std::string> validate_group(const RolloutGroup& group) {
  std::vector<std::string> report;
  if (group.trajectories.size() < 2) {
    report.push_back("group size below 2 (G=" +
                     std::to_string(group.trajectories.size()) + ")");
  }
  if (group.step < 0) report.push_back("step is negative");
  for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
    const auto& traj = group.trajectories[i];
    const std::string where = "trajectory " + std::to_string(i) + ": ";
    if (traj.task_id != group.query_id) {
      report.push_back(where + "task_id '" + traj.task_id +
                       "' differs from query_id '" + group.query_id + "'");
    }
    for (const auto& problem : trajectory_violations(traj))
      report.push_back(where + problem);
  }
  return report;
}

}  // namespace tabagent
