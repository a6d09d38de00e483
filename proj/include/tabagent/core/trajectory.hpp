#pragma once

#include <string>
#include <vector>

#include "tabagent/core/types.hpp"

namespace tabagent {

/// Mean old-policy log-probability over the sampled tokens; the sequence
/// confidence used to rank trajectories within a group.
/// Throws EmptyTrajectory when the trajectory has no tokens.
double length_normalized_logprob(const Trajectory& traj);

/// Lists every invariant violation in the group. Never throws.
std::vector<std::string> validate_group(const RolloutGroup& group);

}  // namespace tabagent
