#pragma once

#include <cstdint>

#include "tabagent/core/types.hpp"

namespace tabagent::reward {

struct RewardConfig {
  double rho = 0.05;        // decay rate of the tool-reward curriculum
  double beta = 0.5;        // base reward for a successful tool call
  double c_penalty = 0.01;  // quadratic turn-penalty coefficient
  bool enable_tool_reward = true;
};

// Throws ConfigError when a coefficient is negative or non-finite.
void validate(const RewardConfig& cfg);

// 1 when every turn wraps its reasoning in <think></think> and the final turn
// carries an <answer> block holding a JSON object; 0 otherwise.
double format_reward(const Trajectory& traj);

// 1 when the final answer matches the gold answer under the shared
// evaluation normalization; 0 otherwise, including when no answer exists.
double accuracy_reward(const Trajectory& traj, const TableTask& task);

// exp(-rho * step) * (beta * I_success - c_penalty * n_tool_turns^2);
// 0 when the tool reward is disabled.
double tool_reward(const Trajectory& traj, std::int64_t step,
                   const RewardConfig& cfg);

RewardBreakdown score(const Trajectory& traj, const TableTask& task,
                      std::int64_t step, const RewardConfig& cfg);

}  // namespace tabagent::reward
