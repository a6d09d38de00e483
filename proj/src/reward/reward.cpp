#include "tabagent/reward/reward.hpp"

#include <cmath>

#include "tabagent/core/errors.hpp"
#include "tabagent/core/response_format.hpp"
#include "tabagent/eval/normalize.hpp"

namespace tabagent::reward {

void validate(const RewardConfig& cfg) {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
      throw ConfigError(std::string(name) + " must be finite and >= 0");
  };
  check(cfg.rho, "rho");
  check(cfg.beta, "beta");
  check(cfg.c_penalty, "c_penalty");
}

double format_reward(const Trajectory& traj) {
  if (traj.turns.empty()) return 0.0;
  for (const auto& turn : traj.turns) {
    if (!find_tag_block(turn.response, "think")) return 0.0;
  }
  return answer_object(traj.turns.back().response) ? 1.0 : 0.0;
}

double accuracy_reward(const Trajectory& traj, const TableTask& task) {
  return eval::answer_matches(traj.final_answer, task) ? 1.0 : 0.0;
}

double tool_reward(const Trajectory& traj, std::int64_t step,
                   const RewardConfig& cfg) {
  if (!cfg.enable_tool_reward) return 0.0;
  const double success = traj.any_tool_success ? 1.0 : 0.0;
  const double turns = static_cast<double>(traj.n_tool_turns);
  const double decay = std::exp(-cfg.rho * static_cast<double>(step));
  return decay * (cfg.beta * success - cfg.c_penalty * turns * turns);
}

RewardBreakdown score(const Trajectory& traj, const TableTask& task,
                      std::int64_t step, const RewardConfig& cfg) {
  RewardBreakdown r;
  r.r_format = format_reward(traj);
  r.r_acc = accuracy_reward(traj, task);
  r.r_tool = tool_reward(traj, step, cfg);
  r.total = r.r_format + r.r_acc + r.r_tool;
  return r;
}

}  // namespace tabagent::reward
