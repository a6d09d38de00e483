#include "tabagent/rapo/rapo.hpp"

#include <cmath>

#include "tabagent/core/errors.hpp"
#include "tabagent/core/trajectory.hpp"

namespace tabagent::rapo {

std::string to_string(Mode mode) {
  return mode == Mode::RAPO ? "rapo" : "grpo";
}

Mode parse_mode(const std::string& s) {
  if (s == "rapo" || s == "RAPO") return Mode::RAPO;
  if (s == "grpo" || s == "GRPO") return Mode::GRPO;
  throw ConfigError("mode must be rapo or grpo, got '" + s + "'");
}

void validate(const RapoConfig& cfg) {
  if (!(cfg.eps_low > 0.0 && cfg.eps_low <= cfg.eps_high && cfg.eps_high < 1.0))
    throw ConfigError("require 0 < eps_low <= eps_high < 1");
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha))
    throw ConfigError("alpha must be finite and >= 0");
  if (cfg.group_size < 2) throw ConfigError("group_size must be >= 2");
  if (!(cfg.std_epsilon > 0.0)) throw ConfigError("std_epsilon must be > 0");
}

std::vector<AdvantageRecord> advantage_records(const RolloutGroup& group,
                                               const RapoConfig& cfg,
                                               PairCounts* counts) {
  const auto n = static_cast<Eigen::Index>(group.trajectories.size());
  if (n < 2)
    throw GroupTooSmall("group '" + group.query_id + "' has " +
                        std::to_string(n) + " trajectories");
  Eigen::VectorXd rewards(n);
  Eigen::VectorXd confidence(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& traj = group.trajectories[i];
    if (!traj.reward)
      throw MissingReward("trajectory " + std::to_string(i) + " of group '" +
                          group.query_id + "' is unscored");
    rewards(i) = traj.reward->total;
    confidence(i) = length_normalized_logprob(traj);
  }
  const Eigen::VectorXd base = group_advantages(rewards, cfg.std_epsilon);
  Eigen::VectorXd gamma = rank_weights(rewards, confidence, cfg.alpha, counts);
  if (cfg.mode == Mode::GRPO) gamma.setOnes();

  std::vector<AdvantageRecord> records(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& r = records[i];
    r.traj_index = static_cast<int>(i);
    r.base_advantage = base(i);
    r.gamma = gamma(i);
    r.weighted_advantage = gamma(i) * base(i);
    r.logprob_norm = confidence(i);
  }
  return records;
}

std::vector<double> trajectory_gammas(const RolloutGroup& group,
                                      const RapoConfig& cfg) {
  std::vector<double> out;
  for (const auto& r : advantage_records(group, cfg)) out.push_back(r.gamma);
  return out;
}

BatchLayout layout_batch(std::span<const RolloutGroup> batch,
                         const RapoConfig& cfg) {
  BatchLayout layout;
  if (batch.empty()) return layout;
  PairCounts counts;
  double gamma_sum = 0.0;
  std::size_t n_traj = 0;
  const double n_groups = static_cast<double>(batch.size());
  for (const auto& group : batch) {
    auto records = advantage_records(group, cfg, &counts);
    std::size_t group_tokens = 0;
    for (const auto& traj : group.trajectories) group_tokens += traj.tokens.size();
    const double scale = 1.0 / (n_groups * static_cast<double>(group_tokens));
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto count = group.trajectories[i].tokens.size();
      layout.weighted_advantage.push_back(records[i].weighted_advantage);
      layout.token_scale.push_back(scale);
      layout.token_offset.push_back(layout.total_tokens);
      layout.token_count.push_back(count);
      layout.total_tokens += count;
      gamma_sum += records[i].gamma;
      ++n_traj;
    }
  }
  layout.mean_gamma = gamma_sum / static_cast<double>(n_traj);
  layout.misaligned_pair_fraction =
      counts.pairs ? static_cast<double>(counts.misaligned) /
                         static_cast<double>(counts.pairs)
                   : 0.0;
  return layout;
}

LossReport rapo_objective(std::span<const RolloutGroup> batch,
                          std::span<const double> new_logprobs,
                          const RapoConfig& cfg) {
  const BatchLayout layout = layout_batch(batch, cfg);
  if (new_logprobs.size() != layout.total_tokens)
    throw AlignmentError("expected " + std::to_string(layout.total_tokens) +
                         " new logprobs, got " +
                         std::to_string(new_logprobs.size()));
  LossReport report;
  report.mean_gamma = layout.mean_gamma;
  report.misaligned_pair_fraction = layout.misaligned_pair_fraction;
  report.per_token_terms.reserve(layout.total_tokens);

  std::size_t k = 0;
  std::size_t clipped = 0;
  double objective = 0.0;
  for (const auto& group : batch) {
    for (const auto& traj : group.trajectories) {
      const double adv = layout.weighted_advantage[k];
      double traj_sum = 0.0;
      for (std::size_t t = 0; t < traj.tokens.size(); ++t) {
        const double ratio = std::exp(new_logprobs[layout.token_offset[k] + t] -
                                      traj.tokens[t].logprob_old);
        const double term =
            clipped_token_term(ratio, adv, cfg.eps_low, cfg.eps_high);
        if (clip_active(ratio, adv, cfg.eps_low, cfg.eps_high)) ++clipped;
        report.per_token_terms.push_back(term);
        traj_sum += term;
      }
      objective += layout.token_scale[k] * traj_sum;
      ++k;
    }
  }
  report.objective_value = objective;
  report.clipped_fraction =
      layout.total_tokens ? static_cast<double>(clipped) /
                                static_cast<double>(layout.total_tokens)
                          : 0.0;
  return report;
}

}  // namespace tabagent::rapo
