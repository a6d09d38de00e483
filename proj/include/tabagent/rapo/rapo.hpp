#pragma once

#include <Eigen/Dense>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "tabagent/core/types.hpp"
#include "tabagent/rapo/kernels.hpp"

namespace tabagent::rapo {

enum class Mode { RAPO, GRPO };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& s);

struct RapoConfig {
  double eps_low = 0.2;
  double eps_high = 0.28;
  double alpha = 0.5;
  int group_size = 8;
  Mode mode = Mode::RAPO;
  double std_epsilon = 1e-8;
};

void validate(const RapoConfig& cfg);

struct AdvantageRecord {
  int traj_index = 0;
  double base_advantage = 0.0;
  double gamma = 1.0;
  double weighted_advantage = 0.0;
  double logprob_norm = 0.0;
};

/// Per-trajectory advantages for one group. Rewards are read from each
/// trajectory's `reward->total`; throws MissingReward if one is unset.
std::vector<AdvantageRecord> advantage_records(const RolloutGroup& group,
                                               const RapoConfig& cfg,
                                               PairCounts* counts = nullptr);

/// gamma_i for every trajectory of the group; all ones in GRPO mode.
std::vector<double> trajectory_gammas(const RolloutGroup& group,
                                      const RapoConfig& cfg);

struct LossReport {
  double objective_value = 0.0;
  std::vector<double> per_token_terms;  // unnormalized clipped terms
  double clipped_fraction = 0.0;
  double mean_gamma = 1.0;
  double misaligned_pair_fraction = 0.0;
};

// Flattened view of a batch: one entry per trajectory, token offsets into the
// concatenated token sequence of the batch.
struct BatchLayout {
  std::vector<double> weighted_advantage;
  std::vector<double> token_scale;  // 1 / (n_groups * sum_i |o_i|) of its group
  std::vector<std::size_t> token_offset;
  std::vector<std::size_t> token_count;
  std::size_t total_tokens = 0;
  double mean_gamma = 1.0;
  double misaligned_pair_fraction = 0.0;
};

BatchLayout layout_batch(std::span<const RolloutGroup> batch,
                         const RapoConfig& cfg);

/// Batch estimate of the clipped token-level objective. `new_logprobs` holds
/// the current-policy log-probability of every token in batch order.
/// Throws AlignmentError when the token counts disagree.
LossReport rapo_objective(std::span<const RolloutGroup> batch,
                          std::span<const double> new_logprobs,
                          const RapoConfig& cfg);

struct TokenJacobian {
  Eigen::VectorXd logprobs;  // |o_i| current-policy log-probabilities
  Eigen::MatrixXd jacobian;  // |o_i| x P, row t = d logprob_t / d theta
};

template <class P>
concept DifferentiablePolicy = requires(const P& p, const Trajectory& t) {
  { p.num_parameters() } -> std::convertible_to<Eigen::Index>;
  { p.token_jacobian(t) } -> std::same_as<TokenJacobian>;
};

struct GradientResult {
  LossReport loss;
  Eigen::VectorXd gradient;
};

/// Objective and its gradient with respect to the policy parameters.
/// Clipped tokens contribute nothing; throws NonFiniteGradient on NaN/inf.
template <DifferentiablePolicy P>
GradientResult rapo_gradient(std::span<const RolloutGroup> batch,
                             const P& policy, const RapoConfig& cfg) {
  const BatchLayout layout = layout_batch(batch, cfg);
  std::vector<TokenJacobian> evals;
  evals.reserve(layout.token_count.size());
  std::vector<double> new_logprobs;
  new_logprobs.reserve(layout.total_tokens);
  for (const auto& group : batch) {
    for (const auto& traj : group.trajectories) {
      evals.push_back(policy.token_jacobian(traj));
      if (static_cast<std::size_t>(evals.back().logprobs.size()) !=
          traj.tokens.size())
        throw AlignmentError("policy returned " +
                             std::to_string(evals.back().logprobs.size()) +
                             " logprobs for " +
                             std::to_string(traj.tokens.size()) + " tokens");
      for (Eigen::Index t = 0; t < evals.back().logprobs.size(); ++t)
        new_logprobs.push_back(evals.back().logprobs(t));
    }
  }

  GradientResult result;
  result.loss = rapo_objective(batch, new_logprobs, cfg);
  result.gradient = Eigen::VectorXd::Zero(policy.num_parameters());

  std::size_t k = 0;
  for (const auto& group : batch) {
    for (const auto& traj : group.trajectories) {
      const double adv = layout.weighted_advantage[k];
      const double scale = layout.token_scale[k];
      const auto& eval = evals[k];
      Eigen::VectorXd coef = Eigen::VectorXd::Zero(eval.logprobs.size());
      for (Eigen::Index t = 0; t < eval.logprobs.size(); ++t) {
        const double ratio =
            std::exp(eval.logprobs(t) - traj.tokens[t].logprob_old);
        if (!clip_active(ratio, adv, cfg.eps_low, cfg.eps_high))
          coef(t) = scale * adv * ratio;
      }
      result.gradient.noalias() += eval.jacobian.transpose() * coef;
      ++k;
    }
  }
  if (!result.gradient.allFinite())
    throw NonFiniteGradient("gradient has non-finite components");
  return result;
}

}  // namespace tabagent::rapo
