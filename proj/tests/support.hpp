#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "oracles/rapo_oracle.hpp"
#include "tabagent/core/types.hpp"
#include "tabagent/lab/toy_policy.hpp"
#include "tabagent/rapo/rapo.hpp"

namespace support {

using namespace tabagent;

inline Trajectory scored(const std::string& task_id, double reward,
                         const std::vector<double>& old_lp) {
  Trajectory t;
  t.task_id = task_id;
  for (std::size_t k = 0; k < old_lp.size(); ++k)
    t.tokens.push_back({static_cast<std::int64_t>(k), old_lp[k]});
  t.reward = RewardBreakdown{0, 0, reward, reward};
  return t;
}

inline oracle::Group to_oracle(const RolloutGroup& g, const std::vector<double>& new_lp,
                               std::size_t& cursor) {
  oracle::Group out;
  for (const auto& t : g.trajectories) {
    oracle::Traj o;
    o.reward = t.reward->total;
    for (const auto& tok : t.tokens) {
      o.old_lp.push_back(tok.logprob_old);
      o.new_lp.push_back(new_lp[cursor++]);
    }
    out.push_back(std::move(o));
  }
  return out;
}

inline oracle::Params to_params(const rapo::RapoConfig& cfg) {
  return {cfg.eps_low, cfg.eps_high, cfg.alpha, cfg.std_epsilon, cfg.mode == rapo::Mode::RAPO};
}

// A toy-policy batch: groups rolled out under random old parameters, with
// random rewards, and a current policy that has drifted from the old one.
struct ToyBatch {
  std::vector<lab::SyntheticTask> tasks;
  std::unordered_map<std::string, lab::TaskFeatures> features;
  std::vector<RolloutGroup> groups;
  lab::ToyPolicy policy;
};

inline ToyBatch random_toy_batch(std::mt19937_64& gen, double drift, int n_groups = 3,
                                 int group_size = 6) {
  ToyBatch b;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> reward_pick(0, 3);
  const double reward_values[] = {0.0, 1.0, 2.0, 2.49};
  b.tasks = lab::default_suite(n_groups, gen());
  for (const auto& t : b.tasks) b.features.emplace(t.task.id, lab::features_of(t));
  lab::ToyPolicy old;
  for (Eigen::Index k = 0; k < old.num_parameters(); ++k) old.parameters()(k) = normal(gen);
  lab::Rng rng(gen());
  for (const auto& task : b.tasks) {
    auto group = lab::rollout(old, task, group_size, rng);
    for (auto& traj : group.trajectories) {
      const double r = reward_values[reward_pick(gen)];
      traj.reward = RewardBreakdown{0, 0, r, r};
    }
    b.groups.push_back(std::move(group));
  }
  b.policy = old;
  for (Eigen::Index k = 0; k < old.num_parameters(); ++k)
    b.policy.parameters()(k) += drift * normal(gen);
  return b;
}

inline std::vector<double> batch_logprobs(const ToyBatch& b, const lab::ToyPolicy& policy) {
  const lab::BoundPolicy bound(policy, b.features);
  std::vector<double> out;
  for (const auto& g : b.groups)
    for (const auto& t : g.trajectories) {
      const auto eval = bound.token_jacobian(t);
      for (Eigen::Index k = 0; k < eval.logprobs.size(); ++k) out.push_back(eval.logprobs(k));
    }
  return out;
}

inline double toy_objective(const ToyBatch& b, const lab::ToyPolicy& policy,
                            const rapo::RapoConfig& cfg) {
  return rapo::rapo_objective(b.groups, batch_logprobs(b, policy), cfg).objective_value;
}

inline Eigen::VectorXd finite_difference(const ToyBatch& b, const rapo::RapoConfig& cfg,
                                         double h) {
  lab::ToyPolicy probe = b.policy;
  Eigen::VectorXd g(probe.num_parameters());
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double x = probe.parameters()(k);
    probe.parameters()(k) = x + h;
    const double up = toy_objective(b, probe, cfg);
    probe.parameters()(k) = x - h;
    const double down = toy_objective(b, probe, cfg);
    probe.parameters()(k) = x;
    g(k) = (up - down) / (2.0 * h);
  }
  return g;
}

// Central differences carry round-off up to about 1e-11 at h = 1e-5, so the
// denominator never drops below kGradientNoiseFloor.
inline constexpr double kGradientNoiseFloor = 1e-7;

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), kGradientNoiseFloor});
}

}  // namespace support
