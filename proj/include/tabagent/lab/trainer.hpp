#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tabagent/lab/toy_policy.hpp"
#include "tabagent/rapo/rapo.hpp"
#include "tabagent/reward/reward.hpp"

namespace tabagent::lab {

struct TrainRunConfig {
  int steps = 300;
  int tasks_per_batch = 8;
  double learning_rate = 2.0;
  std::uint64_t seed = 0;
  int inner_updates = 1;
  int n_tasks = 50;
  std::uint64_t suite_seed = 20240;
  std::uint64_t eval_seed = 777;
  double temperature = 1.0;
  reward::RewardConfig reward;
  rapo::RapoConfig rapo;  // rapo.mode is the optimizer mode, rapo.group_size is G
  LabConfig lab;
};

void validate(const TrainRunConfig& cfg);

struct StepMetrics {
  int step = 0;
  double mean_reward = 0.0;
  double oracle_accuracy = 0.0;
  double tool_calls_ratio = 0.0;
  std::optional<double> pass_ratio;  // empty when no tool call ran
  double objective = 0.0;
  double mean_gamma = 1.0;
  double misaligned_pair_fraction = 0.0;
  double clipped_fraction = 0.0;
};

struct TrainResult {
  rapo::Mode mode = rapo::Mode::RAPO;
  std::uint64_t seed = 0;
  std::vector<StepMetrics> curve;
  Eigen::VectorXd theta;
  double final_greedy_accuracy = 0.0;
};

extern const std::vector<std::string> kMetricsColumns;

std::string metrics_csv(const TrainResult& result);

/// Greedy-decoding accuracy of `policy` over `suite`, with direct-answer noise
/// drawn from `eval_seed`.
double greedy_accuracy(const ToyPolicy& policy, const std::vector<SyntheticTask>& suite,
                       std::uint64_t eval_seed, const LabConfig& lab = {});

/// Gradient-ascent training run. Throws TrainingDiverged naming the step when
/// θ stops being finite.
TrainResult train(const TrainRunConfig& cfg);

struct SeedComparison {
  std::uint64_t seed = 0;
  TrainResult rapo;
  TrainResult grpo;
  double auc_rapo = 0.0;
  double auc_grpo = 0.0;
};

struct ComparisonReport {
  std::vector<SeedComparison> seeds;
  double fraction_rapo_ge = 0.0;  // share of seeds with AUC_rapo >= AUC_grpo
};

double area_under_curve(const std::vector<StepMetrics>& curve);

/// Matched RAPO/GRPO runs for seeds cfg.seed .. cfg.seed + n_seeds - 1, run on
/// up to `parallelism` threads.
ComparisonReport compare_modes(const TrainRunConfig& cfg, int n_seeds, int parallelism = 0);

std::string comparison_csv(const ComparisonReport& report);

}  // namespace tabagent::lab
