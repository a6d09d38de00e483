#include "tabagent/lab/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>
#include <unordered_map>

#include "tabagent/core/errors.hpp"

namespace tabagent::lab {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string> kMetricsColumns = {
    "step",       "mode",           "seed",                     "mean_reward",
    "oracle_accuracy", "tool_calls_ratio", "pass_ratio",        "objective",
    "mean_gamma", "misaligned_pair_fraction", "clipped_fraction"};

void validate(const TrainRunConfig& cfg) {
  if (cfg.steps < 0) throw ConfigError("steps must be >= 0");
  if (cfg.tasks_per_batch < 1) throw ConfigError("tasks_per_batch must be >= 1");
  if (cfg.n_tasks < 1) throw ConfigError("n_tasks must be >= 1");
  if (cfg.inner_updates < 1) throw ConfigError("inner_updates must be >= 1");
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
    throw ConfigError("learning_rate must be finite and >= 0");
  if (!(cfg.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  for (double p : cfg.lab.mental_accuracy)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("mental_accuracy entries must lie in [0,1]");
  reward::validate(cfg.reward);
  rapo::validate(cfg.rapo);
}

std::string metrics_csv(const TrainResult& result) {
  std::string out;
  for (std::size_t k = 0; k < kMetricsColumns.size(); ++k)
    out += (k ? "," : "") + kMetricsColumns[k];
  out += '\n';
  const std::string mode = rapo::to_string(result.mode);
  for (const auto& m : result.curve) {
    out += std::to_string(m.step) + ',' + mode + ',' + std::to_string(result.seed) + ',' +
           num(m.mean_reward) + ',' + num(m.oracle_accuracy) + ',' + num(m.tool_calls_ratio) +
           ',' + (m.pass_ratio ? num(*m.pass_ratio) : "") + ',' + num(m.objective) + ',' +
           num(m.mean_gamma) + ',' + num(m.misaligned_pair_fraction) + ',' +
           num(m.clipped_fraction) + '\n';
  }
  return out;
}

double greedy_accuracy(const ToyPolicy& policy, const std::vector<SyntheticTask>& suite,
                       std::uint64_t eval_seed, const LabConfig& lab) {
  if (suite.empty()) return 0.0;
  Rng rng(eval_seed);
  double correct = 0.0;
  for (const auto& task : suite)
    correct += reward::accuracy_reward(greedy_trajectory(policy, task, rng, lab), task.task);
  return correct / static_cast<double>(suite.size());
}

TrainResult train(const TrainRunConfig& cfg) {
  validate(cfg);
  const auto suite = default_suite(cfg.n_tasks, cfg.suite_seed, cfg.lab.shape);
  std::unordered_map<std::string, TaskFeatures> features;
  for (const auto& t : suite) features.emplace(t.task.id, features_of(t));

  ToyPolicy policy(cfg.temperature);
  const BoundPolicy bound(policy, features);
  Rng rng(cfg.seed);
  TrainResult result;
  result.mode = cfg.rapo.mode;
  result.seed = cfg.seed;

  std::vector<RolloutGroup> batch;
  for (int step = 0; step < cfg.steps; ++step) {
    batch.clear();
    StepMetrics m;
    m.step = step;
    double n_traj = 0.0, n_tool = 0.0, n_exec = 0.0, n_ok = 0.0;
    for (int b = 0; b < cfg.tasks_per_batch; ++b) {
      const auto& task = suite[rng.below(cfg.n_tasks)];
      RolloutGroup group = rollout(policy, task, cfg.rapo.group_size, rng, cfg.lab);
      group.step = step;
      for (auto& traj : group.trajectories) {
        traj.reward = reward::score(traj, task.task, step, cfg.reward);
        m.mean_reward += traj.reward->total;
        m.oracle_accuracy += traj.reward->r_acc;
        n_traj += 1.0;
        if (traj.n_tool_turns > 0) n_tool += 1.0;
        for (const auto& turn : traj.turns) {
          if (!turn.observation) continue;
          n_exec += 1.0;
          if (turn.observation->status == ExecStatus::Ok) n_ok += 1.0;
        }
      }
      batch.push_back(std::move(group));
    }
    m.mean_reward /= n_traj;
    m.oracle_accuracy /= n_traj;
    m.tool_calls_ratio = n_tool / n_traj;
    if (n_exec > 0.0) m.pass_ratio = n_ok / n_exec;

    for (int u = 0; u < cfg.inner_updates; ++u) {
      const auto grad = rapo::rapo_gradient(std::span<const RolloutGroup>(batch), bound, cfg.rapo);
      if (u == 0) {
        m.objective = grad.loss.objective_value;
        m.mean_gamma = grad.loss.mean_gamma;
        m.misaligned_pair_fraction = grad.loss.misaligned_pair_fraction;
        m.clipped_fraction = grad.loss.clipped_fraction;
      }
      policy.parameters() += cfg.learning_rate * grad.gradient;
      if (!policy.parameters().allFinite())
        throw TrainingDiverged("parameters became non-finite at step " + std::to_string(step));
    }
    result.curve.push_back(m);
  }
  result.theta = policy.parameters();
  result.final_greedy_accuracy = greedy_accuracy(policy, suite, cfg.eval_seed, cfg.lab);
  return result;
}

double area_under_curve(const std::vector<StepMetrics>& curve) {
  double total = 0.0;
  for (const auto& m : curve) total += m.mean_reward;
  return total;
}

ComparisonReport compare_modes(const TrainRunConfig& cfg, int n_seeds, int parallelism) {
  if (n_seeds < 1) throw ConfigError("compare needs at least one seed");
  validate(cfg);
  ComparisonReport report;
  report.seeds.resize(n_seeds);
  // jobs 2k and 2k+1 are the RAPO and GRPO runs of seed k
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int job = next++; job < 2 * n_seeds; job = next++) {
      TrainRunConfig run = cfg;
      run.seed = cfg.seed + static_cast<std::uint64_t>(job / 2);
      run.rapo.mode = job % 2 == 0 ? rapo::Mode::RAPO : rapo::Mode::GRPO;
      auto& slot = report.seeds[job / 2];
      (job % 2 == 0 ? slot.rapo : slot.grpo) = train(run);
    }
  };
  int threads = parallelism > 0 ? parallelism
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::clamp(threads, 1, 2 * n_seeds);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  int wins = 0;
  for (int k = 0; k < n_seeds; ++k) {
    auto& s = report.seeds[k];
    s.seed = cfg.seed + static_cast<std::uint64_t>(k);
    s.auc_rapo = area_under_curve(s.rapo.curve);
    s.auc_grpo = area_under_curve(s.grpo.curve);
    wins += s.auc_rapo >= s.auc_grpo;
  }
  report.fraction_rapo_ge = static_cast<double>(wins) / n_seeds;
  return report;
}

std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "seed,auc_rapo,auc_grpo,rapo_ge_grpo,greedy_accuracy_rapo,greedy_accuracy_grpo\n";
  for (const auto& s : report.seeds)
    out += std::to_string(s.seed) + ',' + num(s.auc_rapo) + ',' + num(s.auc_grpo) + ',' +
           (s.auc_rapo >= s.auc_grpo ? "1" : "0") + ',' + num(s.rapo.final_greedy_accuracy) +
           ',' + num(s.grpo.final_greedy_accuracy) + '\n';
  return out;
}

}  // namespace tabagent::lab
