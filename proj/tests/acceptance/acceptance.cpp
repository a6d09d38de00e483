#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"
#include "tabagent/agent/backend.hpp"
#include "tabagent/agent/episode.hpp"
#include "tabagent/agent/executor.hpp"
#include "tabagent/core/serialization.hpp"
#include "tabagent/core/trajectory.hpp"
#include "tabagent/eval/normalize.hpp"
#include "tabagent/lab/trainer.hpp"
#include "tabagent/rapo/rapo.hpp"
#include "tabagent/reward/reward.hpp"

using namespace tabagent;

namespace {

const std::string kFixtures = TABAGENT_FIXTURES;

constexpr double kClosedFormTol = 1e-9;
constexpr double kReductionTol = 1e-12;
constexpr double kFdStep = 1e-5;
constexpr double kFdRelTol = 1e-4;
constexpr int kSeeds = 10;
constexpr int kSeedsRapoAhead = 6;
constexpr int kSeedsAblationLower = 7;
constexpr double kAccuracyTarget = 0.9;
constexpr double kToolRatioTarget = 0.9;
constexpr int kToolWindow = 100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = elapsed < budget_s;
  const bool pass = out.pass && in_time;
  failures += !pass;
  std::printf("%s %s: %s [%.2fs of %.0fs]%s\n", pass ? "PASS" : "FAIL", name.c_str(),
              out.detail.c_str(), elapsed, budget_s, in_time ? "" : " over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Trajectory tool_traj(int turns, bool success) {
  Trajectory t;
  t.task_id = "t";
  t.n_tool_turns = turns;
  t.any_tool_success = success;
  return t;
}

Outcome reward_closed_forms() {
  const reward::RewardConfig cfg;
  // hand evaluation with rho 0.05, beta 0.5, C 0.01
  const double expected[] = {0.5 - 0.01, -(0.01 * 4.0), std::exp(-0.05 * 100.0) * (0.5 - 0.01)};
  const double got[] = {reward::tool_reward(tool_traj(1, true), 0, cfg),
                        reward::tool_reward(tool_traj(2, false), 0, cfg),
                        reward::tool_reward(tool_traj(1, true), 100, cfg)};
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(got[k] - expected[k]));
  return {worst < kClosedFormTol,
          fmt("values %.12g %.12g %.12g, max error %.3g", got[0], got[1], got[2], worst)};
}

void align_rewards(RolloutGroup& g) {
  std::vector<double> rewards;
  for (const auto& t : g.trajectories) rewards.push_back(t.reward->total);
  std::sort(rewards.begin(), rewards.end());
  std::vector<std::size_t> order(g.trajectories.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return length_normalized_logprob(g.trajectories[a]) <
           length_normalized_logprob(g.trajectories[b]);
  });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double r = rewards[k];
    g.trajectories[order[k]].reward = RewardBreakdown{0, 0, r, r};
  }
}

Outcome rapo_grpo_reduction() {
  std::mt19937_64 gen(4242);
  int groups = 0;
  int aligned_groups = 0;
  int alpha_zero_groups = 0;
  int groups_with_pairs = 0;
  double worst = 0.0;
  for (int trial = 0; groups < 1000; ++trial) {
    auto b = support::random_toy_batch(gen, 0.3, 2, 6);
    rapo::RapoConfig rapo_cfg;
    const bool use_alpha_zero = trial % 2 == 1;
    if (use_alpha_zero) {
      rapo_cfg.alpha = 0.0;
      alpha_zero_groups += 2;
    } else {
      for (auto& g : b.groups) align_rewards(g);
      aligned_groups += 2;
    }
    for (const auto& g : b.groups) {
      rapo::PairCounts counts;
      rapo::advantage_records(g, rapo_cfg, &counts);
      groups_with_pairs += counts.pairs > 0;
    }
    rapo::RapoConfig grpo_cfg = rapo_cfg;
    grpo_cfg.mode = rapo::Mode::GRPO;
    const lab::BoundPolicy bound(b.policy, b.features);
    const auto a = rapo::rapo_gradient(b.groups, bound, rapo_cfg);
    const auto c = rapo::rapo_gradient(b.groups, bound, grpo_cfg);
    worst = std::max(worst, std::abs(a.loss.objective_value - c.loss.objective_value));
    worst = std::max(worst, (a.gradient - c.gradient).cwiseAbs().maxCoeff());
    groups += static_cast<int>(b.groups.size());
  }
  return {worst <= kReductionTol && groups_with_pairs > groups / 2,
          fmt("%d groups (%d aligned, %d with alpha=0, %d with ranked pairs), max difference "
              "%.3g",
              groups, aligned_groups, alpha_zero_groups, groups_with_pairs, worst)};
}

Outcome gradient_check() {
  std::mt19937_64 gen(9001);
  const rapo::RapoConfig cfg;
  int batches = 0;
  int with_clipping = 0;
  int with_gamma = 0;
  int nontrivial = 0;
  double worst = 0.0;
  for (; batches < 120; ++batches) {
    auto b = support::random_toy_batch(gen, batches % 3 == 0 ? 0.05 : 0.5);
    const lab::BoundPolicy bound(b.policy, b.features);
    const auto analytic = rapo::rapo_gradient(b.groups, bound, cfg);
    const auto numeric = support::finite_difference(b, cfg, kFdStep);
    worst = std::max(worst, support::relative_error(analytic.gradient, numeric));
    with_clipping += analytic.loss.clipped_fraction > 0.0;
    with_gamma += analytic.loss.mean_gamma > 1.0;
    nontrivial += analytic.gradient.norm() > 1e-5;
  }
  return {worst < kFdRelTol && with_clipping > 0 && with_gamma > 0 && nontrivial >= 100,
          fmt("%d batches (%d with gradient norm above 1e-5), %d with clipped tokens, %d with "
              "gamma > 1, max relative error %.3g",
              batches, nontrivial, with_clipping, with_gamma, worst)};
}

Outcome advantage_properties() {
  const rapo::RapoConfig cfg;
  auto group_of = [](const std::vector<double>& rewards, const std::vector<double>& conf) {
    RolloutGroup g;
    g.query_id = "q";
    for (std::size_t k = 0; k < rewards.size(); ++k)
      g.trajectories.push_back(support::scored("q", rewards[k], {conf[k], conf[k] - 0.1}));
    return g;
  };

  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 10);
  bool zero_ok = true;
  for (int k = 0; k < 200; ++k) {
    const int n = size(gen);
    const double r = unit(gen) * 3.0;
    std::vector<double> conf(n);
    for (auto& c : conf) c = -3.0 * unit(gen);
    for (const auto& rec : rapo::advantage_records(group_of(std::vector<double>(n, r), conf), cfg))
      zero_ok = zero_ok && rec.weighted_advantage == 0.0 && rec.base_advantage == 0.0;
  }

  const auto recs = rapo::advantage_records(group_of({1, 1, 0, 0}, {-1, -1, -1, -1}), cfg);
  const double expected[] = {1, 1, -1, -1};
  double worst_example = 0.0;
  for (int k = 0; k < 4; ++k)
    worst_example = std::max(worst_example, std::abs(recs[k].base_advantage - expected[k]));

  double min_gamma = 1e300;
  double max_gamma = -1e300;
  int groups = 0;
  for (; groups < 10000; ++groups) {
    const int n = size(gen);
    std::vector<double> rewards(n), conf(n);
    for (auto& r : rewards) r = std::floor(unit(gen) * 4.0) * 0.5;
    for (auto& c : conf) c = -3.0 * unit(gen);
    for (double g : rapo::trajectory_gammas(group_of(rewards, conf), cfg)) {
      min_gamma = std::min(min_gamma, g);
      max_gamma = std::max(max_gamma, g);
    }
  }
  const bool gamma_ok = min_gamma >= 1.0 && max_gamma <= 1.0 + cfg.alpha;
  return {zero_ok && worst_example <= 1e-6 && gamma_ok,
          fmt("zero-variance groups %s, [1,1,0,0] error %.3g, gamma range [%.4f, %.4f] over %d "
              "groups",
              zero_ok ? "all zero" : "NONZERO", worst_example, min_gamma, max_gamma, groups)};
}

double tail_tool_ratio(const lab::TrainResult& r) {
  const std::size_t n = r.curve.size();
  const std::size_t from = n > kToolWindow ? n - kToolWindow : 0;
  double sum = 0.0;
  for (std::size_t k = from; k < n; ++k) sum += r.curve[k].tool_calls_ratio;
  return sum / static_cast<double>(n - from);
}

lab::ComparisonReport comparison;
std::vector<lab::TrainResult> ablation;

Outcome directional_training() {
  lab::TrainRunConfig cfg;
  comparison = lab::compare_modes(cfg, kSeeds);
  int ahead = 0;
  double min_acc = 1.0;
  for (const auto& s : comparison.seeds) {
    ahead += s.auc_rapo >= s.auc_grpo;
    min_acc = std::min({min_acc, s.rapo.final_greedy_accuracy, s.grpo.final_greedy_accuracy});
  }
  return {ahead >= kSeedsRapoAhead && min_acc >= kAccuracyTarget,
          fmt("RAPO AUC >= GRPO AUC in %d/%d seeds, lowest final oracle accuracy %.3f", ahead,
              kSeeds, min_acc)};
}

Outcome tool_dynamics() {
  if (comparison.seeds.empty()) return {false, "training runs unavailable"};
  lab::TrainRunConfig cfg;
  cfg.reward.enable_tool_reward = false;
  std::vector<std::future<lab::TrainResult>> jobs;
  for (const auto& s : comparison.seeds) {
    auto run = cfg;
    run.seed = s.seed;
    jobs.push_back(std::async(std::launch::async, [run] { return lab::train(run); }));
  }
  double min_enabled = 1.0;
  int lower = 0;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto off = jobs[k].get();
    const auto& s = comparison.seeds[k];
    min_enabled = std::min({min_enabled, tail_tool_ratio(s.rapo), tail_tool_ratio(s.grpo)});
    lower += tail_tool_ratio(off) < tail_tool_ratio(s.rapo);
  }
  return {min_enabled >= kToolRatioTarget && lower >= kSeedsAblationLower,
          fmt("lowest final-%d tool ratio with tool reward %.4f, lower without it in %d/%d seeds",
              kToolWindow, min_enabled, lower, kSeeds)};
}

std::string action(const std::string& code) {
  return "<think>check the table</think>\n```python\n" + code + "\n```";
}

Outcome episode_cap_and_replay() {
  const auto race_task = load_dataset(kFixtures + "/race_dataset.jsonl").front();
  std::vector<agent::ScriptedResponse> script;
  for (const char* code : {"print(len(rows))", "print(header)", "print(rows[0])"}) {
    const std::string text = action(code);
    script.push_back({text, agent::replay_tokens(text)});
  }
  const std::string fin = "<think>done</think>\n<answer>{\"answer\": \"3\"}</answer>";
  script.push_back({fin, agent::replay_tokens(fin)});
  agent::ScriptedBackend capped({{race_task.id, script}});
  agent::MockExecutor exec;
  agent::EpisodeConfig cfg;
  cfg.max_turns = 3;
  const auto t = agent::run_episode(race_task, capped, exec, cfg);

  auto replay =
      agent::ScriptedBackend::from_jsonl(read_file(kFixtures + "/race_script.jsonl"));
  const auto race = agent::run_episode(race_task, replay, exec, {});
  const std::string answer = race.final_answer.value_or("<none>");
  const int em = eval::exact_match(answer, race_task.gold);
  const bool normalized =
      race.final_answer && eval::normalize(answer) == eval::normalize("192");
  return {t.n_tool_turns == 3 && em == 1 && normalized,
          fmt("capped episode made %d tool turns; replay answered \"%s\" with exact match %d",
              t.n_tool_turns, answer.c_str(), em)};
}

Outcome four_task_metrics() {
  const auto dataset = load_dataset(kFixtures + "/four_tasks_dataset.jsonl");
  auto backend =
      agent::ScriptedBackend::from_jsonl(read_file(kFixtures + "/four_tasks_script.jsonl"));
  agent::MockExecutor exec;
  const auto batch = agent::batch_run(dataset, backend, exec, {}, 1);
  const auto& m = batch.metrics;
  const bool ok = m.tool_calls_ratio == 0.75 && m.pass_ratio && *m.pass_ratio == 2.0 / 3.0;
  return {ok, fmt("tool_calls_ratio %.17g, pass_ratio %s", m.tool_calls_ratio,
                  m.pass_ratio ? fmt("%.17g", *m.pass_ratio).c_str() : "undefined")};
}

}  // namespace

int main() {
  criterion("reward closed forms", 1, reward_closed_forms);
  criterion("RAPO reduces to GRPO", 10, rapo_grpo_reduction);
  criterion("analytic gradient matches finite differences", 30, gradient_check);
  criterion("advantage properties", 10, advantage_properties);
  criterion("RAPO vs GRPO training direction", 120, directional_training);
  criterion("tool-call dynamics and ablation", 120, tool_dynamics);
  criterion("episode cap and scripted replay", 5, episode_cap_and_replay);
  criterion("batch metrics on the four-task fixture", 5, four_task_metrics);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
