#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "tabagent/agent/backend.hpp"
#include "tabagent/agent/episode.hpp"
#include "tabagent/agent/executor.hpp"
#include "tabagent/config.hpp"
#include "tabagent/core/errors.hpp"
#include "tabagent/core/serialization.hpp"
#include "tabagent/eval/metrics.hpp"
#include "tabagent/eval/report.hpp"
#include "tabagent/lab/trainer.hpp"
#include "tabagent/reward/reward.hpp"

namespace fs = std::filesystem;
using namespace tabagent;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  fs::path out_dir = ".";
};

RunConfig resolve(const Globals& g) {
  RunConfig cfg = g.config.empty() ? RunConfig{} : load_config(g.config);
  if (g.seed) cfg.train.seed = *g.seed;
  return cfg;
}

fs::path under(const Globals& g, const fs::path& p) { return p.is_absolute() ? p : g.out_dir / p; }

int cmd_train(const Globals& g, const std::string& mode, std::optional<int> steps,
              std::optional<bool> tool_reward) {
  RunConfig cfg = resolve(g);
  if (!mode.empty()) cfg.train.rapo.mode = rapo::parse_mode(mode);
  if (steps) cfg.train.steps = *steps;
  if (tool_reward) cfg.train.reward.enable_tool_reward = *tool_reward;
  const auto result = lab::train(cfg.train);
  const std::string stem = rapo::to_string(result.mode) + "_seed" + std::to_string(result.seed);
  write_file(under(g, stem + ".csv"), lab::metrics_csv(result));
  Json theta = Json::array();
  for (Eigen::Index k = 0; k < result.theta.size(); ++k) theta.push_back(result.theta(k));
  write_file(under(g, stem + "_theta.json"),
             Json{{"theta", theta}, {"final_greedy_accuracy", result.final_greedy_accuracy}}.dump() +
                 "\n");
  std::printf("%s: %zu steps, final greedy accuracy %.4f\n", stem.c_str(), result.curve.size(),
              result.final_greedy_accuracy);
  return 0;
}

int cmd_compare(const Globals& g, int n_seeds) {
  RunConfig cfg = resolve(g);
  const auto report = lab::compare_modes(cfg.train, n_seeds, cfg.parallelism);
  for (const auto& s : report.seeds) {
    write_file(under(g, "rapo_seed" + std::to_string(s.seed) + ".csv"), lab::metrics_csv(s.rapo));
    write_file(under(g, "grpo_seed" + std::to_string(s.seed) + ".csv"), lab::metrics_csv(s.grpo));
  }
  const std::string summary = lab::comparison_csv(report);
  write_file(under(g, "comparison.csv"), summary);
  std::cout << summary << "rapo_auc_ge_grpo_fraction," << report.fraction_rapo_ge << "\n";
  return 0;
}

int cmd_eval(const Globals& g, const std::string& dataset, const std::string& backend_kind,
             const std::string& fixture, const std::string& executor_kind,
             std::optional<int> max_turns, std::optional<double> temperature,
             const std::string& out, std::optional<int> parallelism) {
  RunConfig cfg = resolve(g);
  if (max_turns) cfg.episode.max_turns = *max_turns;
  if (temperature) cfg.episode.temperature = *temperature;
  if (parallelism) cfg.parallelism = *parallelism;
  agent::validate(cfg.episode);
  const auto tasks = load_dataset(dataset);

  std::unique_ptr<agent::PolicyBackend> backend;
  if (backend_kind == "scripted") {
    if (fixture.empty()) throw ConfigError("--backend scripted needs --fixture");
    backend = std::make_unique<agent::ScriptedBackend>(
        agent::ScriptedBackend::from_jsonl(read_file(fixture)));
  } else {
    backend = std::make_unique<agent::HttpBackend>(cfg.backend);
  }
  std::unique_ptr<agent::CodeExecutor> executor;
  if (executor_kind == "sandbox")
    executor = std::make_unique<agent::SandboxExecutor>(cfg.sandbox);
  else
    executor = std::make_unique<agent::MockExecutor>();

  const auto batch = agent::batch_run(tasks, *backend, *executor, cfg.episode, cfg.parallelism);
  write_file(under(g, out), dump_trajectories(batch.trajectories));
  for (const auto& f : batch.failures) std::cerr << "failed: " << f << "\n";
  std::cout << eval::to_json(batch.metrics).dump(2) << "\n";
  return 0;
}

int cmd_reward(const Globals& g, const std::string& dataset, const std::string& trajectories,
               std::int64_t step, const std::string& out) {
  RunConfig cfg = resolve(g);
  const auto tasks = load_dataset(dataset);
  std::map<std::string, const TableTask*> by_id;
  for (const auto& t : tasks) by_id[t.id] = &t;
  auto trajs = load_trajectories(trajectories);
  for (auto& traj : trajs) {
    auto it = by_id.find(traj.task_id);
    if (it == by_id.end()) throw UnknownTaskId(traj.task_id);
    traj.reward = reward::score(traj, *it->second, step, cfg.train.reward);
  }
  write_file(under(g, out), dump_trajectories(trajs));
  std::printf("scored %zu trajectories\n", trajs.size());
  return 0;
}

int cmd_report(const Globals& g, const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  const auto rep = eval::report(paths);
  write_file(under(g, out), eval::dump_csv(rep.merged));
  std::cout << rep.overview;
  return 0;
}

int cmd_generate(const Globals& g, int n_tasks, const std::string& out) {
  RunConfig cfg = resolve(g);
  std::vector<TableTask> tasks;
  for (auto& t : lab::default_suite(n_tasks, cfg.train.suite_seed, cfg.train.lab.shape))
    tasks.push_back(std::move(t.task));
  write_file(under(g, out), dump_dataset(tasks));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabagent: tool-augmented table reasoning trainer and evaluator"};
  app.require_subcommand(1);
  Globals g;
  std::string out_dir;
  app.add_option("--config", g.config, "JSON run config")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "override the run seed");
  app.add_option("--out-dir", out_dir, "directory for outputs");

  std::string mode;
  std::optional<int> steps;
  std::optional<bool> tool_reward;
  auto* train = app.add_subcommand("train", "train the toy policy on the synthetic suite");
  train->add_option("--mode", mode, "rapo or grpo");
  train->add_option("--steps", steps, "number of training steps");
  train->add_option("--tool-reward", tool_reward, "enable the tool reward (true/false)");

  int n_seeds = 10;
  auto* compare = app.add_subcommand("compare", "matched-seed RAPO vs GRPO runs");
  compare->add_option("--seeds", n_seeds, "number of seeds")->check(CLI::PositiveNumber);

  std::string dataset, backend = "scripted", fixture, executor = "mock", out = "trajectories.jsonl";
  std::optional<int> max_turns, parallelism;
  std::optional<double> temperature;
  auto* eval = app.add_subcommand("eval", "run the agent over a dataset");
  eval->add_option("--dataset", dataset, "dataset JSONL")->required();
  eval->add_option("--backend", backend)->check(CLI::IsMember({"scripted", "http"}));
  eval->add_option("--fixture", fixture, "scripted responses JSONL");
  eval->add_option("--executor", executor)->check(CLI::IsMember({"mock", "sandbox"}));
  eval->add_option("--max-turns", max_turns);
  eval->add_option("--temperature", temperature);
  eval->add_option("--parallelism", parallelism);
  eval->add_option("--out", out, "trajectory JSONL output");

  std::string trajectories, scored_out = "scored.jsonl";
  std::int64_t step = 0;
  auto* rew = app.add_subcommand("reward", "score trajectories against a dataset");
  rew->add_option("--dataset", dataset)->required();
  rew->add_option("--trajectories", trajectories)->required();
  rew->add_option("--step", step, "global training step")->check(CLI::NonNegativeNumber);
  rew->add_option("--out", scored_out);

  std::vector<std::string> inputs;
  std::string report_out = "report.csv";
  auto* rep = app.add_subcommand("report", "merge metrics CSVs");
  rep->add_option("inputs", inputs, "metrics CSV files")->required();
  rep->add_option("--out", report_out);

  int n_tasks = 50;
  std::string gen_out = "synthetic.jsonl";
  auto* gen = app.add_subcommand("generate", "write the synthetic suite as a dataset JSONL");
  gen->add_option("--tasks", n_tasks)->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out);

  CLI11_PARSE(app, argc, argv);
  if (!out_dir.empty()) g.out_dir = out_dir;

  try {
    if (*train) return cmd_train(g, mode, steps, tool_reward);
    if (*compare) return cmd_compare(g, n_seeds);
    if (*eval)
      return cmd_eval(g, dataset, backend, fixture, executor, max_turns, temperature, out,
                      parallelism);
    if (*rew) return cmd_reward(g, dataset, trajectories, step, scored_out);
    if (*rep) return cmd_report(g, inputs, report_out);
    if (*gen) return cmd_generate(g, n_tasks, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
