#include "tabagent/agent/episode.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "tabagent/agent/parse.hpp"
#include "tabagent/core/errors.hpp"
#include "tabagent/core/response_format.hpp"
#include "tabagent/reward/reward.hpp"

namespace tabagent::agent {

void validate(const EpisodeConfig& cfg) {
  if (cfg.max_turns < 1) throw ConfigError("max_turns must be >= 1");
  if (!(cfg.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (cfg.max_response_tokens_per_turn < 1)
    throw ConfigError("max_response_tokens_per_turn must be >= 1");
  if (cfg.observation_truncate_bytes < 0)
    throw ConfigError("observation_truncate_bytes must be >= 0");
  if (cfg.exec_timeout_ms < 1) throw ConfigError("exec_timeout_ms must be >= 1");
}

std::string observation_message(const ExecResult& result) {
  std::string body;
  switch (result.status) {
    case ExecStatus::Ok:
      body = result.out;
      break;
    case ExecStatus::Error:
      body = result.out + "Execution failed:\n" + result.err;
      break;
    case ExecStatus::Timeout:
      body = result.out + "Execution timed out.\n" + result.err;
      break;
  }
  if (!body.empty() && body.back() != '\n') body += '\n';
  return "<observation>\n" + body + "</observation>";
}

Trajectory run_episode(const TableTask& task, PolicyBackend& backend,
                       CodeExecutor& executor, const EpisodeConfig& cfg) {
  Trajectory traj;
  traj.task_id = task.id;
  const SamplingParams params{cfg.temperature, cfg.max_response_tokens_per_turn};
  try {
    const auto prompt = render_messages(cfg.prompt, task);
    std::vector<Message> history = {{"system", prompt.system}, {"user", prompt.user}};
    auto session = backend.start_episode(task);
    std::unique_ptr<ExecutorSession> exec;
    bool answer_only = false;

    while (true) {
      BackendResponse response = session->complete(history, params);
      history.push_back({"assistant", response.text});
      traj.tokens.insert(traj.tokens.end(), response.tokens.begin(), response.tokens.end());

      ParsedStep step = parse_step(response.text);
      Turn turn;
      turn.response = response.text;
      turn.plan = step.think_text.value_or("");
      if (!traj.turns.empty() && traj.turns.back().observation)
        traj.turns.back().reflection = turn.plan;

      if (step.kind == ParsedStep::Kind::Final) {
        traj.final_answer = answer_text(step.answer);
        traj.turns.push_back(std::move(turn));
        break;
      }
      if (step.kind == ParsedStep::Kind::Malformed || answer_only) {
        traj.turns.push_back(std::move(turn));
        break;
      }

      if (!exec) exec = executor.open_session();
      ExecRequest request;
      request.id = task.id + "#" + std::to_string(traj.turns.size());
      request.code = step.code;
      request.table = exec_table(task.table);
      request.timeout_ms = cfg.exec_timeout_ms;
      request.max_output_bytes = cfg.max_output_bytes;
      ExecResult result = exec->execute(request);
      result.out = truncate_bytes(std::move(result.out), cfg.observation_truncate_bytes);
      result.err = truncate_bytes(std::move(result.err), cfg.observation_truncate_bytes);

      ++traj.n_tool_turns;
      traj.any_tool_success = traj.any_tool_success || is_successful_execution(result);
      std::string observation = observation_message(result);
      turn.action = std::move(step.code);
      turn.observation = std::move(result);
      traj.turns.push_back(std::move(turn));

      if (traj.n_tool_turns >= cfg.max_turns) {
        observation += "\n" + std::string(kAnswerNowNotice);
        answer_only = true;
      }
      history.push_back({"user", std::move(observation)});
    }
  } catch (const BackendUnavailable& e) {
    traj.complete = false;
    traj.error = e.what();
  } catch (const ExecutorUnavailable& e) {
    traj.complete = false;
    traj.error = e.what();
  } catch (const TableTooLarge& e) {
    traj.complete = false;
    traj.error = e.what();
  }
  traj.format_valid = traj.complete && reward::format_reward(traj) == 1.0;
  return traj;
}

BatchResult batch_run(const std::vector<TableTask>& dataset, PolicyBackend& backend,
                      CodeExecutor& executor, const EpisodeConfig& cfg, int parallelism) {
  if (dataset.empty()) throw std::invalid_argument("batch_run needs a non-empty dataset");
  validate(cfg);
  std::vector<Trajectory> results(dataset.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < dataset.size(); k = next++) {
      try {
        results[k] = run_episode(dataset[k], backend, executor, cfg);
      } catch (const std::exception& e) {
        Trajectory failed;
        failed.task_id = dataset[k].id;
        failed.complete = false;
        failed.error = e.what();
        results[k] = std::move(failed);
      }
    }
  };
  const int n_workers =
      std::clamp(parallelism, 1, static_cast<int>(dataset.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  std::stable_sort(results.begin(), results.end(),
                   [](const Trajectory& a, const Trajectory& b) { return a.task_id < b.task_id; });
  BatchResult batch;
  for (const auto& traj : results)
    if (traj.error) batch.failures.push_back(traj.task_id + ": " + *traj.error);
  batch.metrics = eval::summarize(results, dataset);
  batch.trajectories = std::move(results);
  return batch;
}

}  // namespace tabagent::agent
