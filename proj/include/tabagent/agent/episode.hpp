#pragma once

#include <string>
#include <vector>

#include "tabagent/agent/backend.hpp"
#include "tabagent/agent/executor.hpp"
#include "tabagent/agent/prompt.hpp"
#include "tabagent/core/types.hpp"
#include "tabagent/eval/metrics.hpp"

namespace tabagent::agent {

struct EpisodeConfig {
  int max_turns = 3;
  double temperature = 1.0;
  int max_response_tokens_per_turn = 2048;
  std::int64_t observation_truncate_bytes = 4096;
  std::int64_t exec_timeout_ms = 5000;
  std::int64_t max_output_bytes = 65536;
  PromptTemplate prompt;
};

void validate(const EpisodeConfig& cfg);

// Appended to the last observation once the tool-turn budget is spent.
inline constexpr std::string_view kAnswerNowNotice =
    "Tool budget exhausted. Reply with your final answer in "
    "<answer>{\"answer\": ...}</answer> now.";

std::string observation_message(const ExecResult& result);

/// Runs one plan/act/observe/reflect episode. Ends on a final answer, on a
/// malformed response, or after `max_turns` executed actions followed by one
/// answer-only completion. Backend or executor outages end the episode with
/// `complete = false` and the diagnostic in `error`; they do not throw.
Trajectory run_episode(const TableTask& task, PolicyBackend& backend,
                       CodeExecutor& executor, const EpisodeConfig& cfg);

struct BatchResult {
  std::vector<Trajectory> trajectories;  // ordered by task id
  eval::MetricsSummary metrics;
  std::vector<std::string> failures;     // "task_id: diagnostic"
};

/// Runs every task on up to `parallelism` worker threads.
BatchResult batch_run(const std::vector<TableTask>& dataset,
                      PolicyBackend& backend, CodeExecutor& executor,
                      const EpisodeConfig& cfg, int parallelism = 1);

}  // namespace tabagent::agent
