#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "tabagent/core/types.hpp"

namespace tabagent::eval {

struct MetricsSummary {
  int n_tasks = 0;
  int n_qa = 0;
  int n_fact = 0;
  double exact_match = 0.0;       // over question-answering trajectories
  double accuracy = 0.0;          // over fact-verification trajectories
  double tool_calls_ratio = 0.0;  // trajectories with >= 1 tool turn
  std::optional<double> pass_ratio;  // ok executions / executions
  double mean_turns = 0.0;
  int n_executions = 0;
  int n_ok_executions = 0;
};

struct ExecutionCounts {
  int total = 0;
  int ok = 0;
};

ExecutionCounts count_executions(const Trajectory& traj);

// Throws std::invalid_argument for an empty input and UnknownTaskId when a
// trajectory references a task missing from the dataset.
MetricsSummary summarize(const std::vector<Trajectory>& trajectories,
                         const std::vector<TableTask>& dataset);

nlohmann::json to_json(const MetricsSummary& m);

}  // namespace tabagent::eval
