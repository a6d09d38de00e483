#include "tabagent/eval/metrics.hpp"

#include <map>
#include <stdexcept>

#include "tabagent/core/errors.hpp"
#include "tabagent/eval/normalize.hpp"

namespace tabagent::eval {

ExecutionCounts count_executions(const Trajectory& traj) {
  ExecutionCounts c;
  for (const auto& turn : traj.turns) {
    if (!turn.action || !turn.observation) continue;
    ++c.total;
    if (turn.observation->status == ExecStatus::Ok) ++c.ok;
  }
  return c;
}

MetricsSummary summarize(const std::vector<Trajectory>& trajectories,
                         const std::vector<TableTask>& dataset) {
  if (trajectories.empty())
    throw std::invalid_argument("summarize needs at least one trajectory");
  std::map<std::string, const TableTask*> by_id;
  for (const auto& task : dataset) by_id[task.id] = &task;

  MetricsSummary m;
  int qa_hits = 0;
  int fact_hits = 0;
  int with_tools = 0;
  long turns = 0;
  for (const auto& traj : trajectories) {
    auto it = by_id.find(traj.task_id);
    if (it == by_id.end())
      throw UnknownTaskId("trajectory references unknown task '" + traj.task_id + "'");
    const TableTask& task = *it->second;
    const bool hit = answer_matches(traj.final_answer, task);
    if (task.kind == TaskKind::QuestionAnswering) {
      ++m.n_qa;
      qa_hits += hit;
    } else {
      ++m.n_fact;
      fact_hits += hit;
    }
    with_tools += traj.n_tool_turns >= 1;
    turns += traj.n_tool_turns;
    auto exec = count_executions(traj);
    m.n_executions += exec.total;
    m.n_ok_executions += exec.ok;
  }
  const double n = static_cast<double>(trajectories.size());
  m.n_tasks = static_cast<int>(trajectories.size());
  m.exact_match = m.n_qa ? static_cast<double>(qa_hits) / m.n_qa : 0.0;
  m.accuracy = m.n_fact ? static_cast<double>(fact_hits) / m.n_fact : 0.0;
  m.tool_calls_ratio = with_tools / n;
  m.mean_turns = static_cast<double>(turns) / n;
  if (m.n_executions > 0)
    m.pass_ratio = static_cast<double>(m.n_ok_executions) / m.n_executions;
  return m;
}

nlohmann::json to_json(const MetricsSummary& m) {
  nlohmann::json j = {{"n_tasks", m.n_tasks},
                      {"n_qa", m.n_qa},
                      {"n_fact", m.n_fact},
                      {"exact_match", m.exact_match},
                      {"accuracy", m.accuracy},
                      {"tool_calls_ratio", m.tool_calls_ratio},
                      {"mean_turns", m.mean_turns},
                      {"n_executions", m.n_executions},
                      {"n_ok_executions", m.n_ok_executions}};
  j["pass_ratio"] = m.pass_ratio ? nlohmann::json(*m.pass_ratio) : nlohmann::json();
  return j;
}

}  // namespace tabagent::eval
