#include "tabagent/core/types.hpp"

#include <algorithm>
#include <cctype>

#include "tabagent/core/errors.hpp"

namespace tabagent {

namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::vector<std::string> table_violations(const Table& table) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (blank(table.header[c]))
      out.push_back("header column " + std::to_string(c) + " is empty");
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      out.push_back("row " + std::to_string(r) + " has " +
                    std::to_string(table.rows[r].size()) +
                    " cells, header has " +
                    std::to_string(table.header.size()));
    }
  }
  return out;
}

std::vector<std::string> task_violations(const TableTask& task) {
  auto out = table_violations(task.table);
  if (task.gold.empty()) out.push_back("gold answer list is empty");
  if (task.kind == TaskKind::FactVerification) {
    if (task.gold.size() != 1 || (task.gold[0] != "1" && task.gold[0] != "0"))
      out.push_back("fact verification gold must be a single \"1\" or \"0\"");
  }
  return out;
}

std::vector<std::string> trajectory_violations(const Trajectory& traj) {
  std::vector<std::string> out;
  int with_action = 0;
  for (std::size_t k = 0; k < traj.turns.size(); ++k) {
    const auto& turn = traj.turns[k];
    if (turn.action) {
      ++with_action;
      if (!turn.observation)
        out.push_back("turn " + std::to_string(k) +
                      " has an action but no observation");
    }
  }
  if (traj.n_tool_turns < 0) out.push_back("n_tool_turns is negative");
  if (traj.n_tool_turns != with_action) {
    out.push_back("n_tool_turns=" + std::to_string(traj.n_tool_turns) +
                  " but " + std::to_string(with_action) +
                  " turns carry an action");
  }
  if (traj.any_tool_success && traj.n_tool_turns < 1)
    out.push_back("any_tool_success is set but n_tool_turns is 0");
  if (traj.complete && traj.tokens.empty())
    out.push_back("completed trajectory has no tokens");
  for (std::size_t t = 0; t < traj.tokens.size(); ++t) {
    if (!(traj.tokens[t].logprob_old <= 0.0)) {
      out.push_back("token " + std::to_string(t) +
                    " has logprob_old > 0 or non-finite");
      break;
    }
  }
  if (traj.reward) {
    const auto& r = *traj.reward;
    if (r.total != r.r_format + r.r_acc + r.r_tool)
      out.push_back("reward total differs from the sum of its components");
  }
  return out;
}

std::string to_string(TaskKind kind) {
  return kind == TaskKind::QuestionAnswering ? "qa" : "fact_verification";
}

std::string to_string(ExecStatus status) {
  switch (status) {
    case ExecStatus::Ok:
      return "ok";
    case ExecStatus::Error:
      return "error";
    case ExecStatus::Timeout:
      return "timeout";
  }
  return "error";
}

TaskKind parse_task_kind(const std::string& s) {
  if (s == "qa" || s == "QuestionAnswering") return TaskKind::QuestionAnswering;
  if (s == "fact_verification" || s == "FactVerification")
    return TaskKind::FactVerification;
  throw FormatError("unknown task kind '" + s + "'");
}

ExecStatus parse_exec_status(const std::string& s) {
  if (s == "ok") return ExecStatus::Ok;
  if (s == "error") return ExecStatus::Error;
  if (s == "timeout") return ExecStatus::Timeout;
  throw FormatError("unknown exec status '" + s + "'");
}

ExecTable exec_table(const Table& table) {
  return ExecTable{table.header, table.rows};
}

}  // namespace tabagent
