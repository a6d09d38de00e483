#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tabagent {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::optional<std::string> caption;

  std::size_t num_columns() const { return header.size(); }
  std::size_t num_rows() const { return rows.size(); }

  friend bool operator==(const Table&, const Table&) = default;
};

enum class TaskKind { QuestionAnswering, FactVerification };

struct TableTask {
  std::string id;
  Table table;
  std::string question;
  std::vector<std::string> gold;
  TaskKind kind = TaskKind::QuestionAnswering;

  friend bool operator==(const TableTask&, const TableTask&) = default;
};

struct TokenRecord {
  std::int64_t token_id = 0;
  double logprob_old = 0.0;  // natural log, <= 0

  friend bool operator==(const TokenRecord&, const TokenRecord&) = default;
};

enum class ExecStatus { Ok, Error, Timeout };

// Table payload carried by every execution request. Sessions are stateless,
// so the table travels with each call.
struct ExecTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const ExecTable&, const ExecTable&) = default;
};

struct ExecRequest {
  std::string id;
  std::string code;
  ExecTable table;
  std::int64_t timeout_ms = 5000;
  std::int64_t max_output_bytes = 65536;

  friend bool operator==(const ExecRequest&, const ExecRequest&) = default;
};

struct ExecResult {
  std::string id;
  ExecStatus status = ExecStatus::Error;
  std::string out;  // "stdout" on the wire
  std::string err;  // "stderr" on the wire
  std::int64_t duration_ms = 0;

  friend bool operator==(const ExecResult&, const ExecResult&) = default;
};

// A tool call counts toward I_success only when it ran cleanly and printed
// something the agent can observe.
inline bool is_successful_execution(const ExecResult& r) {
  return r.status == ExecStatus::Ok && !r.out.empty();
}

struct Turn {
  std::string response;  // raw model message for this turn
  std::string plan;
  std::optional<std::string> action;
  std::optional<ExecResult> observation;
  std::string reflection;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct RewardBreakdown {
  double r_format = 0.0;
  double r_acc = 0.0;
  double r_tool = 0.0;
  double total = 0.0;

  friend bool operator==(const RewardBreakdown&,
                         const RewardBreakdown&) = default;
};

struct Trajectory {
  std::string task_id;
  std::vector<Turn> turns;
  std::vector<TokenRecord> tokens;
  std::optional<std::string> final_answer;
  bool format_valid = false;
  int n_tool_turns = 0;
  bool any_tool_success = false;
  std::optional<RewardBreakdown> reward;
  bool complete = true;
  std::optional<std::string> error;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct RolloutGroup {
  std::string query_id;
  std::vector<Trajectory> trajectories;
  std::int64_t step = 0;

  std::size_t size() const { return trajectories.size(); }

  friend bool operator==(const RolloutGroup&, const RolloutGroup&) = default;
};

std::vector<std::string> table_violations(const Table& table);
std::vector<std::string> task_violations(const TableTask& task);
std::vector<std::string> trajectory_violations(const Trajectory& traj);

std::string to_string(TaskKind kind);
std::string to_string(ExecStatus status);
TaskKind parse_task_kind(const std::string& s);
ExecStatus parse_exec_status(const std::string& s);

ExecTable exec_table(const Table& table);

}  // namespace tabagent
