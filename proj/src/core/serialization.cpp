#include "tabagent/core/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tabagent/core/errors.hpp"

namespace tabagent {

namespace {

template <typename T>
void get_optional(const Json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    out.reset();
  } else {
    out = it->template get<T>();
  }
}

template <typename T>
std::vector<T> parse_jsonl(const std::string& text) {
  std::vector<T> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line).get<T>());
    } catch (const Json::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
std::string dump_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) {
    out += Json(item).dump(-1, ' ', false, Json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

}  // namespace

void to_json(Json& j, const Table& v) {
  j = Json{{"header", v.header}, {"rows", v.rows}};
  if (v.caption) j["caption"] = *v.caption;
}

void from_json(const Json& j, Table& v) {
  j.at("header").get_to(v.header);
  j.at("rows").get_to(v.rows);
  get_optional(j, "caption", v.caption);
}

void to_json(Json& j, const TableTask& v) {
  j = Json{{"id", v.id},
           {"table", v.table},
           {"question", v.question},
           {"gold", v.gold},
           {"kind", to_string(v.kind)}};
}

void from_json(const Json& j, TableTask& v) {
  j.at("id").get_to(v.id);
  j.at("table").get_to(v.table);
  j.at("question").get_to(v.question);
  j.at("gold").get_to(v.gold);
  v.kind = parse_task_kind(j.value("kind", std::string("qa")));
}

void to_json(Json& j, const TokenRecord& v) {
  j = Json{{"token_id", v.token_id}, {"logprob_old", v.logprob_old}};
}

void from_json(const Json& j, TokenRecord& v) {
  j.at("token_id").get_to(v.token_id);
  const auto& lp = j.at("logprob_old");
  if (!lp.is_number()) throw FormatError("logprob_old must be a finite number");
  v.logprob_old = lp.get<double>();
  if (!std::isfinite(v.logprob_old))
    throw FormatError("logprob_old must be a finite number");
}

void to_json(Json& j, const ExecTable& v) {
  j = Json{{"header", v.header}, {"rows", v.rows}};
}

void from_json(const Json& j, ExecTable& v) {
  j.at("header").get_to(v.header);
  j.at("rows").get_to(v.rows);
}

void to_json(Json& j, const ExecRequest& v) {
  j = Json{{"id", v.id},
           {"code", v.code},
           {"table", v.table},
           {"timeout_ms", v.timeout_ms},
           {"max_output_bytes", v.max_output_bytes}};
}

void from_json(const Json& j, ExecRequest& v) {
  j.at("id").get_to(v.id);
  j.at("code").get_to(v.code);
  j.at("table").get_to(v.table);
  j.at("timeout_ms").get_to(v.timeout_ms);
  j.at("max_output_bytes").get_to(v.max_output_bytes);
}

void to_json(Json& j, const ExecResult& v) {
  j = Json{{"id", v.id},
           {"status", to_string(v.status)},
           {"stdout", v.out},
           {"stderr", v.err},
           {"duration_ms", v.duration_ms}};
}

void from_json(const Json& j, ExecResult& v) {
  j.at("id").get_to(v.id);
  v.status = parse_exec_status(j.at("status").get<std::string>());
  v.out = j.value("stdout", std::string());
  v.err = j.value("stderr", std::string());
  v.duration_ms = j.value("duration_ms", std::int64_t{0});
}

void to_json(Json& j, const Turn& v) {
  j = Json{{"response", v.response},
           {"plan", v.plan},
           {"reflection", v.reflection}};
  if (v.action) j["action"] = *v.action;
  if (v.observation) j["observation"] = *v.observation;
}

void from_json(const Json& j, Turn& v) {
  v.response = j.value("response", std::string());
  v.plan = j.value("plan", std::string());
  v.reflection = j.value("reflection", std::string());
  get_optional(j, "action", v.action);
  get_optional(j, "observation", v.observation);
}

void to_json(Json& j, const RewardBreakdown& v) {
  j = Json{{"r_format", v.r_format},
           {"r_acc", v.r_acc},
           {"r_tool", v.r_tool},
           {"total", v.total}};
}

void from_json(const Json& j, RewardBreakdown& v) {
  j.at("r_format").get_to(v.r_format);
  j.at("r_acc").get_to(v.r_acc);
  j.at("r_tool").get_to(v.r_tool);
  j.at("total").get_to(v.total);
}

void to_json(Json& j, const Trajectory& v) {
  j = Json{{"task_id", v.task_id},
           {"turns", v.turns},
           {"tokens", v.tokens},
           {"format_valid", v.format_valid},
           {"n_tool_turns", v.n_tool_turns},
           {"any_tool_success", v.any_tool_success},
           {"complete", v.complete}};
  if (v.final_answer) j["final_answer"] = *v.final_answer;
  if (v.reward) j["reward"] = *v.reward;
  if (v.error) j["error"] = *v.error;
}

void from_json(const Json& j, Trajectory& v) {
  j.at("task_id").get_to(v.task_id);
  v.turns = j.value("turns", std::vector<Turn>{});
  v.tokens = j.value("tokens", std::vector<TokenRecord>{});
  get_optional(j, "final_answer", v.final_answer);
  v.format_valid = j.value("format_valid", false);
  v.n_tool_turns = j.value("n_tool_turns", 0);
  v.any_tool_success = j.value("any_tool_success", false);
  get_optional(j, "reward", v.reward);
  v.complete = j.value("complete", true);
  get_optional(j, "error", v.error);
}

std::vector<TableTask> parse_dataset(const std::string& jsonl) {
  auto tasks = parse_jsonl<TableTask>(jsonl);
  for (const auto& task : tasks) {
    auto problems = task_violations(task);
    if (!problems.empty())
      throw FormatError("task '" + task.id + "': " + problems.front());
  }
  return tasks;
}

std::vector<Trajectory> parse_trajectories(const std::string& jsonl) {
  return parse_jsonl<Trajectory>(jsonl);
}

std::string dump_dataset(const std::vector<TableTask>& tasks) {
  return dump_jsonl(tasks);
}

std::string dump_trajectories(const std::vector<Trajectory>& trajs) {
  return dump_jsonl(trajs);
}

std::vector<TableTask> load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
  return parse_trajectories(read_file(path));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << content;
}

}  // namespace tabagent
