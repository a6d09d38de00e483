#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "tabagent/core/types.hpp"

namespace tabagent {

using Json = nlohmann::json;

void to_json(Json& j, const Table& v);
void from_json(const Json& j, Table& v);
void to_json(Json& j, const TableTask& v);
void from_json(const Json& j, TableTask& v);
void to_json(Json& j, const TokenRecord& v);
void from_json(const Json& j, TokenRecord& v);
void to_json(Json& j, const ExecTable& v);
void from_json(const Json& j, ExecTable& v);
void to_json(Json& j, const ExecRequest& v);
void from_json(const Json& j, ExecRequest& v);
void to_json(Json& j, const ExecResult& v);
void from_json(const Json& j, ExecResult& v);
void to_json(Json& j, const Turn& v);
void from_json(const Json& j, Turn& v);
void to_json(Json& j, const RewardBreakdown& v);
void from_json(const Json& j, RewardBreakdown& v);
void to_json(Json& j, const Trajectory& v);
void from_json(const Json& j, Trajectory& v);

// JSONL helpers. Readers throw FormatError with the 1-based line number on
// malformed input; blank lines are skipped.
std::vector<TableTask> parse_dataset(const std::string& jsonl);
std::vector<Trajectory> parse_trajectories(const std::string& jsonl);
std::string dump_dataset(const std::vector<TableTask>& tasks);
std::string dump_trajectories(const std::vector<Trajectory>& trajs);

std::vector<TableTask> load_dataset(const std::filesystem::path& path);
std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace tabagent
