#include "tabagent/config.hpp"

#include <functional>
#include <map>

#include "tabagent/core/errors.hpp"

namespace tabagent {

namespace {

using Setter = std::function<void(RunConfig&, const Json&)>;

template <class T>
Setter field(T RunConfig::*part, auto member) {
  return [=](RunConfig& cfg, const Json& v) { v.get_to((cfg.*part).*member); };
}

const std::map<std::string, Setter>& setters() {
  using lab::TrainRunConfig;
  static const std::map<std::string, Setter> table = {
      // reward
      {"rho", [](RunConfig& c, const Json& v) { v.get_to(c.train.reward.rho); }},
      {"beta", [](RunConfig& c, const Json& v) { v.get_to(c.train.reward.beta); }},
      {"c_penalty", [](RunConfig& c, const Json& v) { v.get_to(c.train.reward.c_penalty); }},
      {"enable_tool_reward",
       [](RunConfig& c, const Json& v) { v.get_to(c.train.reward.enable_tool_reward); }},
      // rapo
      {"eps_low", [](RunConfig& c, const Json& v) { v.get_to(c.train.rapo.eps_low); }},
      {"eps_high", [](RunConfig& c, const Json& v) { v.get_to(c.train.rapo.eps_high); }},
      {"alpha", [](RunConfig& c, const Json& v) { v.get_to(c.train.rapo.alpha); }},
      {"std_epsilon", [](RunConfig& c, const Json& v) { v.get_to(c.train.rapo.std_epsilon); }},
      {"group_size", [](RunConfig& c, const Json& v) { v.get_to(c.train.rapo.group_size); }},
      {"mode",
       [](RunConfig& c, const Json& v) { c.train.rapo.mode = rapo::parse_mode(v.get<std::string>()); }},
      {"optimizer_mode",
       [](RunConfig& c, const Json& v) { c.train.rapo.mode = rapo::parse_mode(v.get<std::string>()); }},
      // training
      {"steps", field(&RunConfig::train, &TrainRunConfig::steps)},
      {"tasks_per_batch", field(&RunConfig::train, &TrainRunConfig::tasks_per_batch)},
      {"learning_rate", field(&RunConfig::train, &TrainRunConfig::learning_rate)},
      {"seed", field(&RunConfig::train, &TrainRunConfig::seed)},
      {"inner_updates", field(&RunConfig::train, &TrainRunConfig::inner_updates)},
      {"n_tasks", field(&RunConfig::train, &TrainRunConfig::n_tasks)},
      {"suite_seed", field(&RunConfig::train, &TrainRunConfig::suite_seed)},
      {"eval_seed", field(&RunConfig::train, &TrainRunConfig::eval_seed)},
      {"mental_accuracy", [](RunConfig& c, const Json& v) { v.get_to(c.train.lab.mental_accuracy); }},
      {"n_rows", [](RunConfig& c, const Json& v) { v.get_to(c.train.lab.shape.n_rows); }},
      {"n_cols", [](RunConfig& c, const Json& v) { v.get_to(c.train.lab.shape.n_cols); }},
      {"value_min", [](RunConfig& c, const Json& v) { v.get_to(c.train.lab.shape.value_min); }},
      {"value_max", [](RunConfig& c, const Json& v) { v.get_to(c.train.lab.shape.value_max); }},
      {"temperature",
       [](RunConfig& c, const Json& v) {
         v.get_to(c.train.temperature);
         v.get_to(c.episode.temperature);
       }},
      // episode
      {"max_turns", field(&RunConfig::episode, &agent::EpisodeConfig::max_turns)},
      {"max_response_tokens_per_turn",
       field(&RunConfig::episode, &agent::EpisodeConfig::max_response_tokens_per_turn)},
      {"observation_truncate_bytes",
       field(&RunConfig::episode, &agent::EpisodeConfig::observation_truncate_bytes)},
      {"exec_timeout_ms", field(&RunConfig::episode, &agent::EpisodeConfig::exec_timeout_ms)},
      {"max_output_bytes", field(&RunConfig::episode, &agent::EpisodeConfig::max_output_bytes)},
      {"instruction_block",
       [](RunConfig& c, const Json& v) { v.get_to(c.episode.prompt.instruction_block); }},
      {"max_table_bytes",
       [](RunConfig& c, const Json& v) { v.get_to(c.episode.prompt.max_table_bytes); }},
      // backend
      {"url", field(&RunConfig::backend, &agent::HttpBackendConfig::url)},
      {"model", field(&RunConfig::backend, &agent::HttpBackendConfig::model)},
      {"api_key_env", field(&RunConfig::backend, &agent::HttpBackendConfig::api_key_env)},
      {"max_retries", field(&RunConfig::backend, &agent::HttpBackendConfig::max_retries)},
      {"retry_backoff_ms", field(&RunConfig::backend, &agent::HttpBackendConfig::retry_backoff_ms)},
      {"timeout_s", field(&RunConfig::backend, &agent::HttpBackendConfig::timeout_s)},
      // sandbox
      {"sandbox_command", field(&RunConfig::sandbox, &agent::SandboxConfig::command)},
      {"grace_ms", field(&RunConfig::sandbox, &agent::SandboxConfig::grace_ms)},
      {"parallelism", [](RunConfig& c, const Json& v) { v.get_to(c.parallelism); }},
  };
  return table;
}

}  // namespace

void apply_config(RunConfig& cfg, const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const auto& table = setters();
  for (const auto& [key, value] : j.items()) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const Json::exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }
  lab::validate(cfg.train);
  agent::validate(cfg.episode);
  if (cfg.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (cfg.sandbox.command.empty()) throw ConfigError("sandbox_command must not be empty");
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg;
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  apply_config(cfg, j);
  return cfg;
}

Json to_json(const RunConfig& c) {
  const auto& t = c.train;
  return Json{
      {"rho", t.reward.rho},
      {"beta", t.reward.beta},
      {"c_penalty", t.reward.c_penalty},
      {"enable_tool_reward", t.reward.enable_tool_reward},
      {"eps_low", t.rapo.eps_low},
      {"eps_high", t.rapo.eps_high},
      {"alpha", t.rapo.alpha},
      {"std_epsilon", t.rapo.std_epsilon},
      {"group_size", t.rapo.group_size},
      {"mode", rapo::to_string(t.rapo.mode)},
      {"steps", t.steps},
      {"tasks_per_batch", t.tasks_per_batch},
      {"learning_rate", t.learning_rate},
      {"seed", t.seed},
      {"inner_updates", t.inner_updates},
      {"n_tasks", t.n_tasks},
      {"suite_seed", t.suite_seed},
      {"eval_seed", t.eval_seed},
      {"mental_accuracy", t.lab.mental_accuracy},
      {"n_rows", t.lab.shape.n_rows},
      {"n_cols", t.lab.shape.n_cols},
      {"value_min", t.lab.shape.value_min},
      {"value_max", t.lab.shape.value_max},
      {"temperature", t.temperature},
      {"max_turns", c.episode.max_turns},
      {"max_response_tokens_per_turn", c.episode.max_response_tokens_per_turn},
      {"observation_truncate_bytes", c.episode.observation_truncate_bytes},
      {"exec_timeout_ms", c.episode.exec_timeout_ms},
      {"max_output_bytes", c.episode.max_output_bytes},
      {"instruction_block", c.episode.prompt.instruction_block},
      {"max_table_bytes", c.episode.prompt.max_table_bytes},
      {"url", c.backend.url},
      {"model", c.backend.model},
      {"api_key_env", c.backend.api_key_env},
      {"max_retries", c.backend.max_retries},
      {"retry_backoff_ms", c.backend.retry_backoff_ms},
      {"timeout_s", c.backend.timeout_s},
      {"sandbox_command", c.sandbox.command},
      {"grace_ms", c.sandbox.grace_ms},
      {"parallelism", c.parallelism},
  };
}

}  // namespace tabagent
