#include <cctype>
#include <sstream>

#include "tabagent/agent/backend.hpp"
#include "tabagent/core/errors.hpp"
#include "tabagent/core/serialization.hpp"

namespace tabagent::agent {

namespace {

std::int64_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return static_cast<std::int64_t>(h);
}

class ScriptedSession final : public BackendSession {
 public:
  ScriptedSession(std::string task_id, const std::vector<ScriptedResponse>* script)
      : task_id_(std::move(task_id)), script_(script) {}

  BackendResponse complete(const std::vector<Message>&, const SamplingParams&) override {
    if (!script_ || cursor_ >= script_->size())
      throw BackendUnavailable("scripted fixture exhausted for task '" + task_id_ +
                               "' after " + std::to_string(cursor_) + " responses");
    const auto& next = (*script_)[cursor_++];
    BackendResponse r;
    r.text = next.text;
    r.tokens = next.tokens.empty() ? replay_tokens(next.text) : next.tokens;
    return r;
  }

 private:
  std::string task_id_;
  const std::vector<ScriptedResponse>* script_;
  std::size_t cursor_ = 0;
};

ScriptedResponse parse_response(const Json& j) {
  ScriptedResponse r;
  if (j.is_string()) {
    r.text = j.get<std::string>();
    return r;
  }
  r.text = j.at("text").get<std::string>();
  if (auto lp = j.find("logprobs"); lp != j.end()) {
    auto logprobs = lp->get<std::vector<double>>();
    std::vector<std::int64_t> ids;
    if (auto it = j.find("token_ids"); it != j.end()) ids = it->get<std::vector<std::int64_t>>();
    if (!ids.empty() && ids.size() != logprobs.size())
      throw FormatError("token_ids and logprobs differ in length");
    for (std::size_t k = 0; k < logprobs.size(); ++k) {
      if (!(logprobs[k] <= 0.0)) throw FormatError("logprobs must be <= 0");
      r.tokens.push_back({ids.empty() ? static_cast<std::int64_t>(k) : ids[k], logprobs[k]});
    }
  }
  return r;
}

}  // namespace

std::vector<TokenRecord> replay_tokens(const std::string& text) {
  std::vector<TokenRecord> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back({fnv1a(std::string_view(text).substr(i, j - i)), 0.0});
    i = j;
  }
  if (out.empty()) out.push_back({fnv1a(""), 0.0});
  return out;
}

ScriptedBackend::ScriptedBackend(std::map<std::string, std::vector<ScriptedResponse>> scripts)
    : scripts_(std::move(scripts)) {}

ScriptedBackend ScriptedBackend::from_jsonl(const std::string& jsonl) {
  std::map<std::string, std::vector<ScriptedResponse>> scripts;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = Json::parse(line);
      auto& script = scripts[j.at("task_id").get<std::string>()];
      for (const auto& r : j.at("responses")) script.push_back(parse_response(r));
    } catch (const std::exception& e) {
      throw FormatError("fixture line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ScriptedBackend(std::move(scripts));
}

std::unique_ptr<BackendSession> ScriptedBackend::start_episode(const TableTask& task) {
  auto it = scripts_.find(task.id);
  if (it == scripts_.end()) it = scripts_.find("*");
  return std::make_unique<ScriptedSession>(
      task.id, it == scripts_.end() ? nullptr : &it->second);
}

}  // namespace tabagent::agent
