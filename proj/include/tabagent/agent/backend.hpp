#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tabagent/core/types.hpp"

namespace tabagent::agent {

struct Message {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct SamplingParams {
  double temperature = 1.0;
  int max_tokens = 2048;
};

struct BackendResponse {
  std::string text;
  std::vector<TokenRecord> tokens;  // empty when the backend reports none
};

// Produces model responses for one episode. Failures to produce a response
// throw BackendUnavailable.
class BackendSession {
 public:
  virtual ~BackendSession() = default;
  virtual BackendResponse complete(const std::vector<Message>& history,
                                   const SamplingParams& params) = 0;
};

class PolicyBackend {
 public:
  virtual ~PolicyBackend() = default;
  virtual std::unique_ptr<BackendSession> start_episode(const TableTask& task) = 0;
};

struct ScriptedResponse {
  std::string text;
  std::vector<TokenRecord> tokens;
};

// Replays fixed responses, one per completion request. Scripts are keyed by
// task id; the key "*" applies to tasks without their own script.
//
// Fixture JSONL, one object per line:
//   {"task_id": "t1", "responses": ["<think>..</think>...", {"text": "...",
//     "logprobs": [-0.1, ...], "token_ids": [17, ...]}]}
class ScriptedBackend final : public PolicyBackend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(std::map<std::string, std::vector<ScriptedResponse>> scripts);

  static ScriptedBackend from_jsonl(const std::string& jsonl);

  std::unique_ptr<BackendSession> start_episode(const TableTask& task) override;

 private:
  std::map<std::string, std::vector<ScriptedResponse>> scripts_;
};

// Token records for replayed text that comes without logprobs: one record
// per whitespace-delimited chunk, hashed id, probability 1.
std::vector<TokenRecord> replay_tokens(const std::string& text);

struct HttpBackendConfig {
  std::string url = "http://127.0.0.1:8000/v1/chat/completions";
  std::string model = "tabagent";
  std::string api_key_env = "TABAGENT_API_KEY";
  int max_retries = 3;
  int retry_backoff_ms = 200;
  int timeout_s = 120;
};

// Chat-completions style client. Requests token logprobs; retries transport
// errors, 429 and 5xx with exponential backoff.
class HttpBackend final : public PolicyBackend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg);
  std::unique_ptr<BackendSession> start_episode(const TableTask& task) override;

 private:
  HttpBackendConfig cfg_;
};

}  // namespace tabagent::agent
