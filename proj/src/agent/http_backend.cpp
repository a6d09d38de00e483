#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "tabagent/agent/backend.hpp"
#include "tabagent/core/errors.hpp"
#include "tabagent/core/serialization.hpp"

namespace tabagent::agent {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("backend url needs a scheme: '" + url + "'");
  if (url.compare(0, scheme_end, "http") != 0)
    throw ConfigError("only http:// backend urls are supported: '" + url + "'");
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpSession final : public BackendSession {
 public:
  explicit HttpSession(const HttpBackendConfig& cfg) : cfg_(cfg) {}

  BackendResponse complete(const std::vector<Message>& history,
                           const SamplingParams& params) override {
    const auto url = split_url(cfg_.url);
    Json body = {{"model", cfg_.model},
                 {"temperature", params.temperature},
                 {"max_tokens", params.max_tokens},
                 {"logprobs", true}};
    body["messages"] = Json::array();
    for (const auto& m : history)
      body["messages"].push_back({{"role", m.role}, {"content", m.content}});

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(cfg_.retry_backoff_ms << (attempt - 1)));
      }
      httplib::Client client(url.origin);
      client.set_connection_timeout(cfg_.timeout_s, 0);
      client.set_read_timeout(cfg_.timeout_s, 0);
      auto res = client.Post(url.path, headers, body.dump(), "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        throw BackendUnavailable("HTTP " + std::to_string(res->status) + ": " + res->body);
      return parse_reply(res->body);
    }
    throw BackendUnavailable("giving up after " + std::to_string(cfg_.max_retries + 1) +
                             " attempts: " + last_error);
  }

 private:
  static BackendResponse parse_reply(const std::string& body) {
    try {
      auto j = Json::parse(body);
      const auto& choice = j.at("choices").at(0);
      BackendResponse r;
      r.text = choice.at("message").at("content").get<std::string>();
      auto lp = choice.find("logprobs");
      if (lp != choice.end() && lp->is_object() && lp->contains("content") &&
          (*lp)["content"].is_array()) {
        std::int64_t k = 0;
        for (const auto& tok : (*lp)["content"]) {
          TokenRecord rec;
          rec.token_id = tok.contains("id") ? tok["id"].get<std::int64_t>() : k;
          rec.logprob_old = std::min(0.0, tok.at("logprob").get<double>());
          r.tokens.push_back(rec);
          ++k;
        }
      }
      return r;
    } catch (const Json::exception& e) {
      throw BackendUnavailable(std::string("malformed completion reply: ") + e.what());
    }
  }

  HttpBackendConfig cfg_;
};

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
  split_url(cfg_.url);
}

std::unique_ptr<BackendSession> HttpBackend::start_episode(const TableTask&) {
  return std::make_unique<HttpSession>(cfg_);
}

}  // namespace tabagent::agent
