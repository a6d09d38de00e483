#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tabagent/core/types.hpp"

namespace tabagent::agent {

inline constexpr std::string_view kTruncationMarker = "\n[truncated]";

// One executor session per running episode. Every request yields exactly one
// result; transport failures throw ExecutorUnavailable.
class ExecutorSession {
 public:
  virtual ~ExecutorSession() = default;
  virtual ExecResult execute(const ExecRequest& request) = 0;
};

class CodeExecutor {
 public:
  virtual ~CodeExecutor() = default;
  virtual std::unique_ptr<ExecutorSession> open_session() = 0;
};

// Caps `text` at `max_bytes`, appending kTruncationMarker when cut.
std::string truncate_bytes(std::string text, std::int64_t max_bytes);

// In-process interpreter for the table-program language. Stateless and
// safe to share between threads.
class MockExecutor final : public CodeExecutor {
 public:
  std::unique_ptr<ExecutorSession> open_session() override;
  ExecResult execute(const ExecRequest& request) const;
};

struct SandboxConfig {
  std::vector<std::string> command = {"python3", "-m", "tabagent_sandbox"};
  // Extra time the client waits beyond the request deadline before it treats
  // the worker as hung and restarts it.
  std::int64_t grace_ms = 1000;
};

// Client for the out-of-process sandbox worker: newline-delimited JSON
// ExecRequest/ExecResult over the worker's stdin/stdout. Each session owns
// one worker process, spawned lazily.
class SandboxExecutor final : public CodeExecutor {
 public:
  explicit SandboxExecutor(SandboxConfig cfg = {});
  std::unique_ptr<ExecutorSession> open_session() override;

 private:
  SandboxConfig cfg_;
};

}  // namespace tabagent::agent
