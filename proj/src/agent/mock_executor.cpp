#include <chrono>

#include "tabagent/agent/executor.hpp"
#include "tabagent/agent/table_program.hpp"

namespace tabagent::agent {

std::string truncate_bytes(std::string text, std::int64_t max_bytes) {
  if (max_bytes < 0 || text.size() <= static_cast<std::size_t>(max_bytes))
    return text;
  text.resize(static_cast<std::size_t>(max_bytes));
  text += kTruncationMarker;
  return text;
}

namespace {

class MockSession final : public ExecutorSession {
 public:
  explicit MockSession(const MockExecutor& owner) : owner_(owner) {}
  ExecResult execute(const ExecRequest& request) override {
    return owner_.execute(request);
  }

 private:
  const MockExecutor& owner_;
};

}  // namespace

std::unique_ptr<ExecutorSession> MockExecutor::open_session() {
  return std::make_unique<MockSession>(*this);
}

ExecResult MockExecutor::execute(const ExecRequest& request) const {
  const auto start = std::chrono::steady_clock::now();
  auto output = run_table_program(request.code, request.table);
  ExecResult result;
  result.id = request.id;
  result.status = output.ok ? ExecStatus::Ok : ExecStatus::Error;
  result.out = truncate_bytes(std::move(output.out), request.max_output_bytes);
  result.err = truncate_bytes(std::move(output.err), request.max_output_bytes);
  result.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return result;
}

}  // namespace tabagent::agent
