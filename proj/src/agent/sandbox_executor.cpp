#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>

#include "tabagent/agent/executor.hpp"
#include "tabagent/core/errors.hpp"
#include "tabagent/core/serialization.hpp"

extern char** environ;

namespace tabagent::agent {

namespace {

using Clock = std::chrono::steady_clock;

class WorkerProcess {
 public:
  explicit WorkerProcess(const std::vector<std::string>& command) {
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });
    if (command.empty()) throw ExecutorUnavailable("empty sandbox command");

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0)
      throw ExecutorUnavailable(std::string("pipe: ") + std::strerror(errno));

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    std::vector<char*> argv;
    for (const auto& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);
    const int rc = ::posix_spawnp(&pid_, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      pid_ = -1;
      throw ExecutorUnavailable("cannot start '" + command.front() +
                                "': " + std::strerror(rc));
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
  }

  WorkerProcess(const WorkerProcess&) = delete;
  WorkerProcess& operator=(const WorkerProcess&) = delete;

  ~WorkerProcess() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    if (pid_ > 0) {
      int status = 0;
      // Closing stdin asks the worker to exit; give it a moment, then kill.
      for (int k = 0; k < 20; ++k) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
        ::usleep(5000);
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
  }

  void write_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t sent = 0;
    while (sent < data.size()) {
      auto n = ::write(to_child_, data.data() + sent, data.size() - sent);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ExecutorUnavailable(std::string("worker write failed: ") +
                                  std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  // Nullopt on deadline; throws ExecutorUnavailable when the worker exits.
  std::optional<std::string> read_line(Clock::time_point deadline) {
    while (true) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                           deadline - Clock::now())
                           .count();
      if (remaining <= 0) return std::nullopt;
      pollfd pfd{from_child_, POLLIN, 0};
      int rc = ::poll(&pfd, 1, static_cast<int>(remaining));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw ExecutorUnavailable(std::string("poll: ") + std::strerror(errno));
      }
      if (rc == 0) return std::nullopt;
      char chunk[4096];
      auto n = ::read(from_child_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ExecutorUnavailable(std::string("worker read failed: ") +
                                  std::strerror(errno));
      }
      if (n == 0) throw ExecutorUnavailable("worker closed its output");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

class SandboxSession final : public ExecutorSession {
 public:
  explicit SandboxSession(const SandboxConfig& cfg) : cfg_(cfg) {}

  ExecResult execute(const ExecRequest& request) override {
    if (!worker_) worker_ = std::make_unique<WorkerProcess>(cfg_.command);
    const auto start = Clock::now();
    const auto deadline = start + std::chrono::milliseconds(request.timeout_ms +
                                                            cfg_.grace_ms);
    std::optional<std::string> line;
    try {
      worker_->write_line(Json(request).dump());
      line = worker_->read_line(deadline);
    } catch (const ExecutorUnavailable&) {
      worker_.reset();
      throw;
    }
    if (!line) {
      worker_.reset();
      ExecResult timeout;
      timeout.id = request.id;
      timeout.status = ExecStatus::Timeout;
      timeout.err = "sandbox worker gave no result within " +
                    std::to_string(request.timeout_ms + cfg_.grace_ms) + " ms";
      timeout.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                Clock::now() - start)
                                .count();
      return timeout;
    }
    ExecResult result;
    try {
      result = Json::parse(*line).get<ExecResult>();
    } catch (const std::exception& e) {
      worker_.reset();
      throw ExecutorUnavailable(std::string("malformed worker reply: ") + e.what());
    }
    if (result.id != request.id) {
      worker_.reset();
      throw ExecutorUnavailable("worker replied to id '" + result.id +
                                "' while '" + request.id + "' was pending");
    }
    return result;
  }

 private:
  SandboxConfig cfg_;
  std::unique_ptr<WorkerProcess> worker_;
};

}  // namespace

SandboxExecutor::SandboxExecutor(SandboxConfig cfg) : cfg_(std::move(cfg)) {}

std::unique_ptr<ExecutorSession> SandboxExecutor::open_session() {
  return std::make_unique<SandboxSession>(cfg_);
}

}  // namespace tabagent::agent
