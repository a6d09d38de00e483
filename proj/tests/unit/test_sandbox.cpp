#include <chrono>

#include "doctest.h"
#include "tabagent/agent/executor.hpp"
#include "tabagent/core/errors.hpp"
#include "tabagent/core/serialization.hpp"

using namespace tabagent;
using namespace tabagent::agent;

namespace {

SandboxConfig fake_worker(std::int64_t grace_ms = 300) {
  SandboxConfig cfg;
  cfg.command = {"python3", std::string(TABAGENT_FIXTURES) + "/fake_worker.py"};
  cfg.grace_ms = grace_ms;
  return cfg;
}

ExecRequest request(const std::string& id, const std::string& code,
                    std::int64_t timeout_ms = 2000) {
  return {id, code, {{"a", "b"}, {{"1", "2"}, {"3", "4"}}}, timeout_ms, 65536};
}

}  // namespace

TEST_SUITE("sandbox") {
  TEST_CASE("wire format uses stdout and stderr keys") {
    const Json req = request("x", "print(1)");
    CHECK(req.at("table").at("header") == Json::array({"a", "b"}));
    CHECK(req.get<ExecRequest>() == request("x", "print(1)"));
    const auto res =
        Json::parse(R"({"id":"x","status":"timeout","stdout":"","stderr":"slow","duration_ms":9})")
            .get<ExecResult>();
    CHECK(res.status == ExecStatus::Timeout);
    CHECK(res.err == "slow");
    CHECK_THROWS(Json::parse(R"({"id":"x","status":"weird","stdout":"","stderr":"","duration_ms":0})")
                     .get<ExecResult>());
  }

  TEST_CASE("runs code against the table") {
    SandboxExecutor exec(fake_worker());
    auto session = exec.open_session();
    auto r = session->execute(request("r1", "print(len(rows), header[1])"));
    CHECK(r.id == "r1");
    CHECK(r.status == ExecStatus::Ok);
    CHECK(r.out == "2 b\n");
    r = session->execute(request("r2", "print(1 / 0)"));
    CHECK(r.status == ExecStatus::Error);
    CHECK(r.err.find("ZeroDivisionError") != std::string::npos);
  }

  TEST_CASE("requests do not share state") {
    SandboxExecutor exec(fake_worker());
    auto session = exec.open_session();
    CHECK(session->execute(request("a", "secret = 41")).status == ExecStatus::Ok);
    const auto r = session->execute(request("b", "print(secret)"));
    CHECK(r.status == ExecStatus::Error);
    CHECK(r.err.find("NameError") != std::string::npos);
  }

  TEST_CASE("hung worker yields a timeout and is replaced") {
    SandboxExecutor exec(fake_worker(200));
    auto session = exec.open_session();
    const auto start = std::chrono::steady_clock::now();
    const auto r = session->execute(request("h", "#hang", 300));
    const auto waited = std::chrono::steady_clock::now() - start;
    CHECK(r.id == "h");
    CHECK(r.status == ExecStatus::Timeout);
    CHECK(waited < std::chrono::seconds(5));
    CHECK(session->execute(request("after", "print(5)")).out == "5\n");
  }

  TEST_CASE("worker failures surface as ExecutorUnavailable") {
    SandboxExecutor exec(fake_worker());
    auto session = exec.open_session();
    CHECK_THROWS_AS(session->execute(request("e", "#exit")), ExecutorUnavailable);
    CHECK(session->execute(request("ok", "print(1)")).status == ExecStatus::Ok);
    CHECK_THROWS_AS(session->execute(request("w", "#wrong-id\nprint(1)")), ExecutorUnavailable);
    CHECK_THROWS_AS(session->execute(request("g", "#garbage")), ExecutorUnavailable);
    CHECK(session->execute(request("ok2", "print(2)")).out == "2\n");
  }

  TEST_CASE("missing worker program") {
    SandboxConfig cfg;
    cfg.command = {"/nonexistent/tabagent-worker"};
    SandboxExecutor exec(cfg);
    CHECK_THROWS_AS(exec.open_session()->execute(request("x", "print(1)")), ExecutorUnavailable);
    cfg.command.clear();
    CHECK_THROWS_AS(SandboxExecutor(cfg).open_session()->execute(request("x", "print(1)")),
                    ExecutorUnavailable);
  }
}
