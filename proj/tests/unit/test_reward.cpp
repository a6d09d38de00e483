#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles/rapo_oracle.hpp"
#include "tabagent/core/errors.hpp"
#include "tabagent/reward/reward.hpp"

using namespace tabagent;
using reward::RewardConfig;

namespace {

Trajectory final_only(const std::string& response, std::optional<std::string> answer) {
  Trajectory t;
  t.task_id = "t";
  Turn turn;
  turn.response = response;
  t.turns = {turn};
  t.tokens = {{1, -0.1}};
  t.final_answer = std::move(answer);
  return t;
}

Trajectory with_tools(int turns, bool success) {
  Trajectory t = final_only("<think>ok</think><answer>{\"answer\": \"192\"}</answer>", "192");
  t.n_tool_turns = turns;
  t.any_tool_success = success;
  return t;
}

TableTask gold_task(std::vector<std::string> gold, TaskKind kind = TaskKind::QuestionAnswering) {
  TableTask task;
  task.id = "t";
  task.table.header = {"a"};
  task.table.rows = {{"1"}};
  task.question = "q";
  task.gold = std::move(gold);
  task.kind = kind;
  return task;
}

}  // namespace

TEST_SUITE("reward") {
  TEST_CASE("format reward") {
    CHECK(reward::format_reward(final_only(
              "<think>ok</think><answer>{\"answer\": \"192\"}</answer>", "192")) == 1.0);
    CHECK(reward::format_reward(final_only("<think>ok</think><answer>{\"answer\": \"192\"}",
                                           "192")) == 0.0);
    CHECK(reward::format_reward(
              final_only("<think>ok</think><answer>not json</answer>", std::nullopt)) == 0.0);
    CHECK(reward::format_reward(final_only("<answer>{\"answer\": 1}</answer>", "1")) == 0.0);

    // every turn needs its think block; intermediate turns need no answer
    Trajectory t = with_tools(1, true);
    Turn call;
    call.response = "<think>run it</think>```python\nprint(1)\n```";
    t.turns.insert(t.turns.begin(), call);
    CHECK(reward::format_reward(t) == 1.0);
    t.turns.front().response = "```python\nprint(1)\n```";
    CHECK(reward::format_reward(t) == 0.0);
  }

  TEST_CASE("accuracy reward") {
    const auto task = gold_task({"192"});
    CHECK(reward::accuracy_reward(final_only("", "192"), task) == 1.0);
    CHECK(reward::accuracy_reward(final_only("", "191"), task) == 0.0);
    CHECK(reward::accuracy_reward(final_only("", "192.0"), task) == 1.0);
    CHECK(reward::accuracy_reward(final_only("", std::nullopt), task) == 0.0);
    const auto fact = gold_task({"1"}, TaskKind::FactVerification);
    CHECK(reward::accuracy_reward(final_only("", "entailed"), fact) == 1.0);
    CHECK(reward::accuracy_reward(final_only("", "refuted"), fact) == 0.0);
  }

  TEST_CASE("tool reward closed forms") {
    const RewardConfig cfg;
    CHECK(std::abs(reward::tool_reward(with_tools(1, true), 0, cfg) - 0.49) < 1e-9);
    CHECK(std::abs(reward::tool_reward(with_tools(2, false), 0, cfg) + 0.04) < 1e-9);
    CHECK(reward::tool_reward(with_tools(0, false), 0, cfg) == 0.0);
    CHECK(std::abs(reward::tool_reward(with_tools(1, true), 100, cfg) - std::exp(-5.0) * 0.49) <
          1e-9);
    RewardConfig off;
    off.enable_tool_reward = false;
    CHECK(reward::tool_reward(with_tools(1, true), 0, off) == 0.0);
  }

  TEST_CASE("score sums its parts") {
    const RewardConfig cfg;
    const auto task = gold_task({"192"});
    auto r = reward::score(with_tools(1, true), task, 0, cfg);
    CHECK(r.total == doctest::Approx(2.49).epsilon(1e-12));
    Trajectory wrong = with_tools(1, true);
    wrong.final_answer = "7";
    r = reward::score(wrong, task, 100, cfg);
    CHECK(std::abs(r.total - (1.0 + std::exp(-5.0) * 0.49)) < 1e-9);
    auto bad = final_only("nothing", "7");
    CHECK(reward::score(bad, task, 0, cfg).total == 0.0);
    CHECK(reward::score(bad, task, 0, cfg) == reward::score(bad, task, 0, cfg));
  }

  TEST_CASE("tool reward matches the reference formula on random inputs") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> coef(0.0, 1.0);
    std::uniform_int_distribution<int> turns(0, 6), steps(0, 400);
    for (int k = 0; k < 2000; ++k) {
      RewardConfig cfg;
      cfg.rho = coef(gen) * 0.2;
      cfg.beta = coef(gen);
      cfg.c_penalty = coef(gen) * 0.05;
      const int n = turns(gen);
      const bool ok = n > 0 && coef(gen) < 0.5;
      const int s = steps(gen);
      CHECK(std::abs(reward::tool_reward(with_tools(n, ok), s, cfg) -
                     oracle::tool_reward(s, ok, n, cfg.rho, cfg.beta, cfg.c_penalty)) < 1e-12);
    }
  }

  TEST_CASE("decay and turn penalty are monotone") {
    const RewardConfig cfg;
    double prev = reward::tool_reward(with_tools(1, true), 0, cfg);
    for (int s = 1; s < 300; ++s) {
      const double now = reward::tool_reward(with_tools(1, true), s, cfg);
      CHECK(now < prev);
      CHECK(std::abs(now) <= std::exp(-cfg.rho * s) * std::max(cfg.beta, cfg.c_penalty) + 1e-15);
      prev = now;
    }
    for (bool ok : {false, true}) {
      for (int n = 1; n < 8; ++n)
        CHECK(reward::tool_reward(with_tools(n + 1, ok), 3, cfg) <
              reward::tool_reward(with_tools(n, ok), 3, cfg));
    }
  }

  TEST_CASE("curriculum gap between tool and no-tool trajectories") {
    const RewardConfig cfg;
    const auto task = gold_task({"192"});
    Trajectory no_tool = with_tools(0, false);
    Trajectory tool = with_tools(1, true);
    CHECK(std::abs(reward::score(tool, task, 0, cfg).total -
                   reward::score(no_tool, task, 0, cfg).total - 0.49) < 1e-12);
    CHECK(std::abs(reward::score(tool, task, 2000, cfg).total -
                   reward::score(no_tool, task, 2000, cfg).total) < 1e-12);
  }

  TEST_CASE("disabled tool reward leaves format plus accuracy") {
    RewardConfig cfg;
    cfg.enable_tool_reward = false;
    const auto r = reward::score(with_tools(2, true), gold_task({"192"}), 0, cfg);
    CHECK(r.total == r.r_format + r.r_acc);
    CHECK(r.r_tool == 0.0);
  }

  TEST_CASE("config validation") {
    RewardConfig cfg;
    cfg.rho = -1.0;
    CHECK_THROWS_AS(reward::validate(cfg), ConfigError);
    cfg = {};
    cfg.beta = std::nan("");
    CHECK_THROWS_AS(reward::validate(cfg), ConfigError);
  }
}
