#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "tabagent/config.hpp"
#include "tabagent/core/errors.hpp"

using namespace tabagent;

TEST_SUITE("config") {
  TEST_CASE("keys override defaults") {
    RunConfig cfg;
    apply_config(cfg, Json{{"steps", 12},
                           {"mode", "grpo"},
                           {"rho", 0.1},
                           {"enable_tool_reward", false},
                           {"temperature", 0.5},
                           {"max_turns", 2},
                           {"sandbox_command", {"python3", "w.py"}},
                           {"parallelism", 4}});
    CHECK(cfg.train.steps == 12);
    CHECK(cfg.train.rapo.mode == rapo::Mode::GRPO);
    CHECK(cfg.train.reward.rho == 0.1);
    CHECK_FALSE(cfg.train.reward.enable_tool_reward);
    CHECK(cfg.train.temperature == 0.5);
    CHECK(cfg.episode.temperature == 0.5);
    CHECK(cfg.episode.max_turns == 2);
    CHECK(cfg.sandbox.command == std::vector<std::string>{"python3", "w.py"});
    CHECK(cfg.parallelism == 4);
    CHECK(cfg.train.learning_rate == lab::TrainRunConfig{}.learning_rate);
  }

  TEST_CASE("to_json round trips") {
    RunConfig cfg;
    cfg.train.seed = 99;
    cfg.train.rapo.alpha = 0.25;
    cfg.backend.model = "other";
    const Json j = to_json(cfg);
    RunConfig back;
    apply_config(back, j);
    CHECK(to_json(back) == j);
    CHECK(back.train.seed == 99);
  }

  TEST_CASE("bad input is rejected") {
    RunConfig cfg;
    CHECK_THROWS_AS(apply_config(cfg, Json{{"learning_rat", 0.1}}), ConfigError);
    CHECK_THROWS_AS(apply_config(cfg, Json{{"steps", "many"}}), ConfigError);
    CHECK_THROWS_AS(apply_config(cfg, Json{{"mode", "ppo"}}), ConfigError);
    CHECK_THROWS_AS(apply_config(cfg, Json{{"eps_low", -0.1}}), ConfigError);
    CHECK_THROWS_AS(apply_config(cfg, Json::array()), ConfigError);
  }

  TEST_CASE("load from file") {
    const auto path = std::filesystem::temp_directory_path() / "tabagent_config_test.json";
    {
      std::ofstream out(path);
      out << R"({"steps": 3, "seed": 5})";
    }
    const auto cfg = load_config(path);
    CHECK(cfg.train.steps == 3);
    CHECK(cfg.train.seed == 5);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config(path), Error);
  }
}
