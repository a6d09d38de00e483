#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tabagent/core/errors.hpp"
#include "tabagent/eval/metrics.hpp"
#include "tabagent/eval/normalize.hpp"
#include "tabagent/eval/report.hpp"

using namespace tabagent;
using namespace tabagent::eval;

namespace {

TableTask task(const std::string& id, std::vector<std::string> gold,
               TaskKind kind = TaskKind::QuestionAnswering) {
  TableTask t;
  t.id = id;
  t.table.header = {"a"};
  t.table.rows = {{"1"}};
  t.question = "q";
  t.gold = std::move(gold);
  t.kind = kind;
  return t;
}

Trajectory answered(const std::string& id, std::optional<std::string> answer,
                    std::vector<ExecStatus> executions = {}) {
  Trajectory t;
  t.task_id = id;
  for (auto status : executions) {
    Turn turn;
    turn.action = "print(1)";
    turn.observation = ExecResult{id, status, status == ExecStatus::Ok ? "1\n" : "", "", 1};
    t.turns.push_back(turn);
  }
  t.turns.push_back(Turn{});
  t.n_tool_turns = static_cast<int>(executions.size());
  t.final_answer = std::move(answer);
  t.tokens = {{1, -0.5}};
  return t;
}

CsvTable csv(std::vector<std::string> cols, std::vector<std::vector<std::string>> rows) {
  return {std::move(cols), std::move(rows)};
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("normalization examples") {
    CHECK(exact_match("1,200", {"1200"}) == 1);
    CHECK(exact_match("$5", {"5"}) == 1);
    CHECK(exact_match("-$5", {"-5"}) == 1);
    CHECK(exact_match("  Oslo  ", {"oslo"}) == 1);
    CHECK(exact_match("\"Oslo\"", {"Oslo"}) == 1);
    CHECK(exact_match("192.0000001", {"192"}) == 1);
    CHECK(exact_match("192.01", {"192"}) == 0);
    CHECK(exact_match("a|b", {"b", "a"}) == 1);
    CHECK(exact_match("a | b | a", {"b|a"}) == 1);
    CHECK(exact_match("a", {"a", "b"}) == 0);
    CHECK(exact_match("1,20", {"120"}) == 0);
    CHECK(exact_match("inf", {"inf"}) == 1);
    CHECK(normalize("inf").is_text());
    CHECK(normalize("-0").numeric() == 0.0);
    CHECK(exact_match("x", {}) == 0);
  }

  TEST_CASE("fact verification labels") {
    CHECK(normalize_label("Entailed") == "1");
    CHECK(normalize_label("true") == "1");
    CHECK(normalize_label("1") == "1");
    CHECK(normalize_label("Refuted") == "0");
    CHECK(normalize_label("no") == "0");
    CHECK_FALSE(normalize_label("perhaps"));
    CHECK(answer_matches("yes", task("f", {"1"}, TaskKind::FactVerification)));
    CHECK_FALSE(answer_matches(std::nullopt, task("f", {"1"}, TaskKind::FactVerification)));
  }

  TEST_CASE("normalization is idempotent") {
    std::mt19937_64 gen(17);
    const std::vector<std::string> pieces = {"1", ",", "000", ".", "5", " ", "A", "b", "|",
                                             "$", "-", "\"", "'", "\t", "e3", "€"};
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pieces.size()) - 1), len(0, 8);
    for (int k = 0; k < 5000; ++k) {
      std::string s;
      for (int n = len(gen); n > 0; --n) s += pieces[pick(gen)];
      const auto once = normalize(s);
      CHECK(normalize(once.to_string()) == once);
      CHECK(exact_match(s, {s}) == 1);
    }
  }

  TEST_CASE("summary metrics") {
    const std::vector<TableTask> dataset = {task("a", {"1"}), task("b", {"2"}),
                                            task("c", {"1"}, TaskKind::FactVerification)};
    const std::vector<Trajectory> trajs = {
        answered("a", "1", {ExecStatus::Ok, ExecStatus::Error}),
        answered("b", "3"),
        answered("c", "entailed", {ExecStatus::Timeout})};
    const auto m = summarize(trajs, dataset);
    CHECK(m.n_tasks == 3);
    CHECK(m.n_qa == 2);
    CHECK(m.n_fact == 1);
    CHECK(m.exact_match == 0.5);
    CHECK(m.accuracy == 1.0);
    CHECK(m.tool_calls_ratio == doctest::Approx(2.0 / 3.0));
    CHECK(m.n_executions == 3);
    CHECK(m.n_ok_executions == 1);
    CHECK(*m.pass_ratio == doctest::Approx(1.0 / 3.0));
    CHECK(m.mean_turns == 1.0);
    CHECK(to_json(m)["pass_ratio"].is_number());

    const auto quiet = summarize({answered("b", "2")}, dataset);
    CHECK_FALSE(quiet.pass_ratio);
    CHECK(to_json(quiet)["pass_ratio"].is_null());
    CHECK_THROWS_AS(summarize({}, dataset), std::invalid_argument);
    CHECK_THROWS_AS(summarize({answered("zzz", "1")}, dataset), UnknownTaskId);
  }

  TEST_CASE("csv round trip with quoting") {
    const auto table = csv({"a", "b"}, {{"x,y", "say \"hi\""}, {"", "2"}});
    const auto back = parse_csv(dump_csv(table));
    CHECK(back.columns == table.columns);
    CHECK(back.rows == table.rows);
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), SchemaMismatch);
  }

  TEST_CASE("merging runs orders by mode, seed and step") {
    const std::vector<std::string> cols = {"step", "mode", "seed", "mean_reward"};
    const std::vector<NamedRun> runs = {
        {"r2", csv(cols, {{"1", "rapo", "10", "0.4"}, {"0", "rapo", "10", "0.3"}})},
        {"r1", csv(cols, {{"0", "rapo", "2", "0.1"}, {"0", "grpo", "2", "0.2"}})}};
    const auto rep = merge_runs(runs);
    REQUIRE(rep.merged.rows.size() == 4);
    CHECK(rep.merged.columns.front() == "run_id");
    CHECK(rep.merged.rows[0][2] == "grpo");
    CHECK(rep.merged.rows[1][3] == "2");
    CHECK(rep.merged.rows[2][1] == "0");
    CHECK(rep.merged.rows[3][1] == "1");
    CHECK(rep.overview.find("last_mean_reward") != std::string::npos);

    auto reordered = runs;
    std::swap(reordered[0], reordered[1]);
    CHECK(merge_runs(reordered).merged.rows == rep.merged.rows);
  }

  TEST_CASE("schema mismatch names the column") {
    const std::vector<NamedRun> runs = {{"a", csv({"step", "x"}, {})},
                                        {"b", csv({"step", "y"}, {})}};
    try {
      merge_runs(runs);
      FAIL("expected SchemaMismatch");
    } catch (const SchemaMismatch& e) {
      CHECK(std::string(e.what()).find("'x'") != std::string::npos);
    }
    CHECK_THROWS_AS(merge_runs({{"a", csv({"step", "x"}, {})}, {"b", csv({"x", "step"}, {})}}),
                    SchemaMismatch);
  }
}
