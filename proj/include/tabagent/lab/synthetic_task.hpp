#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tabagent/core/types.hpp"

namespace tabagent::lab {

enum class QuestionFamily { ColumnSum = 0, ColumnMax = 1, CountWhere = 2, CellLookup = 3 };
inline constexpr int kNumFamilies = 4;
inline constexpr int kMaxColumns = 3;
// Argument slots shared by CountWhere (threshold) and CellLookup (row).
inline constexpr int kArgSlots = 4;
inline constexpr std::array<int, kArgSlots> kThresholds = {5, 8, 10, 15};

std::string to_string(QuestionFamily family);

struct SyntheticTaskSpec {
  int n_rows = 5;
  int n_cols = 3;
  int value_min = 0;
  int value_max = 20;
  QuestionFamily family = QuestionFamily::ColumnSum;
  std::uint64_t seed = 0;
};

enum class Op { Sum = 0, Max = 1, Count = 2, Lookup = 3 };
inline constexpr int kNumOps = 4;

// (op, column[, argument slot]) program. Sum and Max take no argument;
// Count and Lookup require one. Other combinations are arity errors.
struct Program {
  Op op = Op::Sum;
  int column = 0;
  std::optional<int> arg;

  friend bool operator==(const Program&, const Program&) = default;
};

bool arity_ok(const Program& p);

// Table-program source for `p`, e.g. print(count_gt(df["c1"], 8)).
std::string program_code(const Program& p);

// Direct evaluation of `p` over the table; nullopt on arity or range errors.
std::optional<double> evaluate_program(const Program& p, const Table& table);

struct SyntheticTask {
  TableTask task;
  QuestionFamily family = QuestionFamily::ColumnSum;
  int column = 0;
  std::optional<int> arg;  // argument slot named in the question
  Program gold_program;
};

/// Pure function of the spec: a random integer table, a question of the
/// requested family about a random column (and argument), and the gold answer
/// computed by scanning the table.
SyntheticTask generate_task(const SyntheticTaskSpec& spec);

/// `n_tasks` tasks cycling through the four families, seeded from `seed`.
std::vector<SyntheticTask> default_suite(int n_tasks, std::uint64_t seed,
                                         const SyntheticTaskSpec& shape = {});

// Deterministic uniform draws on top of mt19937_64 (whose output sequence is
// fixed by the standard, unlike the <random> distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  int below(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tabagent::lab
