#include "tabagent/lab/synthetic_task.hpp"

#include <algorithm>

#include "tabagent/agent/table_program.hpp"
#include "tabagent/core/errors.hpp"

namespace tabagent::lab {

std::string to_string(QuestionFamily family) {
  switch (family) {
    case QuestionFamily::ColumnSum:
      return "column_sum";
    case QuestionFamily::ColumnMax:
      return "column_max";
    case QuestionFamily::CountWhere:
      return "count_where";
    case QuestionFamily::CellLookup:
      return "cell_lookup";
  }
  return "?";
}

bool arity_ok(const Program& p) {
  const bool wants_arg = p.op == Op::Count || p.op == Op::Lookup;
  return wants_arg == p.arg.has_value();
}

std::string program_code(const Program& p) {
  const std::string col = "df[\"c" + std::to_string(p.column) + "\"]";
  std::string call;
  switch (p.op) {
    case Op::Sum:
      call = "sum(" + col;
      break;
    case Op::Max:
      call = "max(" + col;
      break;
    case Op::Count:
      call = "count_gt(" + col;
      break;
    case Op::Lookup:
      call = "cell(" + col;
      break;
  }
  if (p.arg) {
    const int value = p.op == Op::Count ? kThresholds[*p.arg] : *p.arg;
    call += ", " + std::to_string(value);
  }
  return "print(" + call + "))";
}

std::optional<double> evaluate_program(const Program& p, const Table& table) {
  if (!arity_ok(p) || p.column < 0 || p.column >= static_cast<int>(table.num_columns()))
    return std::nullopt;
  std::vector<double> values;
  for (const auto& row : table.rows) values.push_back(std::stod(row[p.column]));
  switch (p.op) {
    case Op::Sum: {
      double s = 0.0;
      for (double v : values) s += v;
      return s;
    }
    case Op::Max:
      if (values.empty()) return std::nullopt;
      return *std::max_element(values.begin(), values.end());
    case Op::Count: {
      const double threshold = kThresholds[*p.arg];
      return static_cast<double>(
          std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; }));
    }
    case Op::Lookup:
      if (*p.arg >= static_cast<int>(values.size())) return std::nullopt;
      return values[*p.arg];
  }
  return std::nullopt;
}

SyntheticTask generate_task(const SyntheticTaskSpec& spec) {
  if (spec.n_rows < 1 || spec.n_cols < 1 || spec.n_cols > kMaxColumns)
    throw ConfigError("synthetic tables need >= 1 row and 1..3 columns");
  if (spec.value_max < spec.value_min) throw ConfigError("empty value range");
  Rng rng(spec.seed);
  SyntheticTask out;
  out.family = spec.family;
  auto& task = out.task;
  task.id = "syn-" + to_string(spec.family) + "-" + std::to_string(spec.seed);
  task.kind = TaskKind::QuestionAnswering;
  for (int c = 0; c < spec.n_cols; ++c) task.table.header.push_back("c" + std::to_string(c));
  const int span = spec.value_max - spec.value_min + 1;
  std::vector<std::vector<int>> cells(spec.n_rows, std::vector<int>(spec.n_cols));
  for (int r = 0; r < spec.n_rows; ++r) {
    std::vector<std::string> row;
    for (int c = 0; c < spec.n_cols; ++c) {
      cells[r][c] = spec.value_min + rng.below(span);
      row.push_back(std::to_string(cells[r][c]));
    }
    task.table.rows.push_back(std::move(row));
  }

  out.column = rng.below(spec.n_cols);
  const std::string col = "c" + std::to_string(out.column);
  long answer = 0;
  switch (spec.family) {
    case QuestionFamily::ColumnSum:
      for (int r = 0; r < spec.n_rows; ++r) answer += cells[r][out.column];
      task.question = "What is the total of column " + col + "?";
      out.gold_program = {Op::Sum, out.column, std::nullopt};
      break;
    case QuestionFamily::ColumnMax:
      answer = cells[0][out.column];
      for (int r = 1; r < spec.n_rows; ++r) answer = std::max<long>(answer, cells[r][out.column]);
      task.question = "What is the largest value in column " + col + "?";
      out.gold_program = {Op::Max, out.column, std::nullopt};
      break;
    case QuestionFamily::CountWhere: {
      out.arg = rng.below(kArgSlots);
      const int threshold = kThresholds[*out.arg];
      for (int r = 0; r < spec.n_rows; ++r) answer += cells[r][out.column] > threshold;
      task.question = "How many rows have " + col + " greater than " +
                      std::to_string(threshold) + "?";
      out.gold_program = {Op::Count, out.column, out.arg};
      break;
    }
    case QuestionFamily::CellLookup:
      out.arg = rng.below(std::min(spec.n_rows, kArgSlots));
      answer = cells[*out.arg][out.column];
      task.question = "What is the value of " + col + " in row " +
                      std::to_string(*out.arg + 1) + "?";
      out.gold_program = {Op::Lookup, out.column, out.arg};
      break;
  }
  task.gold = {std::to_string(answer)};
  return out;
}

std::vector<SyntheticTask> default_suite(int n_tasks, std::uint64_t seed,
                                         const SyntheticTaskSpec& shape) {
  std::vector<SyntheticTask> suite;
  Rng rng(seed);
  for (int k = 0; k < n_tasks; ++k) {
    SyntheticTaskSpec spec = shape;
    spec.family = static_cast<QuestionFamily>(k % kNumFamilies);
    spec.seed = rng.bits();
    auto task = generate_task(spec);
    task.task.id = "syn-" + std::to_string(k);
    suite.push_back(std::move(task));
  }
  return suite;
}

}  // namespace tabagent::lab
