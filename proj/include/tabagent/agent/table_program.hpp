#pragma once

#include <string>
#include <string_view>

#include "tabagent/core/types.hpp"

namespace tabagent::agent {

// A small Python-flavoured language for table analysis, interpreted in
// process by the MockExecutor. One statement per line:
//
//   name = expr
//   expr
//
// Expressions: numbers, 'strings', [lists], + - * / // %, unary minus,
// indexing x[i], calls f(args). Bound names: `df` (df["col"] is the column as
// a list; numeric cells become numbers), `header`, `rows`.
// Builtins: print sum max min len abs round int float str sorted
//           count_gt(column, threshold) cell(column, row) to_seconds(text)
// `import` / `from` lines are accepted and ignored; `#` starts a comment.
struct ProgramOutput {
  bool ok = false;
  std::string out;
  std::string err;
};

ProgramOutput run_table_program(std::string_view code, const ExecTable& table);

// Python-style rendering of a number: integral values print without a
// fractional part, others in shortest round-trip form.
std::string format_number(double value);

// "4:48.993" -> 288.993, "1:02:03" -> 3723; throws std::invalid_argument.
double parse_clock_seconds(std::string_view text);

}  // namespace tabagent::agent
