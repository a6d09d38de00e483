#pragma once

// Enumeration oracle for the synthetic lab under a uniform policy: walks the
// full (mode, op, column) outcome table and adds up the chance of a correct
// final answer.

#include <array>
#include <cstdlib>
#include <string>
#include <vector>

namespace oracle {

struct LabTask {
  std::vector<std::vector<int>> cells;  // row-major
  bool has_arg = false;
  int arg_value = 0;   // threshold for counting, also read as a row by lookups
  long gold = 0;
};

// Value of (op, column) on the task, or false when the program cannot run.
// ops: 0 sum, 1 max, 2 count above arg, 3 cell at row arg
inline bool program_value(const LabTask& t, int op, int col, int arg_slot, long& value) {
  const bool wants_arg = op >= 2;
  if (wants_arg != t.has_arg) return false;
  value = 0;
  switch (op) {
    case 0:
      for (const auto& row : t.cells) value += row[col];
      return true;
    case 1:
      value = t.cells[0][col];
      for (const auto& row : t.cells) value = row[col] > value ? row[col] : value;
      return true;
    case 2:
      for (const auto& row : t.cells) value += row[col] > t.arg_value;
      return true;
    default:
      if (arg_slot >= static_cast<int>(t.cells.size())) return false;
      value = t.cells[arg_slot][col];
      return true;
  }
}

inline double uniform_success_probability(const LabTask& t, int arg_slot,
                                          const std::array<double, 4>& mental) {
  double p = 0.0;
  const double each = 1.0 / 3.0 * 1.0 / 4.0 * 1.0 / 3.0;
  for (int op = 0; op < 4; ++op) {
    for (int col = 0; col < 3; ++col) {
      long v = 0;
      if (!program_value(t, op, col, arg_slot, v)) continue;
      // tool: exact result
      if (v == t.gold) p += each;
      // direct answer: exact with the op's chance, else off by 1..3 either way
      double direct = v == t.gold ? mental[op] : 0.0;
      const long off = std::labs(t.gold - v);
      if (off >= 1 && off <= 3) direct += (1.0 - mental[op]) / 6.0;
      p += each * direct;
    }
  }
  return p;
}

}  // namespace oracle
