#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tabagent/core/types.hpp"

namespace tabagent::eval {

inline constexpr double kNumericTolerance = 1e-6;

class NormalizedAnswer {
 public:
  struct Numeric {
    double value;
  };
  struct Text {
    std::string canonical;
  };
  struct List {
    std::vector<NormalizedAnswer> items;  // deduplicated, canonical order
  };

  explicit NormalizedAnswer(Numeric v) : value_(v) {}
  explicit NormalizedAnswer(Text v) : value_(std::move(v)) {}
  explicit NormalizedAnswer(List v) : value_(std::move(v)) {}

  bool is_numeric() const { return std::holds_alternative<Numeric>(value_); }
  bool is_text() const { return std::holds_alternative<Text>(value_); }
  bool is_list() const { return std::holds_alternative<List>(value_); }

  double numeric() const { return std::get<Numeric>(value_).value; }
  const std::string& text() const { return std::get<Text>(value_).canonical; }
  const std::vector<NormalizedAnswer>& items() const {
    return std::get<List>(value_).items;
  }

  // Canonical string form; normalize(to_string()) reproduces the value.
  std::string to_string() const;

  // Numbers compare at kNumericTolerance, lists as sets.
  friend bool operator==(const NormalizedAnswer& a, const NormalizedAnswer& b);

 private:
  std::variant<Numeric, Text, List> value_;
};

NormalizedAnswer normalize(std::string_view answer);

// Normalized form of a gold answer list: a single entry normalizes as is,
// several entries form a set.
NormalizedAnswer normalize_gold(const std::vector<std::string>& gold);

// 1 when the normalized prediction equals the normalized gold set, else 0.
int exact_match(std::string_view pred, const std::vector<std::string>& gold);

// Maps a fact-verification prediction onto "1" (entailed) / "0" (refuted).
std::optional<std::string> normalize_label(std::string_view pred);

// The single correctness predicate behind both R_acc and the evaluation
// metrics: exact match for QA, label equality for fact verification.
bool answer_matches(const std::optional<std::string>& pred,
                    const TableTask& task);

}  // namespace tabagent::eval
