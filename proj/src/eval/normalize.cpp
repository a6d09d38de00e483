#include "tabagent/eval/normalize.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>

namespace tabagent::eval {

namespace {

constexpr std::array<std::string_view, 5> kCurrencySymbols = {
    "$", "\xE2\x82\xAC" /* € */, "\xC2\xA3" /* £ */, "\xC2\xA5" /* ¥ */,
    "\xE2\x82\xB9" /* ₹ */};

std::string fold_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

std::string strip_quotes(std::string s) {
  auto quoted = [](const std::string& t) {
    return t.size() >= 2 && (t.front() == '"' || t.front() == '\'') &&
           t.back() == t.front();
  };
  while (quoted(s)) {
    s = s.substr(1, s.size() - 2);
    auto first = s.find_first_not_of(' ');
    auto last = s.find_last_not_of(' ');
    s = first == std::string::npos ? std::string()
                                   : s.substr(first, last - first + 1);
  }
  return s;
}

std::string strip_currency(std::string s) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto sym : kCurrencySymbols) {
      if (s.starts_with(sym)) {
        s.erase(0, sym.size());
        changed = true;
      }
      if (s.ends_with(sym)) {
        s.erase(s.size() - sym.size());
        changed = true;
      }
      // sign before the symbol, as in "-$5"
      if (s.size() > sym.size() && (s[0] == '-' || s[0] == '+') &&
          std::string_view(s).substr(1).starts_with(sym)) {
        s.erase(1, sym.size());
        changed = true;
      }
    }
    auto first = s.find_first_not_of(' ');
    auto last = s.find_last_not_of(' ');
    std::string trimmed = first == std::string::npos
                              ? std::string()
                              : s.substr(first, last - first + 1);
    if (trimmed != s) {
      s = trimmed;
      changed = true;
    }
  }
  return s;
}

// Accepts d{1,3}(,ddd)+ optionally followed by a fraction; returns the
// digits with the separators removed.
std::optional<std::string> remove_thousands_separators(const std::string& s) {
  if (s.find(',') == std::string::npos) return s;
  std::size_t pos = 0;
  std::string out;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) out += s[pos++];
  std::size_t lead = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    out += s[pos++];
    ++lead;
  }
  if (lead < 1 || lead > 3) return std::nullopt;
  int groups = 0;
  while (pos < s.size() && s[pos] == ',') {
    ++pos;
    for (int k = 0; k < 3; ++k, ++pos) {
      if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
        return std::nullopt;
      out += s[pos];
    }
    ++groups;
  }
  if (groups == 0) return std::nullopt;
  out += s.substr(pos);
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  auto cleaned = remove_thousands_separators(strip_currency(s));
  if (!cleaned || cleaned->empty()) return std::nullopt;
  std::string_view view = *cleaned;
  if (view.front() == '+') view.remove_prefix(1);
  if (view.empty()) return std::nullopt;
  // from_chars also accepts inf/nan spellings; only plain decimals qualify
  for (char c : view) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
          c == '-' || c == 'e' || c == 'E' || c == '+'))
      return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(view.data(), view.data() + view.size(), value);
  if (ec != std::errc() || ptr != view.data() + view.size())
    return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

NormalizedAnswer normalize_scalar(const std::string& folded) {
  std::string s = strip_quotes(folded);
  if (auto num = parse_number(s)) {
    return NormalizedAnswer(NormalizedAnswer::Numeric{*num == 0.0 ? 0.0 : *num});
  }
  return NormalizedAnswer(NormalizedAnswer::Text{s});
}

NormalizedAnswer make_set(std::vector<NormalizedAnswer> items) {
  std::vector<NormalizedAnswer> unique;
  for (auto& item : items) {
    if (std::find(unique.begin(), unique.end(), item) == unique.end())
      unique.push_back(std::move(item));
  }
  if (unique.size() == 1) return unique.front();
  std::sort(unique.begin(), unique.end(),
            [](const NormalizedAnswer& a, const NormalizedAnswer& b) {
              if (a.is_numeric() != b.is_numeric()) return a.is_numeric();
              if (a.is_numeric()) return a.numeric() < b.numeric();
              return a.to_string() < b.to_string();
            });
  return NormalizedAnswer(NormalizedAnswer::List{std::move(unique)});
}

}  // namespace

std::string NormalizedAnswer::to_string() const {
  if (is_numeric()) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, numeric());
    return std::string(buf, ptr);
  }
  if (is_text()) return text();
  std::string out;
  for (std::size_t k = 0; k < items().size(); ++k) {
    if (k) out += '|';
    out += items()[k].to_string();
  }
  return out;
}

bool operator==(const NormalizedAnswer& a, const NormalizedAnswer& b) {
  if (a.is_numeric() && b.is_numeric())
    return std::abs(a.numeric() - b.numeric()) <= kNumericTolerance;
  if (a.is_text() && b.is_text()) return a.text() == b.text();
  if (a.is_list() && b.is_list()) {
    auto covered = [](const auto& xs, const auto& ys) {
      return std::all_of(xs.begin(), xs.end(), [&](const auto& x) {
        return std::find(ys.begin(), ys.end(), x) != ys.end();
      });
    };
    return covered(a.items(), b.items()) && covered(b.items(), a.items());
  }
  return false;
}

NormalizedAnswer normalize(std::string_view answer) {
  std::string folded = fold_whitespace(answer);
  if (folded.find('|') == std::string::npos) return normalize_scalar(folded);
  std::vector<NormalizedAnswer> parts;
  std::size_t start = 0;
  while (start <= folded.size()) {
    auto bar = folded.find('|', start);
    if (bar == std::string::npos) bar = folded.size();
    std::string part = fold_whitespace(folded.substr(start, bar - start));
    if (!strip_quotes(part).empty()) parts.push_back(normalize_scalar(part));
    start = bar + 1;
  }
  if (parts.empty()) return NormalizedAnswer(NormalizedAnswer::Text{""});
  return make_set(std::move(parts));
}

NormalizedAnswer normalize_gold(const std::vector<std::string>& gold) {
  if (gold.size() == 1) return normalize(gold.front());
  std::vector<NormalizedAnswer> parts;
  for (const auto& g : gold) {
    auto n = normalize(g);
    if (n.is_list()) {
      for (const auto& item : n.items()) parts.push_back(item);
    } else {
      parts.push_back(std::move(n));
    }
  }
  if (parts.empty()) return NormalizedAnswer(NormalizedAnswer::Text{""});
  return make_set(std::move(parts));
}

int exact_match(std::string_view pred, const std::vector<std::string>& gold) {
  if (gold.empty()) return 0;
  return normalize(pred) == normalize_gold(gold) ? 1 : 0;
}

std::optional<std::string> normalize_label(std::string_view pred) {
  auto n = normalize(pred);
  if (n.is_numeric()) {
    if (n.numeric() == 1.0) return "1";
    if (n.numeric() == 0.0) return "0";
    return std::nullopt;
  }
  if (!n.is_text()) return std::nullopt;
  static const std::array<std::string_view, 6> yes = {
      "true", "yes", "entailed", "entails", "supported", "support"};
  static const std::array<std::string_view, 6> no = {
      "false", "no", "refuted", "refutes", "refute", "not supported"};
  if (std::find(yes.begin(), yes.end(), n.text()) != yes.end()) return "1";
  if (std::find(no.begin(), no.end(), n.text()) != no.end()) return "0";
  return std::nullopt;
}

bool answer_matches(const std::optional<std::string>& pred,
                    const TableTask& task) {
  if (!pred || task.gold.empty()) return false;
  if (task.kind == TaskKind::FactVerification) {
    auto label = normalize_label(*pred);
    return label && *label == task.gold.front();
  }
  return exact_match(*pred, task.gold) == 1;
}

}  // namespace tabagent::eval
