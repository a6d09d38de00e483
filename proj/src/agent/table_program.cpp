#include "tabagent/agent/table_program.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

namespace tabagent::agent {

namespace {

struct ProgramError {
  std::string kind;
  std::string message;
};

[[noreturn]] void raise(std::string kind, std::string message) {
  throw ProgramError{std::move(kind), std::move(message)};
}

struct Value;
using ListPtr = std::shared_ptr<const std::vector<Value>>;
struct FrameRef {
  const ExecTable* table;
};

struct Value {
  std::variant<std::monostate, double, std::string, ListPtr, FrameRef> v;

  bool is_none() const { return std::holds_alternative<std::monostate>(v); }
  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_list() const { return std::holds_alternative<ListPtr>(v); }
  bool is_frame() const { return std::holds_alternative<FrameRef>(v); }
  double number() const { return std::get<double>(v); }
  const std::string& string() const { return std::get<std::string>(v); }
  const std::vector<Value>& list() const { return *std::get<ListPtr>(v); }
};

Value make_list(std::vector<Value> items) {
  return Value{std::make_shared<const std::vector<Value>>(std::move(items))};
}

std::string type_name(const Value& v) {
  if (v.is_none()) return "NoneType";
  if (v.is_number()) return "float";
  if (v.is_string()) return "str";
  if (v.is_list()) return "list";
  return "DataFrame";
}

std::optional<double> parse_plain_number(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
          c == 'e' || c == 'E' || c == '+'))
      return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

Value cell_value(const std::string& cell) {
  if (auto num = parse_plain_number(cell)) return Value{*num};
  return Value{cell};
}

std::string repr(const Value& v);

std::string str(const Value& v) {
  if (v.is_none()) return "None";
  if (v.is_number()) return format_number(v.number());
  if (v.is_string()) return v.string();
  if (v.is_list()) {
    std::string out = "[";
    for (std::size_t k = 0; k < v.list().size(); ++k) {
      if (k) out += ", ";
      out += repr(v.list()[k]);
    }
    return out + "]";
  }
  const auto& t = *std::get<FrameRef>(v.v).table;
  std::string out;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    out += (c ? " | " : "") + t.header[c];
  for (const auto& row : t.rows) {
    out += '\n';
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? " | " : "") + row[c];
  }
  return out;
}

std::string repr(const Value& v) {
  if (v.is_string()) return "'" + v.string() + "'";
  return str(v);
}

// --- lexer ---------------------------------------------------------------

enum class Tok { Name, Number, String, Op, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
};

std::vector<Token> lex(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
        ++j;
      out.push_back({Tok::Name, std::string(line.substr(i, j - i))});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < line.size() &&
         std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
      std::size_t j = i;
      while (j < line.size() &&
             (std::isdigit(static_cast<unsigned char>(line[j])) || line[j] == '.'))
        ++j;
      if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
        if (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) {
          j = k;
          while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j])))
            ++j;
        }
      }
      auto text = line.substr(i, j - i);
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size())
        raise("SyntaxError", "invalid number literal '" + std::string(text) + "'");
      out.push_back({Tok::Number, std::string(text), value});
      i = j;
      continue;
    }
    if (c == '"' || c == '\'') {
      std::string text;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < line.size()) {
        if (line[j] == '\\' && j + 1 < line.size()) {
          const char e = line[j + 1];
          text += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          j += 2;
          continue;
        }
        if (line[j] == c) {
          closed = true;
          ++j;
          break;
        }
        text += line[j++];
      }
      if (!closed) raise("SyntaxError", "unterminated string literal");
      out.push_back({Tok::String, text});
      i = j;
      continue;
    }
    if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') {
      out.push_back({Tok::Op, "//"});
      i += 2;
      continue;
    }
    if (std::string_view("+-*/%()[],=").find(c) != std::string_view::npos) {
      out.push_back({Tok::Op, std::string(1, c)});
      ++i;
      continue;
    }
    raise("SyntaxError", std::string("invalid character '") + c + "'");
  }
  out.push_back({Tok::End, ""});
  return out;
}

// --- evaluator -----------------------------------------------------------

class Interpreter {
 public:
  explicit Interpreter(const ExecTable& table) : table_(table) {
    std::vector<Value> header;
    for (const auto& h : table.header) header.push_back(Value{h});
    std::vector<Value> rows;
    for (const auto& row : table.rows) {
      std::vector<Value> cells;
      for (const auto& cell : row) cells.push_back(cell_value(cell));
      rows.push_back(make_list(std::move(cells)));
    }
    globals_["df"] = Value{FrameRef{&table_}};
    globals_["header"] = make_list(std::move(header));
    globals_["rows"] = make_list(std::move(rows));
  }

  void run_line(std::string_view line) {
    toks_ = lex(line);
    pos_ = 0;
    if (peek().kind == Tok::End) return;
    if (peek().kind == Tok::Name && toks_[1].kind == Tok::Op &&
        toks_[1].text == "=") {
      std::string name = next().text;
      next();
      Value v = expression();
      expect_end();
      globals_[name] = std::move(v);
      return;
    }
    expression();
    expect_end();
  }

  std::string& output() { return out_; }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool accept_op(std::string_view op) {
    if (peek().kind == Tok::Op && peek().text == op) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_op(std::string_view op) {
    if (!accept_op(op))
      raise("SyntaxError", "expected '" + std::string(op) + "' near '" +
                               peek().text + "'");
  }
  void expect_end() {
    if (peek().kind != Tok::End)
      raise("SyntaxError", "unexpected '" + peek().text + "'");
  }

  Value expression() {
    Value lhs = term();
    while (true) {
      if (accept_op("+")) {
        lhs = add(lhs, term());
      } else if (accept_op("-")) {
        lhs = Value{numeric(lhs, "-") - numeric(term(), "-")};
      } else {
        return lhs;
      }
    }
  }

  Value term() {
    Value lhs = unary();
    while (true) {
      if (accept_op("*")) {
        lhs = Value{numeric(lhs, "*") * numeric(unary(), "*")};
      } else if (accept_op("/")) {
        double a = numeric(lhs, "/"), b = numeric(unary(), "/");
        if (b == 0.0) raise("ZeroDivisionError", "division by zero");
        lhs = Value{a / b};
      } else if (accept_op("//")) {
        double a = numeric(lhs, "//"), b = numeric(unary(), "//");
        if (b == 0.0) raise("ZeroDivisionError", "integer division by zero");
        lhs = Value{std::floor(a / b)};
      } else if (accept_op("%")) {
        double a = numeric(lhs, "%"), b = numeric(unary(), "%");
        if (b == 0.0) raise("ZeroDivisionError", "modulo by zero");
        lhs = Value{a - b * std::floor(a / b)};
      } else {
        return lhs;
      }
    }
  }

  Value unary() {
    if (accept_op("-")) return Value{-numeric(unary(), "unary -")};
    if (accept_op("+")) return Value{numeric(unary(), "unary +")};
    return postfix();
  }

  Value postfix() {
    Value v = primary();
    while (accept_op("[")) {
      Value index = expression();
      expect_op("]");
      v = subscript(v, index);
    }
    return v;
  }

  Value primary() {
    const Token tok = next();
    switch (tok.kind) {
      case Tok::Number:
        return Value{tok.number};
      case Tok::String:
        return Value{tok.text};
      case Tok::Name: {
        if (accept_op("(")) {
          std::vector<Value> args;
          if (!accept_op(")")) {
            do {
              args.push_back(expression());
            } while (accept_op(","));
            expect_op(")");
          }
          return call(tok.text, args);
        }
        if (tok.text == "None") return Value{};
        if (tok.text == "True") return Value{1.0};
        if (tok.text == "False") return Value{0.0};
        auto it = globals_.find(tok.text);
        if (it == globals_.end())
          raise("NameError", "name '" + tok.text + "' is not defined");
        return it->second;
      }
      case Tok::Op:
        if (tok.text == "(") {
          Value v = expression();
          expect_op(")");
          return v;
        }
        if (tok.text == "[") {
          std::vector<Value> items;
          if (!accept_op("]")) {
            do {
              items.push_back(expression());
            } while (accept_op(","));
            expect_op("]");
          }
          return make_list(std::move(items));
        }
        raise("SyntaxError", "unexpected '" + tok.text + "'");
      case Tok::End:
        raise("SyntaxError", "unexpected end of line");
    }
    raise("SyntaxError", "unexpected token");
  }

  static double numeric(const Value& v, std::string_view op) {
    if (!v.is_number())
      raise("TypeError", "unsupported operand type for " + std::string(op) +
                             ": '" + type_name(v) + "'");
    return v.number();
  }

  static Value add(const Value& a, const Value& b) {
    if (a.is_number() && b.is_number()) return Value{a.number() + b.number()};
    if (a.is_string() && b.is_string()) return Value{a.string() + b.string()};
    if (a.is_list() && b.is_list()) {
      auto items = a.list();
      items.insert(items.end(), b.list().begin(), b.list().end());
      return make_list(std::move(items));
    }
    raise("TypeError", "unsupported operand types for +: '" + type_name(a) +
                           "' and '" + type_name(b) + "'");
  }

  Value column(const std::string& name) const {
    auto it = std::find(table_.header.begin(), table_.header.end(), name);
    if (it == table_.header.end()) raise("KeyError", "'" + name + "'");
    const auto c = static_cast<std::size_t>(it - table_.header.begin());
    std::vector<Value> cells;
    for (const auto& row : table_.rows) {
      if (c >= row.size()) raise("IndexError", "ragged table row");
      cells.push_back(cell_value(row[c]));
    }
    return make_list(std::move(cells));
  }

  static std::size_t list_index(const std::vector<Value>& list, const Value& index) {
    if (!index.is_number() || index.number() != std::floor(index.number()))
      raise("TypeError", "list indices must be integers");
    auto i = static_cast<long long>(index.number());
    const auto n = static_cast<long long>(list.size());
    if (i < 0) i += n;
    if (i < 0 || i >= n) raise("IndexError", "list index out of range");
    return static_cast<std::size_t>(i);
  }

  Value subscript(const Value& v, const Value& index) const {
    if (v.is_frame()) {
      if (!index.is_string()) raise("TypeError", "DataFrame keys must be strings");
      return column(index.string());
    }
    if (v.is_list()) return v.list()[list_index(v.list(), index)];
    if (v.is_string()) {
      std::vector<Value> chars;
      for (char c : v.string()) chars.push_back(Value{std::string(1, c)});
      return chars[list_index(chars, index)];
    }
    raise("TypeError", "'" + type_name(v) + "' object is not subscriptable");
  }

  static void arity(const std::string& name, const std::vector<Value>& args,
                    std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      std::string expected = lo == hi ? std::to_string(lo)
                                      : std::to_string(lo) + " to " + std::to_string(hi);
      raise("TypeError", name + "() takes " + expected + " argument(s) (" +
                             std::to_string(args.size()) + " given)");
    }
  }

  static std::vector<double> numbers(const std::string& fn, const Value& v) {
    if (!v.is_list()) raise("TypeError", fn + "() expects a list, got '" + type_name(v) + "'");
    std::vector<double> out;
    for (const auto& item : v.list()) {
      if (!item.is_number())
        raise("TypeError", fn + "() got non-numeric value " + repr(item));
      out.push_back(item.number());
    }
    return out;
  }

  Value call(const std::string& name, const std::vector<Value>& args) {
    if (name == "print") {
      for (std::size_t k = 0; k < args.size(); ++k) {
        if (k) out_ += ' ';
        out_ += str(args[k]);
      }
      out_ += '\n';
      return Value{};
    }
    if (name == "sum") {
      arity(name, args, 1, 1);
      double total = 0.0;
      for (double x : numbers(name, args[0])) total += x;
      return Value{total};
    }
    if (name == "max" || name == "min") {
      if (args.empty()) arity(name, args, 1, 1);
      std::vector<double> xs;
      if (args.size() == 1) {
        xs = numbers(name, args[0]);
      } else {
        xs = numbers(name, make_list(args));
      }
      if (xs.empty()) raise("ValueError", name + "() arg is an empty sequence");
      return Value{name == "max" ? *std::max_element(xs.begin(), xs.end())
                                 : *std::min_element(xs.begin(), xs.end())};
    }
    if (name == "len") {
      arity(name, args, 1, 1);
      const auto& v = args[0];
      if (v.is_list()) return Value{static_cast<double>(v.list().size())};
      if (v.is_string()) return Value{static_cast<double>(v.string().size())};
      if (v.is_frame()) return Value{static_cast<double>(table_.rows.size())};
      raise("TypeError", "object of type '" + type_name(v) + "' has no len()");
    }
    if (name == "abs") {
      arity(name, args, 1, 1);
      return Value{std::abs(numeric(args[0], "abs"))};
    }
    if (name == "round") {
      arity(name, args, 1, 2);
      const double x = numeric(args[0], "round");
      const double digits = args.size() == 2 ? numeric(args[1], "round") : 0.0;
      const double scale = std::pow(10.0, digits);
      return Value{std::nearbyint(x * scale) / scale};
    }
    if (name == "int" || name == "float") {
      arity(name, args, 1, 1);
      double x = 0.0;
      if (args[0].is_number()) {
        x = args[0].number();
      } else if (args[0].is_string()) {
        auto parsed = parse_plain_number(args[0].string());
        if (!parsed)
          raise("ValueError", "could not convert string to number: " + repr(args[0]));
        x = *parsed;
      } else {
        raise("TypeError", name + "() argument must be a string or a number");
      }
      return Value{name == "int" ? std::trunc(x) : x};
    }
    if (name == "str") {
      arity(name, args, 1, 1);
      return Value{str(args[0])};
    }
    if (name == "sorted") {
      arity(name, args, 1, 1);
      auto xs = numbers(name, args[0]);
      std::sort(xs.begin(), xs.end());
      std::vector<Value> items;
      for (double x : xs) items.push_back(Value{x});
      return make_list(std::move(items));
    }
    if (name == "count_gt") {
      arity(name, args, 2, 2);
      const double threshold = numeric(args[1], "count_gt");
      double count = 0.0;
      for (double x : numbers(name, args[0])) count += x > threshold ? 1.0 : 0.0;
      return Value{count};
    }
    if (name == "cell") {
      arity(name, args, 2, 2);
      if (!args[0].is_list()) raise("TypeError", "cell() expects a column");
      return args[0].list()[list_index(args[0].list(), args[1])];
    }
    if (name == "to_seconds") {
      arity(name, args, 1, 1);
      if (args[0].is_number()) return args[0];
      if (!args[0].is_string()) raise("TypeError", "to_seconds() expects a string");
      try {
        return Value{parse_clock_seconds(args[0].string())};
      } catch (const std::invalid_argument& e) {
        raise("ValueError", e.what());
      }
    }
    raise("NameError", "name '" + name + "' is not defined");
  }

  const ExecTable& table_;
  std::map<std::string, Value> globals_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string out_;
};

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == std::floor(value) && std::abs(value) < 1e15) {
    char buf[32];
    auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof buf, static_cast<long long>(value));
    return std::string(buf, ptr);
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

double parse_clock_seconds(std::string_view text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    auto colon = text.find(':', start);
    auto piece = text.substr(start, colon == std::string_view::npos
                                        ? std::string_view::npos
                                        : colon - start);
    auto value = parse_plain_number(piece);
    if (!value || *value < 0)
      throw std::invalid_argument("invalid time string '" + std::string(text) + "'");
    parts.push_back(*value);
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() > 3)
    throw std::invalid_argument("invalid time string '" + std::string(text) + "'");
  double seconds = 0.0;
  for (double p : parts) seconds = seconds * 60.0 + p;
  return seconds;
}

ProgramOutput run_table_program(std::string_view code, const ExecTable& table) {
  Interpreter interp(table);
  ProgramOutput result;
  std::size_t line_no = 0;
  std::size_t start = 0;
  try {
    while (start <= code.size()) {
      auto stop = code.find('\n', start);
      if (stop == std::string_view::npos) stop = code.size();
      auto line = code.substr(start, stop - start);
      ++line_no;
      auto first = line.find_first_not_of(" \t\r");
      if (first != std::string_view::npos) {
        auto body = line.substr(first);
        if (!(body.starts_with("import ") || body.starts_with("from ")))
          interp.run_line(body);
      }
      start = stop + 1;
    }
    result.ok = true;
  } catch (const ProgramError& e) {
    result.err = "Traceback (most recent call last):\n  line " +
                 std::to_string(line_no) + "\n" + e.kind + ": " + e.message + "\n";
  }
  result.out = std::move(interp.output());
  return result;
}

}  // namespace tabagent::agent
