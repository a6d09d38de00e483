#include "tabagent/agent/prompt.hpp"

#include "tabagent/core/errors.hpp"

namespace tabagent::agent {

namespace {

std::string escape_cell(const std::string& cell) {
  std::string out;
  for (char c : cell) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '|':
        out += "\\|";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string serialize_line(const std::vector<std::string>& cells) {
  std::string line = "|";
  for (const auto& cell : cells) line += " " + escape_cell(cell) + " |";
  return line;
}

std::vector<std::string> parse_line(std::string_view line) {
  if (line.empty() || line.front() != '|' || line.back() != '|' || line.size() < 2)
    throw FormatError("table line must start and end with '|'");
  std::vector<std::string> cells;
  std::string current;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && i + 1 < line.size()) {
      const char e = line[++i];
      current += e == 'n' ? '\n' : e == 'r' ? '\r' : e;
      continue;
    }
    if (c == '|') {
      if (current.size() < 2 || current.front() != ' ' || current.back() != ' ')
        throw FormatError("malformed table cell");
      cells.push_back(current.substr(1, current.size() - 2));
      current.clear();
      continue;
    }
    current += c;
  }
  if (!current.empty()) throw FormatError("trailing text after last '|'");
  return cells;
}

// The task block may not open or close the instruction block.
std::string neutralize(std::string text) {
  for (std::string_view tag : {"</instructions>", "<instructions>"}) {
    std::size_t pos = 0;
    while ((pos = text.find(tag, pos)) != std::string::npos) {
      text.replace(pos, 1, "&lt;");
      pos += tag.size();
    }
  }
  return text;
}

}  // namespace

std::string default_instruction_block() {
  return "You are an expert data analyst. You answer questions about a table "
         "by reasoning step by step and running Python code.\n"
         "Each response starts with your reasoning inside <think></think>: "
         "study the question and what you know so far, and decide the next "
         "step. Then do exactly one of the following:\n"
         "- write one ```python code block to inspect or compute over the "
         "table (it is bound as `df`; `header` and `rows` hold the raw "
         "cells). Its printed output comes back as an observation; check it "
         "in your next <think> block before continuing.\n"
         "- when the result is verified, reply with the final answer as a JSON "
         "object: <answer>{\"answer\": \"...\"}</answer>.\n"
         "For statements to verify, answer \"1\" when the table supports the "
         "statement and \"0\" when it refutes it.";
}

std::string serialize_table(const Table& table) {
  std::string out = serialize_line(table.header);
  for (const auto& row : table.rows) out += "\n" + serialize_line(row);
  return out;
}

Table deserialize_table(std::string_view text) {
  Table table;
  std::size_t start = 0;
  bool first = true;
  while (start <= text.size()) {
    auto stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    auto cells = parse_line(text.substr(start, stop - start));
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
    start = stop + 1;
  }
  return table;
}

RenderedPrompt render_messages(const PromptTemplate& tmpl, const TableTask& task) {
  const std::string table_text = serialize_table(task.table);
  if (table_text.size() > tmpl.max_table_bytes)
    throw TableTooLarge("task '" + task.id + "' table serializes to " +
                        std::to_string(table_text.size()) + " bytes, budget is " +
                        std::to_string(tmpl.max_table_bytes));
  RenderedPrompt p;
  p.system = "<instructions>\n" + tmpl.instruction_block + "\n</instructions>";
  std::string user = "<table_task>\n";
  if (task.table.caption) user += "[Caption]\n" + neutralize(*task.table.caption) + "\n";
  user += "[Table]\n" + neutralize(table_text) + "\n";
  user += task.kind == TaskKind::FactVerification ? "[Statement]\n" : "[Question]\n";
  user += neutralize(task.question) + "\n</table_task>";
  p.user = std::move(user);
  return p;
}

std::string render_prompt(const PromptTemplate& tmpl, const TableTask& task) {
  auto p = render_messages(tmpl, task);
  return p.system + "\n\n" + p.user;
}

}  // namespace tabagent::agent
