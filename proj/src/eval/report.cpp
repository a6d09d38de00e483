#include "tabagent/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

#include "tabagent/core/errors.hpp"
#include "tabagent/core/serialization.hpp"

namespace tabagent::eval {

namespace {

std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

double as_number(const std::string& s) {
  try {
    return std::stod(s);
  } catch (...) {
    return 0.0;
  }
}

}  // namespace

int CsvTable::column_index(std::string_view name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t start = 0;
  bool header = true;
  while (start < text.size()) {
    auto stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    auto line = text.substr(start, stop - start);
    start = stop + 1;
    if (line.empty() || line == "\r") continue;
    auto fields = split_record(line);
    if (header) {
      table.columns = std::move(fields);
      header = false;
    } else {
      if (fields.size() != table.columns.size())
        throw SchemaMismatch("row has " + std::to_string(fields.size()) +
                             " fields, header has " +
                             std::to_string(table.columns.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

std::string dump_csv(const CsvTable& table) {
  auto line = [](const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k) out += ',';
      out += quote(fields[k]);
    }
    return out + "\n";
  };
  std::string out = line(table.columns);
  for (const auto& row : table.rows) out += line(row);
  return out;
}

Report merge_runs(const std::vector<NamedRun>& runs) {
  Report report;
  if (runs.empty()) return report;
  const auto& schema = runs.front().table.columns;
  for (const auto& run : runs) {
    for (const auto& col : schema) {
      if (run.table.column_index(col) < 0)
        throw SchemaMismatch("column '" + col + "' missing from run '" + run.run_id + "'");
    }
    for (const auto& col : run.table.columns) {
      if (std::find(schema.begin(), schema.end(), col) == schema.end())
        throw SchemaMismatch("unexpected column '" + col + "' in run '" + run.run_id + "'");
    }
    if (run.table.columns != schema)
      throw SchemaMismatch("column order of run '" + run.run_id + "' differs at '" +
                           *std::mismatch(schema.begin(), schema.end(),
                                          run.table.columns.begin())
                                .first +
                           "'");
  }

  report.merged.columns.push_back("run_id");
  report.merged.columns.insert(report.merged.columns.end(), schema.begin(), schema.end());
  for (const auto& run : runs) {
    for (const auto& row : run.table.rows) {
      std::vector<std::string> merged{run.run_id};
      merged.insert(merged.end(), row.begin(), row.end());
      report.merged.rows.push_back(std::move(merged));
    }
  }

  const int mode = report.merged.column_index("mode");
  const int seed = report.merged.column_index("seed");
  const int step = report.merged.column_index("step");
  std::stable_sort(report.merged.rows.begin(), report.merged.rows.end(),
                   [&](const auto& a, const auto& b) {
                     if (mode >= 0 && a[mode] != b[mode]) return a[mode] < b[mode];
                     if (seed >= 0 && as_number(a[seed]) != as_number(b[seed]))
                       return as_number(a[seed]) < as_number(b[seed]);
                     if (step >= 0) return as_number(a[step]) < as_number(b[step]);
                     return false;
                   });

  // one overview line per (run_id, mode, seed): row count and last values
  std::vector<std::string> shown = {"run_id"};
  for (const char* c : {"mode", "seed"})
    if (report.merged.column_index(c) >= 0) shown.push_back(c);
  std::vector<std::string> finals;
  for (const char* c : {"mean_reward", "oracle_accuracy", "tool_calls_ratio", "pass_ratio"})
    if (report.merged.column_index(c) >= 0) finals.push_back(c);

  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> head = shown;
  head.push_back("rows");
  for (const auto& f : finals) head.push_back("last_" + f);
  lines.push_back(head);
  std::map<std::vector<std::string>, std::pair<std::size_t, const std::vector<std::string>*>> groups;
  std::vector<std::vector<std::string>> order;
  for (const auto& row : report.merged.rows) {
    std::vector<std::string> key;
    for (const auto& c : shown) key.push_back(row[report.merged.column_index(c)]);
    auto [it, inserted] = groups.try_emplace(key, 0, nullptr);
    if (inserted) order.push_back(key);
    ++it->second.first;
    it->second.second = &row;
  }
  for (const auto& key : order) {
    const auto& [count, last] = groups[key];
    auto line = key;
    line.push_back(std::to_string(count));
    for (const auto& f : finals) line.push_back((*last)[report.merged.column_index(f)]);
    lines.push_back(line);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& l : lines)
    for (std::size_t k = 0; k < l.size(); ++k) width[k] = std::max(width[k], l[k].size());
  for (const auto& l : lines) {
    for (std::size_t k = 0; k < l.size(); ++k) {
      report.overview += l[k];
      if (k + 1 < l.size()) report.overview += std::string(width[k] - l[k].size() + 2, ' ');
    }
    report.overview += '\n';
  }
  return report;
}

Report report(const std::vector<std::filesystem::path>& csv_paths) {
  std::vector<NamedRun> runs;
  for (const auto& path : csv_paths)
    runs.push_back({path.stem().string(), parse_csv(read_file(path))});
  return merge_runs(runs);
}

}  // namespace tabagent::eval
