#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tabagent::eval {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Index of `name` in columns, or -1.
  int column_index(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
std::string dump_csv(const CsvTable& table);

struct NamedRun {
  std::string run_id;
  CsvTable table;
};

struct Report {
  CsvTable merged;        // run_id column first, then the shared schema
  std::string overview;   // fixed-width per-run summary for terminals
};

// Merges metric CSVs that share one schema; rows are ordered by
// (mode, seed, step) where those columns exist, input order otherwise.
// Throws SchemaMismatch naming the first column that disagrees.
Report merge_runs(const std::vector<NamedRun>& runs);
Report report(const std::vector<std::filesystem::path>& csv_paths);

}  // namespace tabagent::eval
