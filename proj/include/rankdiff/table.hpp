#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rankdiff {

struct ResultRow {
  std::string experiment;
  std::string params;     // "n=100;t=1" style parameter tuple
  std::string statistic;
  double value = 0.0;
  double std_error = 0.0;  // 0 for deterministic quantities
};

/// Flat result table; the CSV body depends only on (config, seed) so equal
/// seeds produce byte-identical files. Timestamp and build id go to the JSON
/// sidecar, never into the CSV body.
struct ResultTable {
  std::vector<ResultRow> rows;
  std::uint64_t seed = 0;
  std::string build_id;
  std::string config_dump;  // flat key=value lines of the generating config

  void add(std::string experiment, std::string params, std::string statistic, double value,
           double std_error = 0.0);
};

// RFC-4180 CSV body (header + rows).
std::string csv_body(const ResultTable& table);

// Parses a csv_body back into rows (round-trip check support).
std::vector<ResultRow> parse_csv_body(const std::string& body);

// Writes the CSV to `path` and a JSON sidecar (full config, seed, build id,
// timestamp) to `path + ".json"`. Throws on unwritable path.
void emit(const ResultTable& table, const std::string& path);

}  // namespace rankdiff
