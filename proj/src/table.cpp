#include "rankdiff/table.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rankdiff {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_field(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one record starting at `pos`; handles quoted fields with embedded
// commas/newlines. Advances `pos` past the record terminator.
std::vector<std::string> next_record(const std::string& body, std::size_t& pos) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  while (pos < body.size()) {
    char c = body[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < body.size() && body[pos + 1] == '"') {
          cur += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos + 1 < body.size() && body[pos + 1] == '\n') ++pos;
      ++pos;
      fields.push_back(std::move(cur));
      return fields;
    } else {
      cur += c;
    }
    ++pos;
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

void ResultTable::add(std::string experiment, std::string params, std::string statistic,
                      double value, double std_error) {
  rows.push_back({std::move(experiment), std::move(params), std::move(statistic), value, std_error});
}

std::string csv_body(const ResultTable& table) {
  std::string out = "experiment,params,statistic,value,std_error\n";
  for (const auto& r : table.rows) {
    out += csv_field(r.experiment);
    out += ',';
    out += csv_field(r.params);
    out += ',';
    out += csv_field(r.statistic);
    out += ',';
    out += format_double(r.value);
    out += ',';
    out += format_double(r.std_error);
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv_body(const std::string& body) {
  std::size_t pos = 0;
  auto header = next_record(body, pos);
  if (header.size() != 5 || header[0] != "experiment")
    throw std::invalid_argument("parse_csv_body: unrecognized header");
  std::vector<ResultRow> rows;
  while (pos < body.size()) {
    auto f = next_record(body, pos);
    if (f.size() == 1 && f[0].empty()) continue;  // trailing newline
    if (f.size() != 5) throw std::invalid_argument("parse_csv_body: malformed record");
    rows.push_back({f[0], f[1], f[2], std::stod(f[3]), std::stod(f[4])});
  }
  return rows;
}

void emit(const ResultTable& table, const std::string& path) {
  {
    std::ofstream csv(path, std::ios::binary);
    if (!csv) throw std::runtime_error("emit: cannot open " + path);
    csv << csv_body(table);
  }
  nlohmann::json meta;
  meta["seed"] = table.seed;
  meta["build_id"] = table.build_id;
  meta["rows"] = table.rows.size();
  {
    auto now = std::chrono::system_clock::now();
    meta["timestamp_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  }
  nlohmann::json cfg = nlohmann::json::object();
  std::istringstream lines(table.config_dump);
  std::string line;
  while (std::getline(lines, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    cfg[line.substr(0, eq)] = line.substr(eq + 1);
  }
  meta["config"] = cfg;
  std::ofstream js(path + ".json", std::ios::binary);
  if (!js) throw std::runtime_error("emit: cannot open " + path + ".json");
  js << meta.dump(2) << '\n';
}

}  // namespace rankdiff
