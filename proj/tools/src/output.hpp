#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace zrp::app {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct Result {
  Table table;
  nlohmann::json summary = nlohmann::json::object();
  std::string binary;  // raw payload (simulate --format binary)
  bool summary_only = false;
};

std::string format_real(double v);
std::string csv_field(const Cell& c);
std::string csv_quote(const std::string& s);
nlohmann::json to_json(const Cell& c);

// CSV: the table with config_hash and version columns appended.
void write_csv(std::ostream& os, const Table& t, const RunConfig& cfg);
// JSON report: command, config, hash, version, rows (empty cells omitted), summary.
nlohmann::json report(const Result& r, const RunConfig& cfg);
void emit(std::ostream& os, const Result& r, const RunConfig& cfg);

}  // namespace zrp::app
