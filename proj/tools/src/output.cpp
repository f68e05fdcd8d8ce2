#include "output.hpp"

#include <cmath>
#include <cstdio>

namespace zrp::app {

using nlohmann::json;

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q.push_back('"');
    q.push_back(ch);
  }
  q.push_back('"');
  return q;
}

std::string csv_field(const Cell& c) {
  if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
  if (std::holds_alternative<double>(c)) return format_real(std::get<double>(c));
  if (std::holds_alternative<std::string>(c)) return csv_quote(std::get<std::string>(c));
  return "";
}

json to_json(const Cell& c) {
  if (std::holds_alternative<std::int64_t>(c)) return std::get<std::int64_t>(c);
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (std::isfinite(v)) return v;
    return format_real(v);
  }
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return nullptr;
}

void write_csv(std::ostream& os, const Table& t, const RunConfig& cfg) {
  for (const auto& c : t.columns) os << csv_quote(c) << ',';
  os << "config_hash,version\r\n";
  const std::string tail = cfg.hash_hex() + "," + kVersion + "\r\n";
  for (const auto& row : t.rows) {
    for (const auto& c : row) os << csv_field(c) << ',';
    os << tail;
  }
}

json report(const Result& r, const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["config"] = cfg.to_json();
  j["config_hash"] = cfg.hash_hex();
  j["version"] = kVersion;
  if (!r.summary_only) {
    json rows = json::array();
    for (const auto& row : r.table.rows) {
      json o = json::object();
      for (std::size_t k = 0; k < row.size() && k < r.table.columns.size(); ++k)
        if (!std::holds_alternative<std::monostate>(row[k])) o[r.table.columns[k]] = to_json(row[k]);
      rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
  }
  if (!r.summary.empty()) j["summary"] = r.summary;
  return j;
}

void emit(std::ostream& os, const Result& r, const RunConfig& cfg) {
  if (!r.binary.empty()) {
    os.write(r.binary.data(), static_cast<std::streamsize>(r.binary.size()));
    return;
  }
  if (cfg.format == "json" || r.summary_only) {
    os << report(r, cfg).dump(2) << '\n';
    return;
  }
  write_csv(os, r.table, cfg);
}

}  // namespace zrp::app
