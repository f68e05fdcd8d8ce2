#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <thread>

namespace zrp::app {

using nlohmann::json;

namespace {

Field I(std::string k, json d, std::string h) { return {std::move(k), FieldType::integer, std::move(d), std::move(h)}; }
Field R(std::string k, json d, std::string h) { return {std::move(k), FieldType::real, std::move(d), std::move(h)}; }
Field S(std::string k, json d, std::string h) { return {std::move(k), FieldType::string, std::move(d), std::move(h)}; }
Field B(std::string k, json d, std::string h) { return {std::move(k), FieldType::boolean, std::move(d), std::move(h)}; }
Field IL(std::string k, json d, std::string h) { return {std::move(k), FieldType::int_list, std::move(d), std::move(h)}; }
Field RL(std::string k, json d, std::string h) { return {std::move(k), FieldType::real_list, std::move(d), std::move(h)}; }

Field N_field() { return I("N", 4, "particle number"); }
Field N_range_field() { return IL("N_range", nullptr, "particle range lo,hi[,step]"); }

const std::map<std::string, std::vector<Field>, std::less<>>& schemas() {
  static const std::map<std::string, std::vector<Field>, std::less<>> s{
      {"rates", {I("kmax", 20, "largest k listed"), I("scan_cap", kDefaultScanCap, "condition scan range")}},
      {"measures",
       {R("rho", 1.0, "density"), I("volume", 1, "number of sites"), I("cap", nullptr, "largest count listed"),
        I("canonical_N", nullptr, "also dump canonical log Z up to this N")}},
      {"gamma",
       {I("v1", 1, "first sub-volume"), I("v2", 1, "second sub-volume"), I("N", 10, "particle number"),
        R("eps", 0.125, "regularization window half-width"), R("rho", nullptr, "construction density")}},
      {"gap", {I("L", 2, "side length"), I("d", 1, "dimension"), N_field(), N_range_field()}},
      {"lsi",
       {I("L", 2, "side length"), I("d", 1, "dimension"), N_field(), N_range_field(),
        I("restarts", 16, "optimizer starts"), I("seed", 20240601, "start seed")}},
      {"bd",
       {S("source", "gamma", "gamma|regularized"), I("v1", 1, "first sub-volume"), I("v2", 1, "second sub-volume"),
        N_field(), N_range_field(), R("eps", 0.125, "regularization window half-width"),
        I("restarts", 16, "optimizer starts"), I("seed", 20240601, "start seed")}},
      {"identities",
       {S("suite", "all", "all|reversibility|gradient|entropy|mgf|covariance"), I("L", 2, "block size"),
        I("N", 6, "particle number"), I("count", 50, "test functions"), I("volume", 2, "volume for mgf/covariance"),
        I("seed", 1, "test-function seed")}},
      {"llt",
       {S("regime", "poisson", "poisson|gaussian_small_rho|gaussian_large_rho|central_value|tail_ratio"),
        IL("volumes", json::array({16, 32, 64, 128, 256, 512, 1024}), "volume grid"),
        RL("rhos", json::array({0.5, 1.0, 2.0}), "density grid"), I("N0", 5, "Poisson regime particle bound"),
        IL("Ns", json::array({1, 2, 5, 10, 20, 50, 100, 200}), "central-value particle grid"),
        R("rho", 1.0, "tail-ratio density"), I("volume", 4, "tail-ratio volume"), I("n_lo", 1, "tail-ratio lower n"),
        I("n_hi", 60, "tail-ratio upper n")}},
      {"simulate",
       {I("L", 3, "side length"), I("d", 1, "dimension"), I("N", 6, "particle number"),
        I("events", 1000000, "event budget"), R("horizon", 0.0, "time horizon (overrides events when > 0)"),
        I("seed", 1, "random seed"), S("initial", "round_robin", "round_robin|packed"),
        B("summary", false, "emit a JSON summary instead of the log"), I("site", 0, "site for the occupancy test")}},
      {"sweep",
       {S("target", "gap", "gap|lsi|bd"), IL("L_list", json::array({2, 3}), "side lengths (sub-volumes for bd)"),
        I("d", 1, "dimension"), N_field(), N_range_field(), S("source", "gamma", "bd source"),
        R("eps", 0.125, "bd regularization window"), I("restarts", 16, "optimizer starts"),
        I("seed", 20240601, "start seed")}},
  };
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ':') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (s.empty() || pos != s.size()) throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
  return v;
}

double to_real(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (s.empty() || pos != s.size()) throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
  return v;
}

void check_type(const Field& f, const json& v) {
  auto bad = [&](const char* what) { throw ConfigError("key '" + f.key + "': expected " + what); };
  switch (f.type) {
    case FieldType::integer:
      if (!v.is_number_integer()) bad("an integer");
      break;
    case FieldType::real:
      if (!v.is_number()) bad("a number");
      break;
    case FieldType::string:
      if (!v.is_string()) bad("a string");
      break;
    case FieldType::boolean:
      if (!v.is_boolean()) bad("true or false");
      break;
    case FieldType::int_list:
      if (!v.is_array() || v.empty() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); }))
        bad("a nonempty list of integers");
      break;
    case FieldType::real_list:
      if (!v.is_array() || v.empty() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); }))
        bad("a nonempty list of numbers");
      break;
  }
}

const Field* find_field(const std::vector<Field>& fields, std::string_view key) {
  for (const auto& f : fields)
    if (f.key == key) return &f;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"rates", "measures", "gamma",    "gap",      "lsi",
                                              "bd",    "identities", "llt", "simulate", "sweep"};
  return names;
}

const std::vector<Field>& schema(std::string_view command) {
  const auto it = schemas().find(command);
  if (it == schemas().end()) throw ConfigError("unknown command '" + std::string(command) + "'");
  return it->second;
}

json parse_value(const Field& f, const std::string& text) {
  switch (f.type) {
    case FieldType::integer:
      return to_int(f.key, text);
    case FieldType::real:
      return to_real(f.key, text);
    case FieldType::string:
      return text;
    case FieldType::boolean:
      if (text == "true" || text == "1" || text == "yes") return true;
      if (text == "false" || text == "0" || text == "no") return false;
      throw ConfigError("key '" + f.key + "': expected true or false, got '" + text + "'");
    case FieldType::int_list: {
      json a = json::array();
      for (const auto& s : split_list(text)) a.push_back(to_int(f.key, s));
      return a;
    }
    case FieldType::real_list: {
      json a = json::array();
      for (const auto& s : split_list(text)) a.push_back(to_real(f.key, s));
      return a;
    }
  }
  return nullptr;
}

json RunConfig::to_json() const {
  json j = json::object();
  j["command"] = command;
  json rate = {{"family", family}, {"params", params}};
  if (!table.empty()) rate["table"] = table;
  j["rate"] = rate;
  for (const auto& [k, v] : values.items())
    if (!v.is_null()) j[k] = v;
  j["format"] = format;
  if (!out.empty()) j["out"] = out;
  if (workers > 0) j["workers"] = workers;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  if (!j.contains("command") || !j["command"].is_string()) throw ConfigError("key 'command': required string");
  c.command = j["command"].get<std::string>();
  const auto& fields = schema(c.command);
  for (const auto& [k, v] : j.items()) {
    if (k == "command") continue;
    if (k == "rate") {
      if (!v.is_object()) throw ConfigError("key 'rate': expected an object");
      for (const auto& [rk, rv] : v.items()) {
        if (rk == "family") {
          if (!rv.is_string()) throw ConfigError("key 'rate.family': expected a string");
          c.family = rv.get<std::string>();
        } else if (rk == "params") {
          if (!rv.is_array() || !std::all_of(rv.begin(), rv.end(), [](const json& x) { return x.is_number(); }))
            throw ConfigError("key 'rate.params': expected a list of numbers");
          c.params = rv.get<std::vector<double>>();
        } else if (rk == "table") {
          if (!rv.is_string()) throw ConfigError("key 'rate.table': expected a string");
          c.table = rv.get<std::string>();
        } else {
          throw ConfigError("unknown key 'rate." + rk + "'");
        }
      }
      continue;
    }
    if (k == "format") {
      if (!v.is_string()) throw ConfigError("key 'format': expected a string");
      c.format = v.get<std::string>();
      continue;
    }
    if (k == "out") {
      if (!v.is_string()) throw ConfigError("key 'out': expected a string");
      c.out = v.get<std::string>();
      continue;
    }
    if (k == "workers") {
      if (!v.is_number_integer() || v.get<int>() < 0) throw ConfigError("key 'workers': expected a nonnegative integer");
      c.workers = v.get<int>();
      continue;
    }
    const Field* f = find_field(fields, k);
    if (!f) throw ConfigError("unknown key '" + k + "' for command '" + c.command + "'");
    if (!v.is_null()) check_type(*f, v);
    c.values[k] = v;
  }
  if (c.format != "csv" && c.format != "json" && !(c.command == "simulate" && c.format == "binary"))
    throw ConfigError("key 'format': expected csv or json" + std::string(c.command == "simulate" ? " or binary" : ""));
  const bool has_range = c.values.contains("N_range") && !c.values["N_range"].is_null();
  if (has_range && c.values.contains("N") && !c.values["N"].is_null())
    throw ConfigError("keys 'N' and 'N_range' are mutually exclusive");
  for (const auto& f : fields) {
    if (c.values.contains(f.key)) continue;
    if (f.key == "N" && has_range) continue;
    c.values[f.key] = f.fallback;
  }
  if (has_range) {
    const auto r = c.values["N_range"];
    if (r.size() < 2 || r.size() > 3) throw ConfigError("key 'N_range': expected lo,hi or lo,hi,step");
    if (r[0].get<std::int64_t>() > r[1].get<std::int64_t>() || (r.size() == 3 && r[2].get<std::int64_t>() < 1))
      throw ConfigError("key 'N_range': need lo <= hi and step >= 1");
  }
  return c;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t RunConfig::hash() const {
  json j = to_json();
  j.erase("format");
  j.erase("out");
  j.erase("workers");
  return fnv1a(j.dump());
}

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

bool RunConfig::has(const std::string& key) const { return values.contains(key) && !values[key].is_null(); }

namespace {
const json& need(const json& values, const std::string& key) {
  if (!values.contains(key) || values[key].is_null()) throw ConfigError("key '" + key + "': required");
  return values[key];
}
}  // namespace

std::int64_t RunConfig::integer(const std::string& key) const { return need(values, key).get<std::int64_t>(); }
double RunConfig::real(const std::string& key) const { return need(values, key).get<double>(); }
std::string RunConfig::string(const std::string& key) const { return need(values, key).get<std::string>(); }
bool RunConfig::boolean(const std::string& key) const { return need(values, key).get<bool>(); }
std::vector<std::int64_t> RunConfig::int_list(const std::string& key) const {
  return need(values, key).get<std::vector<std::int64_t>>();
}
std::vector<double> RunConfig::real_list(const std::string& key) const {
  return need(values, key).get<std::vector<double>>();
}

std::vector<std::int64_t> RunConfig::N_values() const {
  if (has("N_range")) {
    const auto r = int_list("N_range");
    const std::int64_t step = r.size() == 3 ? r[2] : 1;
    std::vector<std::int64_t> out;
    for (std::int64_t n = r[0]; n <= r[1]; n += step) out.push_back(n);
    return out;
  }
  return {integer("N")};
}

std::int64_t RunConfig::N_max() const {
  std::int64_t m = 0;
  if (has("N_range") || has("N"))
    for (auto n : N_values()) m = std::max(m, n);
  for (const char* k : {"N0", "n_hi", "canonical_N"})
    if (has(k)) m = std::max(m, integer(k));
  if (has("Ns"))
    for (auto n : int_list("Ns")) m = std::max(m, n);
  return m;
}

RateFunction RunConfig::rate() const {
  const RateFamily fam = parse_family(family);
  const std::int64_t cap = scan_cap_for(N_max());
  if (fam == RateFamily::user_table && !table.empty()) return load_user_table(table, cap);
  return build_family(fam, params, cap);
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ZRP_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace zrp::app
