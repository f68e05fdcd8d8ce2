#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"
#include "sweep.hpp"

using nlohmann::json;
using namespace zrp::app;

namespace {

std::string csv_of(const RunConfig& cfg, const Result& r) {
  std::ostringstream os;
  write_csv(os, r.table, cfg);
  return os.str();
}

}  // namespace

TEST(Config, DefaultsAreFilled) {
  const RunConfig c = RunConfig::from_json({{"command", "lsi"}});
  EXPECT_EQ(c.integer("L"), 2);
  EXPECT_EQ(c.integer("d"), 1);
  EXPECT_EQ(c.integer("N"), 4);
  EXPECT_EQ(c.integer("restarts"), 16);
  EXPECT_EQ(c.integer("seed"), 20240601);
  EXPECT_EQ(c.family, "linear");
  EXPECT_EQ(c.format, "csv");
  EXPECT_FALSE(c.has("N_range"));
}

TEST(Config, RangeReplacesDefaultN) {
  const RunConfig c = RunConfig::from_json({{"command", "gap"}, {"N_range", {2, 8, 3}}});
  EXPECT_FALSE(c.has("N"));
  EXPECT_EQ(c.N_values(), (std::vector<std::int64_t>{2, 5, 8}));
}

TEST(Config, NAndRangeAreExclusive) {
  EXPECT_THROW(RunConfig::from_json({{"command", "gap"}, {"N", 3}, {"N_range", {1, 4}}}), ConfigError);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(RunConfig::from_json({{"command", "gap"}, {"Lx", 3}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"command", "gap"}, {"rate", {{"famly", "linear"}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"command", "nope"}}), ConfigError);
}

TEST(Config, TypesAreChecked) {
  EXPECT_THROW(RunConfig::from_json({{"command", "gap"}, {"L", "two"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"command", "gap"}, {"format", "xml"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json({{"command", "gap"}, {"format", "binary"}}), ConfigError);
  EXPECT_NO_THROW(RunConfig::from_json({{"command", "simulate"}, {"format", "binary"}}));
}

TEST(Config, JsonRoundTripIsAFixedPoint) {
  const json in = {{"command", "llt"},
                   {"rate", {{"family", "parity_perturbed"}, {"params", {0.5}}}},
                   {"regime", "gaussian_small_rho"},
                   {"volumes", {16, 32}},
                   {"format", "json"},
                   {"workers", 3}};
  const RunConfig a = RunConfig::from_json(in);
  const json once = a.to_json();
  const RunConfig b = RunConfig::from_json(once);
  EXPECT_EQ(b.to_json(), once);
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(Config, HashIgnoresRunOptions) {
  const RunConfig a = RunConfig::from_json({{"command", "gap"}, {"N", 5}});
  const RunConfig b = RunConfig::from_json({{"command", "gap"}, {"N", 5}, {"format", "json"}, {"workers", 7}});
  const RunConfig c = RunConfig::from_json({{"command", "gap"}, {"N", 6}});
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash_hex().size(), 16u);
}

TEST(Config, HashIsStable) {
  // FNV-1a 64 reference values
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  const RunConfig a = RunConfig::from_json({{"command", "gap"}, {"N", 5}});
  json j = a.to_json();
  j.erase("format");
  EXPECT_EQ(a.hash(), fnv1a(j.dump()));
  EXPECT_EQ(a.hash(), RunConfig::from_json(a.to_json()).hash());
}

TEST(Config, CommandLineValuesParse) {
  const Field il{"volumes", FieldType::int_list, nullptr, ""};
  EXPECT_EQ(parse_value(il, "1,2:3"), json({1, 2, 3}));
  const Field r{"rho", FieldType::real, nullptr, ""};
  EXPECT_DOUBLE_EQ(parse_value(r, "0.25").get<double>(), 0.25);
  EXPECT_THROW(parse_value(r, "0.25x"), ConfigError);
  const Field b{"summary", FieldType::boolean, nullptr, ""};
  EXPECT_TRUE(parse_value(b, "true").get<bool>());
  EXPECT_THROW(parse_value(b, "maybe"), ConfigError);
}

TEST(Output, RealsUseFifteenSignificantDigits) {
  EXPECT_EQ(format_real(1.0 / 3.0), "0.333333333333333");
  EXPECT_EQ(format_real(2.0), "2");
  EXPECT_EQ(format_real(1e-20), "1e-20");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Output, CsvQuoting) {
  EXPECT_EQ(csv_quote("plain"), "plain");
  EXPECT_EQ(csv_quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_quote("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv_field(Cell{}), "");
  EXPECT_EQ(csv_field(Cell{std::int64_t{-4}}), "-4");
}

TEST(Output, CsvCarriesHashAndVersion) {
  const RunConfig cfg = RunConfig::from_json({{"command", "gap"}, {"N", 3}});
  Table t;
  t.columns = {"x", "note"};
  t.add({0.5, std::string("a,b")});
  std::ostringstream os;
  write_csv(os, t, cfg);
  EXPECT_EQ(os.str(), "x,note,config_hash,version\r\n0.5,\"a,b\"," + cfg.hash_hex() + "," + kVersion + "\r\n");
}

TEST(Output, JsonReportOmitsEmptyCells) {
  const RunConfig cfg = RunConfig::from_json({{"command", "gap"}, {"N", 3}});
  const Result r = run_command(cfg);
  const json j = report(r, cfg);
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_FALSE(j["rows"][0].contains("s_lower"));
  // linear rates on two sites: the gap is 2 for every N
  EXPECT_NEAR(j["rows"][0]["gap"].get<double>(), 2.0, 1e-10);
  EXPECT_EQ(j["config_hash"], cfg.hash_hex());
}

TEST(Sweep, GridProducesOneRecordPerCell) {
  const RunConfig cfg =
      RunConfig::from_json({{"command", "sweep"}, {"L_list", {2, 3}}, {"N_range", {2, 4}}});
  const Result r = run_sweep(cfg, 2);
  ASSERT_EQ(r.table.rows.size(), 6u);
  const std::vector<std::pair<std::int64_t, std::int64_t>> order{{2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}, {3, 4}};
  for (std::size_t k = 0; k < order.size(); ++k) {
    EXPECT_EQ(std::get<std::int64_t>(r.table.rows[k][2]), order[k].first);
    EXPECT_EQ(std::get<std::int64_t>(r.table.rows[k][4]), order[k].second);
  }
  EXPECT_EQ(r.summary["failed"], 0);
}

TEST(Sweep, OutputDoesNotDependOnWorkers) {
  const RunConfig cfg = RunConfig::from_json(
      {{"command", "sweep"}, {"target", "lsi"}, {"L_list", {2, 3}}, {"N_range", {1, 4}}, {"restarts", 4}});
  const std::string one = csv_of(cfg, run_sweep(cfg, 1));
  const std::string eight = csv_of(cfg, run_sweep(cfg, 8));
  EXPECT_EQ(one, eight);
}

TEST(Sweep, RunningMaxOfS) {
  const RunConfig cfg = RunConfig::from_json(
      {{"command", "sweep"}, {"target", "bd"}, {"L_list", {1}}, {"N_range", {2, 10, 4}}, {"restarts", 4}});
  const Result r = run_sweep(cfg, 1);
  ASSERT_EQ(r.table.rows.size(), 3u);
  double best = 0.0;
  for (const auto& row : r.table.rows) {
    best = std::max(best, std::get<double>(row[8]));
    EXPECT_DOUBLE_EQ(std::get<double>(row[11]), best);
  }
}

TEST(Sweep, CapExceededCellIsRecorded) {
  const RunConfig cfg = RunConfig::from_json({{"command", "sweep"}, {"L_list", {2, 30}}, {"N", 60}});
  const Result r = run_sweep(cfg, 2);
  ASSERT_EQ(r.table.rows.size(), 2u);
  EXPECT_TRUE(std::holds_alternative<std::monostate>(r.table.rows[0].back()));
  ASSERT_TRUE(std::holds_alternative<std::string>(r.table.rows[1].back()));
  EXPECT_EQ(std::get<std::string>(r.table.rows[1].back()).rfind("cap_exceeded", 0), 0u);
  EXPECT_EQ(r.summary["failed"], 1);
}
