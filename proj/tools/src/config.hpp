#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zrp/rates.hpp"

namespace zrp::app {

inline constexpr const char* kVersion = ZRP_VERSION;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldType { integer, real, string, boolean, int_list, real_list };

struct Field {
  std::string key;
  FieldType type;
  nlohmann::json fallback;  // null: unset unless given
  std::string help;
};

// Commands in the order they are listed by --help.
const std::vector<std::string>& command_names();
// Command-specific keys (the rate block and run options are handled separately).
const std::vector<Field>& schema(std::string_view command);

struct RunConfig {
  std::string command;
  std::string family = "linear";
  std::vector<double> params;
  std::string table;  // user table path
  nlohmann::json values = nlohmann::json::object();
  // run options, outside the hash
  std::string out;
  std::string format = "csv";
  int workers = 0;

  nlohmann::json to_json() const;
  // Validates keys and types; fills defaults.
  static RunConfig from_json(const nlohmann::json& j);
  // FNV-1a over the canonical dump of command, rate and values.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  bool has(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  double real(const std::string& key) const;
  std::string string(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<std::int64_t> int_list(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;

  // N or the expansion of N_range = [lo, hi] or [lo, hi, step].
  std::vector<std::int64_t> N_values() const;
  std::int64_t N_max() const;
  RateFunction rate() const;
};

// Converts a command-line string into the JSON value of the given field type.
nlohmann::json parse_value(const Field& f, const std::string& text);

// --workers, then the config, then ZRP_WORKERS, then the hardware.
int resolve_workers(int requested);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace zrp::app
