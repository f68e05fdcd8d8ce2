#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"
#include "zrp/error.hpp"

using nlohmann::json;
using namespace zrp::app;

namespace {

std::string flag_name(std::string key) {
  for (char& ch : key)
    if (ch == '_') ch = '-';
  return "--" + key;
}

bool given(CLI::App* app, const std::string& name) {
  const CLI::Option* o = app->get_option_no_throw(name);
  return o != nullptr && o->count() > 0;
}

struct Sub {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
};

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-range process: spectral gap and log-Sobolev toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path, out, format, family, table, params;
  int workers = 0;
  std::map<std::string, Sub> subs;
  for (const auto& name : command_names()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name);
    s.app->add_option("--config", config_path, "JSON configuration file");
    s.app->add_option("--out", out, "output file (default stdout)");
    s.app->add_option("--format", format, name == "simulate" ? "csv|json|binary" : "csv|json");
    s.app->add_option("--workers", workers, "worker threads");
    s.app->add_option("--family", family, "linear|scaled_linear|parity_perturbed|user_table");
    s.app->add_option("--params", params, "rate parameters, comma separated");
    s.app->add_option("--table", table, "user rate table file");
    for (const auto& f : schema(name)) {
      std::string help = f.help;
      if (!f.fallback.is_null()) help += " [" + f.fallback.dump() + "]";
      s.app->add_option(flag_name(f.key), s.values[f.key], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::string command;
    for (auto& [name, s] : subs)
      if (s.app->parsed()) command = name;

    json j = config_path.empty() ? json::object() : load_file(config_path);
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    if (j.contains("command") && j["command"] != command)
      throw ConfigError("config file is for command " + j["command"].dump() + ", not '" + command + "'");
    j["command"] = command;

    Sub& s = subs[command];
    if (given(s.app, "--N") && given(s.app, "--N-range"))
      throw ConfigError("keys 'N' and 'N_range' are mutually exclusive");
    for (const auto& f : schema(command)) {
      if (!given(s.app, flag_name(f.key))) continue;
      j[f.key] = parse_value(f, s.values[f.key]);
      if (f.key == "N") j.erase("N_range");
      if (f.key == "N_range") j.erase("N");
    }
    if (s.app->count("--family")) j["rate"]["family"] = family;
    if (s.app->count("--params")) {
      const Field pf{"params", FieldType::real_list, nullptr, ""};
      j["rate"]["params"] = params.empty() ? json::array() : parse_value(pf, params);
    }
    if (s.app->count("--table")) j["rate"]["table"] = table;
    if (s.app->count("--out")) j["out"] = out;
    if (s.app->count("--format")) j["format"] = format;
    if (s.app->count("--workers")) j["workers"] = workers;

    const RunConfig cfg = RunConfig::from_json(j);
    const Result r = run_command(cfg);
    if (cfg.out.empty()) {
      emit(std::cout, r, cfg);
    } else {
      std::ofstream os(cfg.out, std::ios::binary);
      if (!os) throw ConfigError("cannot open output file '" + cfg.out + "'");
      emit(os, r, cfg);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "zrp: " << e.what() << '\n';
    return 1;
  } catch (const zrp::Error& e) {
    std::cerr << "zrp: " << e.what() << '\n';
    switch (e.kind()) {
      case zrp::ErrorKind::invalid_argument:
        return 1;
      case zrp::ErrorKind::cap_exceeded:
        return 3;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "zrp: " << e.what() << '\n';
    return 2;
  }
}
