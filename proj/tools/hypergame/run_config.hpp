#ifndef HYPERGAME_TOOLS_RUN_CONFIG_HPP
#define HYPERGAME_TOOLS_RUN_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypergame/hypergame.hpp"

namespace hypergame::cli {

using nlohmann::json;

inline const std::vector<std::string> kCommands = {"table",     "tournament", "thresholds", "replicator",
                                                   "map7",      "lattice",    "sweep"};

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "HYPERGAME_OUT";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
  std::string command;
  GameParams params{3.0, 1.0, 0.25};
  bool allow_any_delta = false;
  double w = 1.0;
  SetMode mode = SetMode::Pairs;
  std::uint64_t seed = 1;
  std::string out_dir;
  OutputFormat format = OutputFormat::Csv;
  std::optional<int> round;

  // replicator / map7
  double dt = 0.01;
  double t_max = 1e4;
  double eps = 1e-9;
  std::size_t stride = 100;
  std::size_t resolution = 0;  // basin scan off when 0
  std::vector<double> x0;      // empty = barycenter
  std::size_t iterations = 10'000;
  std::optional<double> sigma;

  // lattice
  std::size_t width = 100;
  std::size_t height = 100;
  double K = 0.1;
  std::uint64_t steps = 10'000'000;
  std::size_t replicates = 10;
  std::vector<std::uint64_t> snapshots;
  UpdateUnit update_unit = UpdateUnit::Attempt;

  // sweep
  std::vector<double> b_list;
  std::vector<double> w_list;
  std::string target = "tournament";
  std::size_t jobs = 1;
};

inline json to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["b"] = cfg.params.b;
  j["c"] = cfg.params.c;
  j["delta"] = cfg.params.delta;
  j["allow-any-delta"] = cfg.allow_any_delta;
  j["w"] = cfg.w;
  j["mode"] = to_string(cfg.mode);
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir;
  j["format"] = cfg.format == OutputFormat::Csv ? "csv" : "json";
  j["round"] = cfg.round ? json(*cfg.round) : json(nullptr);
  j["dt"] = cfg.dt;
  j["t-max"] = cfg.t_max;
  j["eps"] = cfg.eps;
  j["stride"] = cfg.stride;
  j["resolution"] = cfg.resolution;
  j["x0"] = cfg.x0;
  j["iterations"] = cfg.iterations;
  j["sigma"] = cfg.sigma ? json(*cfg.sigma) : json(nullptr);
  j["width"] = cfg.width;
  j["height"] = cfg.height;
  j["K"] = cfg.K;
  j["steps"] = cfg.steps;
  j["replicates"] = cfg.replicates;
  j["snapshots"] = cfg.snapshots;
  j["update-unit"] = cfg.update_unit == UpdateUnit::Attempt ? "attempt" : "sweep";
  j["b-list"] = cfg.b_list;
  j["w-list"] = cfg.w_list;
  j["target"] = cfg.target;
  j["jobs"] = cfg.jobs;
  return j;
}

namespace detail {

// Raw values as parsed, before validation. Strings hold enum-like options.
struct RawOptions {
  std::string command;
  std::string config_path;
  double b = 3.0, c = 1.0, delta = 0.25;
  bool allow_any_delta = false;
  double w = 1.0;
  std::string mode = "pairs";
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  int round = -1;
  double dt = 0.01, t_max = 1e4, eps = 1e-9;
  std::size_t stride = 100, resolution = 0;
  std::vector<double> x0;
  std::size_t iterations = 10'000;
  double sigma = std::nan("");
  std::size_t width = 100, height = 100;
  double K = 0.1;
  std::uint64_t steps = 10'000'000;
  std::size_t replicates = 10;
  std::vector<std::uint64_t> snapshots;
  std::string update_unit = "attempt";
  std::vector<double> b_list, w_list;
  std::string target = "tournament";
  std::size_t jobs = 1;
};

struct Binding {
  CLI::Option* option = nullptr;
  std::function<void(const json&)> assign;
};

class Parser {
 public:
  Parser() : app_("Evolutionary hypergame dynamics of the voluntary prisoner's dilemma", "hypergame") {
    app_.add_option("command", raw_.command, "table | tournament | thresholds | replicator | map7 | lattice | sweep");
    app_.add_option("--config", raw_.config_path, "JSON file with the same keys as the flags");
    bind("b", raw_.b, "benefit b");
    bind("c", raw_.c, "cost c");
    bind("delta", raw_.delta, "loner payoff delta");
    bind_flag("allow-any-delta", raw_.allow_any_delta, "accept delta outside (0, b - c)");
    bind("w", raw_.w, "introspection strength");
    bind("mode", raw_.mode, "strategy sets: pairs | all");
    bind("seed", raw_.seed, "base RNG seed");
    bind("out", raw_.out, "output directory");
    bind("format", raw_.format, "csv | json");
    bind("round", raw_.round, "print payoffs with this many decimals");
    bind("dt", raw_.dt, "RK4 step");
    bind("t-max", raw_.t_max, "replicator integration horizon");
    bind("eps", raw_.eps, "stop when |x_dot|_inf < eps");
    bind("stride", raw_.stride, "steps between recorded samples");
    bind("resolution", raw_.resolution, "basin scan subdivisions per simplex edge (0 = off)");
    bind("x0", raw_.x0, "initial frequencies (default: uniform)");
    bind("iterations", raw_.iterations, "discrete map iterations");
    bind("sigma", raw_.sigma, "discrete map fitness offset (default: max(0, -min payoff) + 1)");
    bind("width", raw_.width, "lattice width");
    bind("height", raw_.height, "lattice height");
    bind("K", raw_.K, "imitation noise K");
    bind("steps", raw_.steps, "lattice updates (see --update-unit)");
    bind("replicates", raw_.replicates, "independent lattice runs");
    bind("snapshots", raw_.snapshots, "steps at which to write lattice snapshots");
    bind("update-unit", raw_.update_unit, "attempt | sweep");
    bind("b-list", raw_.b_list, "sweep values of b");
    bind("w-list", raw_.w_list, "sweep values of w");
    bind("target", raw_.target, "command run at each sweep point");
    bind("jobs", raw_.jobs, "worker threads");
  }

  RawOptions parse(std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    try {
      app_.parse(args);
    } catch (const CLI::CallForHelp&) {
      throw;
    } catch (const CLI::ParseError& e) {
      throw ConfigError(e.what());
    }
    if (!raw_.config_path.empty()) apply_config_file(raw_.config_path);
    return raw_;
  }

  std::string help() const { return app_.help(); }

 private:
  template <typename T>
  void bind(const std::string& key, T& field, const std::string& desc) {
    CLI::Option* opt = app_.add_option("--" + key, field, desc);
    if constexpr (requires { field.push_back(field.front()); }) {
      if constexpr (!std::is_same_v<T, std::string>) opt->delimiter(',');
    }
    bindings_[key] = {opt, [&field, key](const json& j) { field = j.get<T>(); }};
  }

  void bind_flag(const std::string& key, bool& field, const std::string& desc) {
    CLI::Option* opt = app_.add_flag("--" + key, field, desc);
    bindings_[key] = {opt, [&field](const json& j) { field = j.get<bool>(); }};
  }

  void apply_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config: cannot open '" + path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("--config: '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("--config: top level must be a JSON object");
    for (const auto& [raw_key, value] : doc.items()) {
      std::string key = raw_key;
      std::replace(key.begin(), key.end(), '_', '-');
      if (key == "command") {
        if (raw_.command.empty()) raw_.command = value.get<std::string>();
        continue;
      }
      auto it = bindings_.find(key);
      if (it == bindings_.end()) throw ConfigError("--config: unknown key '" + raw_key + "'");
      if (it->second.option->count() > 0) continue;  // command line wins
      try {
        it->second.assign(value);
      } catch (const json::exception& e) {
        throw ConfigError("--config: key '" + raw_key + "' has the wrong type: " + e.what());
      }
    }
  }

  CLI::App app_;
  RawOptions raw_;
  std::map<std::string, Binding> bindings_;
};

inline void check(bool ok, const std::string& flag, const std::string& constraint) {
  if (!ok) throw ConfigError("--" + flag + ": " + constraint);
}

}  // namespace detail

inline std::string default_output_dir(const std::string& command) {
  const char* root = std::getenv(kOutputRootEnv);
  const std::string base = (root && *root) ? root : "hypergame-out";
  return base + "/" + command;
}

// Validates raw options against the module preconditions; every failure names the flag.
inline RunConfig resolve(const detail::RawOptions& raw) {
  using detail::check;
  RunConfig cfg;
  if (raw.command.empty()) throw ConfigError("a command is required: table, tournament, thresholds, replicator, map7, lattice, sweep");
  check(std::find(kCommands.begin(), kCommands.end(), raw.command) != kCommands.end(), "command",
        "unknown command '" + raw.command + "'");
  cfg.command = raw.command;

  cfg.params = {raw.b, raw.c, raw.delta};
  cfg.allow_any_delta = raw.allow_any_delta;
  check(std::isfinite(raw.c) && raw.c > 0.0, "c", "must be > 0");
  check(std::isfinite(raw.b) && raw.b > raw.c, "b", "must exceed c");
  check(std::isfinite(raw.delta), "delta", "must be finite");
  check(raw.allow_any_delta || (raw.delta > 0.0 && raw.delta < raw.b - raw.c), "delta",
        "must satisfy 0 < delta < b - c (pass --allow-any-delta to override)");

  check(std::isfinite(raw.w) && raw.w >= 0.0, "w", "must be finite and >= 0");
  cfg.w = raw.w;
  try {
    cfg.mode = parse_set_mode(raw.mode);
  } catch (const std::invalid_argument&) {
    check(false, "mode", "must be 'pairs' or 'all'");
  }
  cfg.seed = raw.seed;
  cfg.out_dir = raw.out.empty() ? default_output_dir(raw.command) : raw.out;
  check(raw.format == "csv" || raw.format == "json", "format", "must be 'csv' or 'json'");
  cfg.format = raw.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  check(raw.round >= -1 && raw.round <= 17, "round", "must be between 0 and 17");
  if (raw.round >= 0) cfg.round = raw.round;

  check(std::isfinite(raw.dt) && raw.dt > 0.0, "dt", "must be > 0");
  check(std::isfinite(raw.t_max) && raw.t_max > 0.0, "t-max", "must be > 0");
  check(raw.eps >= 0.0, "eps", "must be >= 0");
  check(raw.stride >= 1, "stride", "must be >= 1");
  cfg.dt = raw.dt;
  cfg.t_max = raw.t_max;
  cfg.eps = raw.eps;
  cfg.stride = raw.stride;
  cfg.resolution = raw.resolution;
  if (!raw.x0.empty()) {
    double sum = 0.0;
    for (double v : raw.x0) {
      check(std::isfinite(v) && v >= 0.0, "x0", "frequencies must be finite and >= 0");
      sum += v;
    }
    check(std::abs(sum - 1.0) <= 1e-9, "x0", "frequencies must sum to 1");
  }
  cfg.x0 = raw.x0;
  check(raw.iterations >= 1, "iterations", "must be >= 1");
  cfg.iterations = raw.iterations;
  if (!std::isnan(raw.sigma)) {
    check(std::isfinite(raw.sigma), "sigma", "must be finite");
    cfg.sigma = raw.sigma;
  }

  check(raw.width >= 2, "width", "must be >= 2");
  check(raw.height >= 2, "height", "must be >= 2");
  check(std::isfinite(raw.K) && raw.K > 0.0, "K", "must be > 0");
  check(raw.steps >= 1, "steps", "must be >= 1");
  check(raw.replicates >= 1, "replicates", "must be >= 1");
  for (auto t : raw.snapshots) check(t <= raw.steps, "snapshots", "times must not exceed --steps");
  check(raw.update_unit == "attempt" || raw.update_unit == "sweep", "update-unit", "must be 'attempt' or 'sweep'");
  cfg.width = raw.width;
  cfg.height = raw.height;
  cfg.K = raw.K;
  cfg.steps = raw.steps;
  cfg.replicates = raw.replicates;
  cfg.snapshots = raw.snapshots;
  cfg.update_unit = raw.update_unit == "attempt" ? UpdateUnit::Attempt : UpdateUnit::Sweep;

  for (double b : raw.b_list) {
    check(std::isfinite(b) && b > raw.c, "b-list", "every b must exceed c");
    check(raw.allow_any_delta || (raw.delta > 0.0 && raw.delta < b - raw.c), "b-list",
          "every b must satisfy 0 < delta < b - c");
  }
  for (double w : raw.w_list) check(std::isfinite(w) && w >= 0.0, "w-list", "every w must be finite and >= 0");
  cfg.b_list = raw.b_list;
  cfg.w_list = raw.w_list;
  check(raw.target != "sweep" &&
            std::find(kCommands.begin(), kCommands.end(), raw.target) != kCommands.end(),
        "target", "must name a non-sweep command");
  cfg.target = raw.target;
  check(raw.jobs >= 1, "jobs", "must be >= 1");
  cfg.jobs = raw.jobs;

  if (cfg.command == "replicator" && cfg.resolution > 0) {
    check(cfg.mode == SetMode::Pairs, "resolution", "basin scans need exactly 3 sets (--mode pairs)");
  }
  if (!cfg.x0.empty()) {
    const std::size_t expected = cfg.command == "map7" ? 7 : enumerate_strategy_sets(cfg.mode).size();
    check(cfg.x0.size() == expected, "x0", "needs " + std::to_string(expected) + " frequencies");
  }
  return cfg;
}

// Flags override config-file values; throws ConfigError on any invalid input.
inline RunConfig parse_config(const std::vector<std::string>& args) {
  detail::Parser parser;
  return resolve(parser.parse(args));
}

inline RunConfig parse_config(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_config(args);
}

inline std::string usage() {
  detail::Parser parser;
  return parser.help();
}

}  // namespace hypergame::cli

#endif  // HYPERGAME_TOOLS_RUN_CONFIG_HPP
