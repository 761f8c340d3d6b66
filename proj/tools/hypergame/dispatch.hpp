#ifndef HYPERGAME_TOOLS_DISPATCH_HPP
#define HYPERGAME_TOOLS_DISPATCH_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypergame/hypergame.hpp"
#include "run_config.hpp"

#ifndef HYPERGAME_VERSION
#define HYPERGAME_VERSION "0.0.0"
#endif

namespace hypergame::cli {

namespace fs = std::filesystem;

inline constexpr const char* kManifestName = "manifest.json";

// Collects output files and metadata for the manifest of one run directory.
class RunContext {
 public:
  explicit RunContext(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.out_dir) { fs::create_directories(dir_); }

  const RunConfig& config() const { return cfg_; }
  const fs::path& dir() const { return dir_; }
  NumberFormat number_format() const { return NumberFormat{cfg_.round}; }
  json& metadata() { return metadata_; }

  // Opens `relative` under the run directory for writing and records it.
  std::ofstream open(const std::string& relative) {
    const fs::path path = dir_ / relative;
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    outputs_.push_back(relative);
    return out;
  }

  void write_manifest(bool complete, const std::string& error, double seconds) const {
    json m;
    m["config"] = to_json(cfg_);
    m["rng_algorithm"] = Rng::kAlgorithm;
    m["version"] = HYPERGAME_VERSION;
    m["wall_clock_seconds"] = seconds;
    m["outputs"] = outputs_;
    m["complete"] = complete;
    if (!error.empty()) m["error"] = error;
    if (!metadata_.is_null()) m["metadata"] = metadata_;
    std::ofstream out(dir_ / kManifestName);
    out << m.dump(2) << '\n';
  }

 private:
  RunConfig cfg_;
  fs::path dir_;
  std::vector<std::string> outputs_;
  json metadata_;
};

namespace detail {

inline PopulationState initial_state(const RunConfig& cfg, std::size_t k) {
  if (cfg.x0.empty()) return barycenter(k);
  PopulationState x(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) x(static_cast<Eigen::Index>(i)) = cfg.x0[i];
  return x;
}

inline PayoffTable table_for(const RunConfig& cfg, const std::vector<StrategySet>& sets) {
  return build_payoff_table(sets, cfg.params, IntrospectionConfig{cfg.w});
}

inline json table_json(const PayoffTable& table) {
  json rows = json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < table.size(); ++j) {
      rows.push_back({{"set_row", table.sets[i].name()}, {"set_col", table.sets[j].name()}, {"payoff", table(i, j)}});
    }
  }
  return {{"w", table.config.w},
          {"b", table.params.b},
          {"c", table.params.c},
          {"delta", table.params.delta},
          {"entries", rows}};
}

inline void run_table(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const PayoffTable table = table_for(cfg, enumerate_strategy_sets(cfg.mode));
  if (cfg.format == OutputFormat::Json) {
    ctx.open("payoff_table.json") << table_json(table).dump(2) << '\n';
  } else {
    auto out = ctx.open("payoff_table.csv");
    write_payoff_table_csv(out, table, ctx.number_format());
  }
}

inline void run_tournament(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const PayoffTable table = table_for(cfg, enumerate_strategy_sets(cfg.mode));
  const TournamentReport report = tournament_report(table);
  const NumberFormat fmt = ctx.number_format();
  if (cfg.format == OutputFormat::Json) {
    json j = table_json(table);
    json ranking = json::array();
    for (const auto& e : report.ranking) {
      ranking.push_back({{"set", table.sets[e.set_index].name()}, {"combined_score", e.score}, {"rank", e.rank},
                         {"tied", e.tied}});
    }
    json pairs = json::array();
    for (const auto& p : report.pairwise) {
      pairs.push_back({{"set_a", table.sets[p.i].name()},
                       {"set_b", table.sets[p.j].name()},
                       {"payoff_a", p.payoff_i},
                       {"payoff_b", p.payoff_j},
                       {"winner", p.winner ? json(table.sets[*p.winner].name()) : json("tie")}});
    }
    j["ranking"] = ranking;
    j["pairwise"] = pairs;
    ctx.open("tournament.json") << j.dump(2) << '\n';
    return;
  }
  {
    auto out = ctx.open("payoff_table.csv");
    write_payoff_table_csv(out, table, fmt);
  }
  {
    auto out = ctx.open("tournament_report.csv");
    write_report_csv(out, table, report, fmt);
  }
  auto out = ctx.open("pairwise.csv");
  out << "set_a,set_b,payoff_a,payoff_b,winner\n";
  for (const auto& p : report.pairwise) {
    out << table.sets[p.i].name() << ',' << table.sets[p.j].name() << ',' << fmt(p.payoff_i) << ','
        << fmt(p.payoff_j) << ',' << (p.winner ? table.sets[*p.winner].name() : std::string("tie")) << '\n';
  }
}

inline void run_thresholds(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  json j{{"b", cfg.params.b}, {"c", cfg.params.c}, {"delta", cfg.params.delta}};
  std::string csv_d = "nan";
  std::string csv_dl = "nan";
  const NumberFormat exact{};
  try {
    const DefectorThreshold t = critical_w_vs_d(cfg.params);
    j["vs_D"] = {{"alpha", t.alpha},   {"beta", t.beta},   {"x_root", t.x_root},
                 {"w_transcendental", t.w_root}, {"w_bisection", t.w_crossing}};
    csv_d = exact(t.w_root) + "," + exact(t.w_crossing);
  } catch (const ThresholdError& e) {
    j["vs_D"] = {{"error", e.what()}};
    csv_d = "nan,nan";
  }
  try {
    const double w = critical_w_vs_dl(cfg.params);
    j["vs_DL"] = {{"w_bisection", w}};
    csv_dl = exact(w);
  } catch (const ThresholdError& e) {
    j["vs_DL"] = {{"error", e.what()}};
  }
  if (cfg.format == OutputFormat::Json) {
    ctx.open("thresholds.json") << j.dump(2) << '\n';
  } else {
    ctx.open("thresholds.csv") << "b,c,delta,w_vs_D_transcendental,w_vs_D_bisection,w_vs_DL\n"
                               << exact(cfg.params.b) << ',' << exact(cfg.params.c) << ','
                               << exact(cfg.params.delta) << ',' << csv_d << ',' << csv_dl << '\n';
  }
}

inline void write_final_state(RunContext& ctx, const std::vector<StrategySet>& sets, const TrajectoryRecord& rec) {
  const NumberFormat fmt = ctx.number_format();
  auto out = ctx.open("final_state.csv");
  out << 't';
  for (const auto& s : sets) out << ",x_" << s.name();
  out << ",P_bar,dominant\n" << fmt(rec.final_time);
  for (Eigen::Index i = 0; i < rec.final_state.size(); ++i) out << ',' << fmt(rec.final_state(i));
  out << ',' << fmt(rec.final_mean_payoff) << ',' << (rec.dominant ? sets[*rec.dominant].name() : "none") << '\n';
}

inline void run_replicator(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const auto sets = enumerate_strategy_sets(cfg.mode);
  const PayoffTable table = table_for(cfg, sets);
  ReplicatorOptions opts;
  opts.dt = cfg.dt;
  opts.t_max = cfg.t_max;
  opts.convergence_eps = cfg.eps;
  opts.sample_stride = cfg.stride;
  const TrajectoryRecord rec = integrate_replicator(initial_state(cfg, sets.size()), table, opts);
  {
    auto out = ctx.open("trajectory.csv");
    write_trajectory_csv(out, sets, rec, ctx.number_format());
  }
  write_final_state(ctx, sets, rec);
  ctx.metadata()["converged"] = rec.converged;
  if (cfg.resolution > 0) {
    const auto points = basin_scan(table, cfg.resolution, opts, cfg.jobs);
    auto out = ctx.open("basin.csv");
    write_basin_csv(out, sets, points, ctx.number_format());
  }
}

inline void run_map7(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const auto sets = enumerate_strategy_sets(SetMode::All);
  const PayoffTable table = table_for(cfg, sets);
  const double sigma = cfg.sigma.value_or(default_map_offset(table));
  ctx.metadata()["sigma"] = sigma;
  ctx.metadata()["sigma_rule"] = cfg.sigma ? "user" : "max(0, -min payoff) + 1";
  const TrajectoryRecord rec = iterate_map(initial_state(cfg, sets.size()), table, cfg.iterations, sigma, cfg.stride);
  {
    auto out = ctx.open("trajectory.csv");
    write_trajectory_csv(out, sets, rec, ctx.number_format());
  }
  write_final_state(ctx, sets, rec);
}

inline void write_snapshot(RunContext& ctx, const std::string& stem, const LatticeGrid& grid,
                           const std::vector<StrategySet>& sets, std::size_t replicate, std::uint64_t seed,
                           const std::string& step) {
  const RunConfig& cfg = ctx.config();
  {
    auto out = ctx.open("snapshots/" + stem + ".pgm");
    write_pgm(out, grid, sets);
  }
  json legend = json::object();
  for (const auto& s : sets) legend[std::to_string(s.canonical_index())] = s.name();
  json side{{"legend", legend},
            {"b", cfg.params.b},
            {"c", cfg.params.c},
            {"delta", cfg.params.delta},
            {"w", cfg.w},
            {"K", cfg.K},
            {"mode", to_string(cfg.mode)},
            {"replicate", replicate},
            {"seed", seed},
            {"step", step},
            {"update_unit", cfg.update_unit == UpdateUnit::Attempt ? "attempt" : "sweep"},
            {"rng_algorithm", Rng::kAlgorithm}};
  ctx.open("snapshots/" + stem + ".json") << side.dump(2) << '\n';
}

inline void run_lattice_command(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const auto sets = enumerate_strategy_sets(cfg.mode);
  const PayoffTable table = table_for(cfg, sets);
  LatticeConfig lc;
  lc.width = cfg.width;
  lc.height = cfg.height;
  lc.sets = sets;
  lc.K = cfg.K;
  lc.steps = cfg.steps;
  lc.seed = cfg.seed;
  lc.snapshot_times = cfg.snapshots;
  lc.replicates = cfg.replicates;
  lc.unit = cfg.update_unit;
  lc.jobs = cfg.jobs;
  const LatticeResult result = run_lattice(lc, table);
  const NumberFormat fmt = ctx.number_format();
  {
    auto out = ctx.open("fractions.csv");
    write_fractions_csv(out, result, fmt);
  }
  {
    auto out = ctx.open("final_fractions.csv");
    out << "replicate,seed";
    for (const auto& s : sets) out << ",x_" << s.name();
    out << ",dominant\n";
    for (const auto& rep : result.replicates) {
      out << rep.replicate << ',' << rep.seed;
      for (double f : rep.final_fractions()) out << ',' << fmt(f);
      out << ',' << sets[rep.dominant_set()].name() << '\n';
    }
  }
  for (const auto& rep : result.replicates) {
    for (const auto& snap : rep.snapshots) {
      write_snapshot(ctx, "r" + std::to_string(rep.replicate) + "_s" + std::to_string(snap.step), snap.grid, sets,
                     rep.replicate, rep.seed, std::to_string(snap.step));
    }
    write_snapshot(ctx, "r" + std::to_string(rep.replicate) + "_final", rep.final_grid, sets, rep.replicate,
                   rep.seed, std::to_string(cfg.steps));
  }
  ctx.metadata()["payoff_table"] = table_json(table)["entries"];
}

int run_single(const RunConfig& cfg, std::ostream& log);

// Primary CSV of each command, concatenated by `sweep`.
inline std::string summary_file(const std::string& command) {
  if (command == "table") return "payoff_table.csv";
  if (command == "tournament") return "tournament_report.csv";
  if (command == "thresholds") return "thresholds.csv";
  if (command == "lattice") return "final_fractions.csv";
  return "final_state.csv";
}

inline void run_sweep(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const std::vector<double> bs = cfg.b_list.empty() ? std::vector<double>{cfg.params.b} : cfg.b_list;
  const std::vector<double> ws = cfg.w_list.empty() ? std::vector<double>{cfg.w} : cfg.w_list;
  const NumberFormat exact{};

  struct Point {
    double b, w;
    std::string subdir;
    int status = 0;
    std::string log;
  };
  std::vector<Point> points;
  for (double b : bs) {
    for (double w : ws) {
      points.push_back({b, w, "b" + exact(b) + "_w" + exact(w)});
    }
  }

  parallel_for(points.size(), cfg.jobs, [&](std::size_t idx) {
    Point& pt = points[idx];
    RunConfig sub = cfg;
    sub.command = cfg.target;
    sub.params.b = pt.b;
    sub.w = pt.w;
    sub.format = OutputFormat::Csv;
    sub.out_dir = (ctx.dir() / pt.subdir).string();
    sub.jobs = 1;
    std::ostringstream log;
    pt.status = run_single(sub, log);
    pt.log = log.str();
  });

  auto out = ctx.open("sweep.csv");
  bool header_written = false;
  std::string failures;
  for (const auto& pt : points) {
    if (pt.status != 0) {
      failures += pt.subdir + ": " + pt.log;
      continue;
    }
    std::ifstream in(ctx.dir() / pt.subdir / summary_file(cfg.target));
    std::string line;
    std::getline(in, line);
    if (!header_written) {
      out << "b,w," << line << '\n';
      header_written = true;
    }
    while (std::getline(in, line)) {
      if (!line.empty()) out << exact(pt.b) << ',' << exact(pt.w) << ',' << line << '\n';
    }
  }
  json listing = json::array();
  for (const auto& pt : points) listing.push_back(pt.subdir + "/" + kManifestName);
  ctx.metadata()["points"] = listing;
  if (!failures.empty()) throw std::runtime_error("sweep points failed: " + failures);
}

inline void run_command(RunContext& ctx) {
  const std::string& c = ctx.config().command;
  if (c == "table") return run_table(ctx);
  if (c == "tournament") return run_tournament(ctx);
  if (c == "thresholds") return run_thresholds(ctx);
  if (c == "replicator") return run_replicator(ctx);
  if (c == "map7") return run_map7(ctx);
  if (c == "lattice") return run_lattice_command(ctx);
  if (c == "sweep") return run_sweep(ctx);
  throw std::invalid_argument("unknown command " + c);
}

// Runs one command into its own directory and always leaves a manifest behind;
// failed runs are marked incomplete.
inline int run_single(const RunConfig& cfg, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<RunContext> ctx;
  try {
    ctx = std::make_unique<RunContext>(cfg);
  } catch (const std::exception& e) {
    log << "error: cannot create output directory '" << cfg.out_dir << "': " << e.what() << '\n';
    return 1;
  }
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    run_command(*ctx);
  } catch (const std::exception& e) {
    ctx->write_manifest(false, e.what(), elapsed());
    log << "error: " << cfg.command << ": " << e.what() << '\n';
    return 1;
  }
  ctx->write_manifest(true, "", elapsed());
  return 0;
}

}  // namespace detail

// Runs the configured command; returns the process exit status.
inline int dispatch(const RunConfig& cfg, std::ostream& log = std::cerr) { return detail::run_single(cfg, log); }

}  // namespace hypergame::cli

#endif  // HYPERGAME_TOOLS_DISPATCH_HPP
