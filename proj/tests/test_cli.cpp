#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "dispatch.hpp"
#include "run_config.hpp"

using namespace hypergame;
using namespace hypergame::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hypergame-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json manifest_of(const fs::path& dir) { return json::parse(slurp(dir / kManifestName)); }

int run_cli(const std::string& args) {
  const char* exe = std::getenv("HYPERGAME_CLI");
  REQUIRE(exe != nullptr);
  const std::string cmd = std::string(exe) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void check_manifest_outputs(const fs::path& dir) {
  const json m = manifest_of(dir);
  for (const auto& f : m["outputs"]) CHECK(fs::exists(dir / f.get<std::string>()));
  std::size_t manifests = 0;
  for (const auto& e : fs::directory_iterator(dir)) manifests += e.path().filename() == kManifestName;
  CHECK(manifests == 1);
}

}  // namespace

TEST_CASE("defaults and flag parsing", "[cli]") {
  const RunConfig cfg = parse_config({"table", "--b", "1.5", "--w", "0.1", "--mode", "pairs"});
  CHECK(cfg.command == "table");
  CHECK(cfg.params.b == 1.5);
  CHECK(cfg.params.c == 1.0);
  CHECK(cfg.params.delta == 0.25);
  CHECK(cfg.w == 0.1);
  CHECK(cfg.mode == SetMode::Pairs);

  const RunConfig d = parse_config({"lattice"});
  CHECK(d.params.b == 3.0);
  CHECK(d.w == 1.0);
  CHECK(d.K == 0.1);
  CHECK(d.width == 100);
  CHECK(d.height == 100);
  CHECK(d.steps == 10'000'000);
  CHECK(d.replicates == 10);
  CHECK(d.update_unit == UpdateUnit::Attempt);

  const RunConfig s = parse_config({"sweep", "--b-list", "1.5,2", "--w-list", "0.1", "1", "--snapshots", "0,10"});
  CHECK(s.b_list == std::vector<double>{1.5, 2.0});
  CHECK(s.w_list == std::vector<double>{0.1, 1.0});
  CHECK(s.snapshots == std::vector<std::uint64_t>{0, 10});
}

TEST_CASE("invalid input names the flag", "[cli]") {
  auto message = [](std::vector<std::string> args) {
    try {
      parse_config(args);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message({}).find("command is required") != std::string::npos);
  CHECK(message({"table", "--w", "-1"}).find("--w") != std::string::npos);
  CHECK(message({"table", "--delta", "3"}).find("--delta") != std::string::npos);
  CHECK(message({"table", "--mode", "few"}).find("--mode") != std::string::npos);
  CHECK(message({"fly"}).find("unknown command") != std::string::npos);
  CHECK(message({"lattice", "--K", "0"}).find("--K") != std::string::npos);
  CHECK(message({"replicator", "--x0", "0.5,0.6,0"}).find("--x0") != std::string::npos);
  CHECK(message({"replicator", "--mode", "all", "--resolution", "3"}).find("--resolution") != std::string::npos);
  CHECK(message({"table", "--bogus", "1"}) != "no error");
  CHECK_NOTHROW(parse_config({"table", "--delta", "3", "--allow-any-delta"}));
}

TEST_CASE("config files", "[cli]") {
  const fs::path dir = scratch("config");
  const fs::path file = dir / "run.json";
  {
    std::ofstream(file) << R"({"command": "tournament", "b": 4, "w": 10, "t_max": 5, "mode": "all"})";
  }
  const RunConfig cfg = parse_config({"--config", file.string(), "--w", "0.1"});
  CHECK(cfg.command == "tournament");
  CHECK(cfg.params.b == 4.0);
  CHECK(cfg.w == 0.1);  // flag wins
  CHECK(cfg.t_max == 5.0);
  CHECK(cfg.mode == SetMode::All);

  { std::ofstream(file) << R"({"b": 4, "colour": "red"})"; }
  CHECK_THROWS_WITH(parse_config({"table", "--config", file.string()}), Catch::Matchers::ContainsSubstring("colour"));
  { std::ofstream(file) << R"({"b": "four"})"; }
  CHECK_THROWS_AS(parse_config({"table", "--config", file.string()}), ConfigError);
  { std::ofstream(file) << "not json"; }
  CHECK_THROWS_AS(parse_config({"table", "--config", file.string()}), ConfigError);
  CHECK_THROWS_AS(parse_config({"table", "--config", (dir / "missing.json").string()}), ConfigError);
}

TEST_CASE("dispatch writes outputs and a manifest", "[cli]") {
  const fs::path root = scratch("dispatch");
  std::ostringstream log;

  SECTION("tournament with seven sets") {
    RunConfig cfg = parse_config({"tournament", "--mode", "all", "--b", "5", "--w", "10", "--out", (root / "t").string()});
    REQUIRE(dispatch(cfg, log) == 0);
    const std::string report = slurp(root / "t" / "tournament_report.csv");
    CHECK(report.rfind("set,combined_score,rank\nCL,", 0) == 0);
    std::istringstream table(slurp(root / "t" / "payoff_table.csv"));
    std::size_t lines = 0;
    for (std::string l; std::getline(table, l);) ++lines;
    CHECK(lines == 1 + 49);
    const json m = manifest_of(root / "t");
    CHECK(m["complete"] == true);
    CHECK(m["rng_algorithm"] == Rng::kAlgorithm);
    CHECK(m["config"]["w"] == 10.0);
    CHECK(m["version"].is_string());
    check_manifest_outputs(root / "t");
  }
  SECTION("thresholds as JSON") {
    RunConfig cfg = parse_config({"thresholds", "--b", "1.9", "--format", "json", "--out", (root / "th").string()});
    REQUIRE(dispatch(cfg, log) == 0);
    const json j = json::parse(slurp(root / "th" / "thresholds.json"));
    const double a = j["vs_D"]["w_transcendental"];
    const double b = j["vs_D"]["w_bisection"];
    CHECK(std::abs(a - b) < 1e-6);
    CHECK(std::abs(j["vs_DL"]["w_bisection"].get<double>() - 1.37) < 0.05);
  }
  SECTION("lattice with snapshots") {
    RunConfig cfg = parse_config({"lattice", "--mode", "pairs", "--w", "10", "--steps", "1000000", "--width", "50",
                                  "--height", "50", "--replicates", "2", "--snapshots", "0", "--out",
                                  (root / "l").string()});
    REQUIRE(dispatch(cfg, log) == 0);
    const std::string finals = slurp(root / "l" / "final_fractions.csv");
    CHECK(finals.find(",CL\n") != std::string::npos);
    CHECK(fs::exists(root / "l" / "snapshots" / "r0_s0.pgm"));
    const json side = json::parse(slurp(root / "l" / "snapshots" / "r1_final.json"));
    CHECK(side["legend"]["4"] == "CL");
    CHECK(side["seed"] == 2);
    check_manifest_outputs(root / "l");
  }
  SECTION("sweep concatenates per-point results") {
    RunConfig cfg = parse_config({"sweep", "--b-list", "1.5,3", "--w-list", "0.1,10", "--jobs", "2", "--out",
                                  (root / "s").string()});
    REQUIRE(dispatch(cfg, log) == 0);
    std::istringstream in(slurp(root / "s" / "sweep.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "b,w,set,combined_score,rank");
    std::size_t rows = 0;
    for (std::string l; std::getline(in, l);) ++rows;
    CHECK(rows == 4 * 3);
    for (const char* sub : {"b1.5_w0.1", "b1.5_w10", "b3_w0.1", "b3_w10"}) {
      CHECK(manifest_of(root / "s" / sub)["complete"] == true);
      check_manifest_outputs(root / "s" / sub);
    }
  }
  SECTION("runtime failures leave an incomplete manifest") {
    RunConfig cfg = parse_config({"map7", "--sigma", "-10", "--out", (root / "bad").string()});
    CHECK(dispatch(cfg, log) == 1);
    const json m = manifest_of(root / "bad");
    CHECK(m["complete"] == false);
    CHECK(m["error"].get<std::string>().find("sigma") != std::string::npos);
  }
}

TEST_CASE("executable exit codes and byte-identical reruns", "[cli]") {
  const fs::path root = scratch("exe");
  CHECK(run_cli("") == 2);
  CHECK(run_cli("table --w -1") == 2);
  CHECK(run_cli("--help") == 0);

  const std::string common = " --w 1 --width 30 --height 30 --steps 200000 --replicates 2 --snapshots 100 --mode all";
  REQUIRE(run_cli("lattice" + common + " --out " + (root / "a").string()) == 0);
  REQUIRE(run_cli("lattice" + common + " --out " + (root / "b").string()) == 0);
  for (const char* f : {"fractions.csv", "final_fractions.csv", "snapshots/r0_s100.pgm", "snapshots/r1_final.pgm"}) {
    INFO(f);
    const std::string a = slurp(root / "a" / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(root / "b" / f));
  }
  REQUIRE(run_cli("replicator --w 1 --resolution 4 --out " + (root / "r1").string()) == 0);
  REQUIRE(run_cli("replicator --w 1 --resolution 4 --out " + (root / "r2").string()) == 0);
  CHECK(slurp(root / "r1" / "trajectory.csv") == slurp(root / "r2" / "trajectory.csv"));
  CHECK(slurp(root / "r1" / "basin.csv") == slurp(root / "r2" / "basin.csv"));
}
