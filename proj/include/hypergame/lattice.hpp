#ifndef HYPERGAME_LATTICE_HPP
#define HYPERGAME_LATTICE_HPP

// Asynchronous imitation of strategy sets on a periodic square lattice. Each
// edge pays the precomputed stationary introspection payoff of the two sets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypergame/csv.hpp"
#include "hypergame/introspection.hpp"
#include "hypergame/parallel.hpp"
#include "hypergame/rng.hpp"
#include "hypergame/tournament.hpp"

namespace hypergame {

// What one unit of LatticeConfig::steps means.
enum class UpdateUnit {
  Attempt,  // a single focal-player update attempt
  Sweep,    // width * height attempts
};

struct LatticeConfig {
  std::size_t width = 100;
  std::size_t height = 100;
  std::vector<StrategySet> sets;
  double K = 0.1;  // imitation noise
  std::uint64_t steps = 10'000'000;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> snapshot_times;  // in units of `unit`
  std::size_t replicates = 10;
  UpdateUnit unit = UpdateUnit::Attempt;
  std::size_t jobs = 0;  // worker threads for replicates, 0 = hardware concurrency

  std::size_t nodes() const { return width * height; }
  std::uint64_t attempts_per_unit() const { return unit == UpdateUnit::Sweep ? nodes() : 1; }
  std::uint64_t total_attempts() const { return steps * attempts_per_unit(); }

  void validate() const {
    if (width < 2 || height < 2) throw std::invalid_argument("lattice width and height must be >= 2");
    if (sets.empty()) throw std::invalid_argument("lattice needs at least one strategy set");
    if (sets.size() > 255) throw std::invalid_argument("too many strategy sets");
    if (!(K > 0.0) || !std::isfinite(K)) throw std::invalid_argument("K must be finite and > 0");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    for (auto t : snapshot_times) {
      if (t > steps) throw std::invalid_argument("snapshot time " + std::to_string(t) + " exceeds steps");
    }
  }
};

class LatticeGrid {
 public:
  LatticeGrid() = default;
  LatticeGrid(std::size_t width, std::size_t height, std::uint8_t fill = 0)
      : width_(width), height_(height), cells_(width * height, fill) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return cells_.size(); }
  std::uint8_t operator[](std::size_t node) const { return cells_[node]; }
  std::uint8_t& operator[](std::size_t node) { return cells_[node]; }
  std::size_t node(std::size_t x, std::size_t y) const { return y * width_ + x; }
  std::uint8_t at(std::size_t x, std::size_t y) const { return cells_[node(x, y)]; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  // Von Neumann neighbours with periodic wraparound: left, right, up, down.
  std::array<std::size_t, 4> neighbors(std::size_t n) const {
    const std::size_t x = n % width_;
    const std::size_t row = n - x;
    const std::size_t left = row + (x == 0 ? width_ - 1 : x - 1);
    const std::size_t right = row + (x + 1 == width_ ? 0 : x + 1);
    const std::size_t up = n < width_ ? n + (height_ - 1) * width_ : n - width_;
    const std::size_t down = n + width_ >= cells_.size() ? n + width_ - cells_.size() : n + width_;
    return {left, right, up, down};
  }

  std::vector<std::size_t> counts(std::size_t num_sets) const {
    std::vector<std::size_t> out(num_sets, 0);
    for (auto c : cells_) ++out[c];
    return out;
  }

  std::uint64_t generation = 0;  // update attempts applied so far

  friend bool operator==(const LatticeGrid& a, const LatticeGrid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.cells_ == b.cells_;
  }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Row-major copy of a payoff table for the inner loop.
class EdgePayoffs {
 public:
  explicit EdgePayoffs(const PayoffTable& table) : k_(table.size()), values_(k_ * k_) {
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = 0; j < k_; ++j) values_[i * k_ + j] = table(i, j);
    }
  }
  std::size_t size() const { return k_; }
  double operator()(std::size_t row, std::size_t col) const { return values_[row * k_ + col]; }

 private:
  std::size_t k_;
  std::vector<double> values_;
};

inline LatticeGrid init_lattice(const LatticeConfig& cfg, Rng& rng) {
  LatticeGrid grid(cfg.width, cfg.height);
  const std::size_t k = cfg.sets.size();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    grid[n] = static_cast<std::uint8_t>(rng.uniform_index(k));
  }
  return grid;
}

inline LatticeGrid init_lattice(const LatticeConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  return init_lattice(cfg, rng);
}

// Average edge payoff of `node` over its four neighbours.
inline double cell_payoff(const LatticeGrid& grid, std::size_t node, const EdgePayoffs& edges) {
  const std::size_t own = grid[node];
  const auto nb = grid.neighbors(node);
  return 0.25 * (edges(own, grid[nb[0]]) + edges(own, grid[nb[1]]) + edges(own, grid[nb[2]]) +
                 edges(own, grid[nb[3]]));
}

struct StepOutcome {
  std::size_t focal = 0;
  std::size_t neighbor = 0;
  bool changed = false;
  std::uint8_t replaced = 0;  // focal's set before the update, valid when changed
};

// One asynchronous update attempt: a random focal site imitates a random
// neighbour with probability 1 / (1 + exp(-(E_Y - E_X) / K)).
inline StepOutcome mc_step(LatticeGrid& grid, const EdgePayoffs& edges, double K, Rng& rng) {
  StepOutcome out;
  out.focal = rng.uniform_index(grid.size());
  out.neighbor = grid.neighbors(out.focal)[rng.uniform_index(4)];
  ++grid.generation;
  if (grid[out.focal] == grid[out.neighbor]) return out;
  const double gain = cell_payoff(grid, out.neighbor, edges) - cell_payoff(grid, out.focal, edges);
  if (rng.uniform01() < fermi(gain, 1.0 / K)) {
    out.replaced = grid[out.focal];
    grid[out.focal] = grid[out.neighbor];
    out.changed = true;
  }
  return out;
}

struct FractionSample {
  std::uint64_t attempts = 0;
  std::vector<double> fractions;
};

struct Snapshot {
  std::uint64_t step = 0;  // in units of LatticeConfig::unit
  LatticeGrid grid;
};

struct ReplicateResult {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::vector<FractionSample> samples;
  LatticeGrid final_grid;
  std::vector<Snapshot> snapshots;

  const std::vector<double>& final_fractions() const { return samples.back().fractions; }
  std::size_t dominant_set() const {
    const auto& f = final_fractions();
    return static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
  }
};

struct LatticeResult {
  std::vector<StrategySet> sets;
  std::size_t nodes = 0;
  std::vector<ReplicateResult> replicates;
};

namespace detail {

inline std::vector<double> fractions_of(const std::vector<std::size_t>& counts, std::size_t nodes) {
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f[i] = static_cast<double>(counts[i]) / static_cast<double>(nodes);
  }
  return f;
}

inline ReplicateResult run_replicate(const LatticeConfig& cfg, const EdgePayoffs& edges, std::size_t replicate) {
  ReplicateResult res;
  res.replicate = replicate;
  res.seed = cfg.seed + replicate;
  Rng rng(res.seed);
  LatticeGrid grid = init_lattice(cfg, rng);

  const std::size_t k = cfg.sets.size();
  const std::size_t nodes = grid.size();
  const std::uint64_t total = cfg.total_attempts();
  const std::uint64_t per_unit = cfg.attempts_per_unit();

  std::vector<std::uint64_t> snap_attempts;
  for (auto t : cfg.snapshot_times) snap_attempts.push_back(t * per_unit);
  std::sort(snap_attempts.begin(), snap_attempts.end());
  snap_attempts.erase(std::unique(snap_attempts.begin(), snap_attempts.end()), snap_attempts.end());
  auto next_snap = snap_attempts.begin();

  std::vector<std::size_t> counts = grid.counts(k);
  auto record = [&](std::uint64_t attempts) {
    res.samples.push_back({attempts, fractions_of(counts, nodes)});
  };
  auto snapshot_due = [&](std::uint64_t attempts) {
    while (next_snap != snap_attempts.end() && *next_snap == attempts) {
      res.snapshots.push_back({attempts / per_unit, grid});
      ++next_snap;
    }
  };

  record(0);
  snapshot_due(0);
  std::uint64_t attempt = 0;
  while (attempt < total) {
    if (*std::max_element(counts.begin(), counts.end()) == nodes) {
      // Monomorphic grids are absorbing; fill in the remaining samples and snapshots.
      grid.generation = total;
      for (std::uint64_t a = (attempt / nodes + 1) * nodes; a <= total; a += nodes) record(a);
      if (total % nodes != 0) record(total);
      for (; next_snap != snap_attempts.end(); ++next_snap) res.snapshots.push_back({*next_snap / per_unit, grid});
      attempt = total;
      break;
    }
    const StepOutcome step = mc_step(grid, edges, cfg.K, rng);
    ++attempt;
    if (step.changed) {
      --counts[step.replaced];
      ++counts[grid[step.focal]];
    }
    if (attempt % nodes == 0 || attempt == total) record(attempt);
    snapshot_due(attempt);
  }
  res.final_grid = grid;
  return res;
}

}  // namespace detail

inline LatticeResult run_lattice(const LatticeConfig& cfg, const PayoffTable& table) {
  cfg.validate();
  if (cfg.sets != table.sets) throw std::invalid_argument("lattice strategy sets do not match the payoff table");
  const EdgePayoffs edges(table);
  LatticeResult result{cfg.sets, cfg.nodes(), std::vector<ReplicateResult>(cfg.replicates)};
  parallel_for(cfg.replicates, cfg.jobs,
               [&](std::size_t r) { result.replicates[r] = detail::run_replicate(cfg, edges, r); });
  return result;
}

// replicate,sweep,x_<set1>,...,x_<setk>; sweep = attempts / (width * height).
inline void write_fractions_csv(std::ostream& os, const LatticeResult& result, const NumberFormat& fmt = {}) {
  os << "replicate,sweep";
  for (const auto& s : result.sets) os << ",x_" << s.name();
  os << '\n';
  const NumberFormat exact{};
  for (const auto& rep : result.replicates) {
    for (const auto& sample : rep.samples) {
      os << rep.replicate << ',' << exact(static_cast<double>(sample.attempts) / static_cast<double>(result.nodes));
      for (double f : sample.fractions) os << ',' << fmt(f);
      os << '\n';
    }
  }
}

// Plain PGM (P2); each pixel is the canonical index of the cell's strategy set.
inline void write_pgm(std::ostream& os, const LatticeGrid& grid, const std::vector<StrategySet>& sets) {
  os << "P2\n" << grid.width() << ' ' << grid.height() << "\n6\n";
  for (std::size_t y = 0; y < grid.height(); ++y) {
    for (std::size_t x = 0; x < grid.width(); ++x) {
      if (x) os << ' ';
      os << sets[grid.at(x, y)].canonical_index();
    }
    os << '\n';
  }
}

}  // namespace hypergame

#endif  // HYPERGAME_LATTICE_HPP
