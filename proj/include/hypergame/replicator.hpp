#ifndef HYPERGAME_REPLICATOR_HPP
#define HYPERGAME_REPLICATOR_HPP

// Well-mixed dynamics of strategy-set frequencies: the continuous replicator
// equation (RK4) and the discrete multiplicative map.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hypergame/csv.hpp"
#include "hypergame/parallel.hpp"
#include "hypergame/tournament.hpp"

namespace hypergame {

// Frequencies over the table's strategy-set list.
using PopulationState = Eigen::VectorXd;

struct Fitness {
  Eigen::VectorXd payoffs;  // P_i = sum_j x_j table(i, j)
  double mean = 0.0;        // sum_i x_i P_i
};

inline Fitness fitness(const PopulationState& x, const Eigen::MatrixXd& entries) {
  if (x.size() != entries.rows()) {
    throw std::invalid_argument("population state dimension does not match payoff table");
  }
  Fitness f;
  f.payoffs = entries * x;
  f.mean = x.dot(f.payoffs);
  return f;
}

inline Fitness fitness(const PopulationState& x, const PayoffTable& table) { return fitness(x, table.entries); }

// Checks x lies on the simplex (within 1e-9) and returns it renormalized.
inline PopulationState validated_state(const PopulationState& x, Eigen::Index dim) {
  if (x.size() != dim) throw std::invalid_argument("population state dimension does not match payoff table");
  if (!x.allFinite() || x.minCoeff() < 0.0) {
    throw std::invalid_argument("population frequencies must be finite and nonnegative");
  }
  if (std::abs(x.sum() - 1.0) > 1e-9) throw std::invalid_argument("population frequencies must sum to 1");
  return x / x.sum();
}

inline PopulationState barycenter(std::size_t k) {
  return PopulationState::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k));
}

inline PopulationState vertex(std::size_t k, std::size_t i) {
  PopulationState x = PopulationState::Zero(static_cast<Eigen::Index>(k));
  x(static_cast<Eigen::Index>(i)) = 1.0;
  return x;
}

// x_i (P_i - P_bar)
inline Eigen::VectorXd replicator_field(const PopulationState& x, const Eigen::MatrixXd& entries) {
  const Eigen::VectorXd payoffs = entries * x;
  return x.cwiseProduct(payoffs.array().matrix() - Eigen::VectorXd::Constant(x.size(), x.dot(payoffs)));
}

namespace detail {

inline PopulationState project_to_simplex(PopulationState x) {
  x = x.cwiseMax(0.0);
  return x / x.sum();
}

inline PopulationState rk4_step(const PopulationState& x, const Eigen::MatrixXd& a, double dt) {
  const Eigen::VectorXd k1 = replicator_field(x, a);
  const Eigen::VectorXd k2 = replicator_field(x + 0.5 * dt * k1, a);
  const Eigen::VectorXd k3 = replicator_field(x + 0.5 * dt * k2, a);
  const Eigen::VectorXd k4 = replicator_field(x + dt * k3, a);
  return project_to_simplex(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace detail

inline PopulationState replicator_step(const PopulationState& x, const PayoffTable& table, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  return detail::rk4_step(validated_state(x, table.entries.rows()), table.entries, dt);
}

struct ReplicatorOptions {
  double dt = 0.01;
  double t_max = 1e4;
  double convergence_eps = 1e-9;     // stop once ||x_dot||_inf falls below this
  std::size_t sample_stride = 100;   // steps between recorded samples
  double dominance_level = 0.99;
  std::size_t dominance_samples = 100;
  bool store_samples = true;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
    if (!(convergence_eps >= 0.0)) throw std::invalid_argument("convergence_eps must be >= 0");
    if (sample_stride == 0) throw std::invalid_argument("sample_stride must be >= 1");
  }
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<PopulationState> states;
  std::vector<double> mean_payoff;
  PopulationState final_state;
  double final_time = 0.0;
  double final_mean_payoff = 0.0;
  bool converged = false;              // stopped because the flow became stationary
  std::optional<std::size_t> dominant; // set index with frequency > dominance_level, sustained
};

namespace detail {

// Tracks "max frequency above level, same argmax, for `needed` consecutive samples".
class DominanceTracker {
 public:
  DominanceTracker(double level, std::size_t needed) : level_(level), needed_(needed) {}

  void observe(const PopulationState& x) {
    Eigen::Index arg = 0;
    const double top = x.maxCoeff(&arg);
    const auto idx = static_cast<std::size_t>(arg);
    if (top > level_ && streak_ > 0 && idx == leader_) {
      ++streak_;
    } else if (top > level_) {
      leader_ = idx;
      streak_ = 1;
    } else {
      streak_ = 0;
    }
  }

  std::optional<std::size_t> result(bool settled) const {
    if (streak_ >= needed_ || (settled && streak_ > 0)) return leader_;
    return std::nullopt;
  }

 private:
  double level_;
  std::size_t needed_;
  std::size_t leader_ = 0;
  std::size_t streak_ = 0;
};

}  // namespace detail

// Fixed-step RK4 until t_max or until the vector field is below convergence_eps.
inline TrajectoryRecord integrate_replicator(const PopulationState& x0, const PayoffTable& table,
                                             const ReplicatorOptions& opts = {}) {
  opts.validate();
  const Eigen::MatrixXd& a = table.entries;
  PopulationState x = validated_state(x0, a.rows());
  TrajectoryRecord rec;
  detail::DominanceTracker tracker(opts.dominance_level, opts.dominance_samples);

  auto sample = [&](double t) {
    tracker.observe(x);
    if (opts.store_samples) {
      rec.times.push_back(t);
      rec.states.push_back(x);
      rec.mean_payoff.push_back(fitness(x, a).mean);
    }
  };

  const auto total_steps = static_cast<std::size_t>(std::ceil(opts.t_max / opts.dt - 1e-9));
  double t = 0.0;
  sample(t);
  bool last_sampled = true;
  for (std::size_t step = 1; step <= total_steps; ++step) {
    x = detail::rk4_step(x, a, opts.dt);
    t = static_cast<double>(step) * opts.dt;
    last_sampled = false;
    if (step % opts.sample_stride == 0) {
      sample(t);
      last_sampled = true;
    }
    if (replicator_field(x, a).cwiseAbs().maxCoeff() < opts.convergence_eps) {
      rec.converged = true;
      break;
    }
  }
  if (total_steps == 0 || replicator_field(x, a).cwiseAbs().maxCoeff() < opts.convergence_eps) {
    rec.converged = true;
  }
  if (!last_sampled) sample(t);

  rec.final_state = x;
  rec.final_time = t;
  rec.final_mean_payoff = fitness(x, a).mean;
  rec.dominant = tracker.result(rec.converged);
  return rec;
}

// Uniform fitness shift used by the discrete map so every growth factor is positive.
inline double default_map_offset(const PayoffTable& table) {
  return std::max(0.0, -table.entries.minCoeff()) + 1.0;
}

inline constexpr double kExtinctionFloor = 1e-12;

// x_i <- x_i (P_i + sigma) / (P_bar + sigma), with frequencies below 1e-12 set to zero.
inline PopulationState discrete_map_step(const PopulationState& x, const PayoffTable& table, double sigma) {
  const PopulationState state = validated_state(x, table.entries.rows());
  const Fitness f = fitness(state, table.entries);
  const Eigen::VectorXd shifted = f.payoffs.array() + sigma;
  if (shifted.minCoeff() <= 0.0 || f.mean + sigma <= 0.0) {
    std::ostringstream oss;
    oss << "offset sigma = " << sigma << " leaves a nonpositive shifted fitness";
    throw std::domain_error(oss.str());
  }
  PopulationState next = state.cwiseProduct(shifted) / (f.mean + sigma);
  next = (next.array() < kExtinctionFloor).select(0.0, next);
  return next / next.sum();
}

inline TrajectoryRecord iterate_map(const PopulationState& x0, const PayoffTable& table, std::size_t iterations,
                                    double sigma, std::size_t sample_stride = 1) {
  if (sample_stride == 0) throw std::invalid_argument("sample_stride must be >= 1");
  PopulationState x = validated_state(x0, table.entries.rows());
  TrajectoryRecord rec;
  detail::DominanceTracker tracker(0.99, 100);
  // Dominance is judged per iteration; only the recorded samples are strided.
  auto sample = [&](std::size_t t) {
    rec.times.push_back(static_cast<double>(t));
    rec.states.push_back(x);
    rec.mean_payoff.push_back(fitness(x, table.entries).mean);
  };
  tracker.observe(x);
  sample(0);
  for (std::size_t t = 1; t <= iterations; ++t) {
    PopulationState next = discrete_map_step(x, table, sigma);
    const bool still = (next - x).cwiseAbs().maxCoeff() == 0.0;
    x = std::move(next);
    tracker.observe(x);
    if (t % sample_stride == 0 || t == iterations) sample(t);
    if (still) {
      rec.converged = true;
      if (t % sample_stride != 0 && t != iterations) sample(t);
      break;
    }
  }
  rec.final_state = x;
  rec.final_time = rec.times.back();
  rec.final_mean_payoff = fitness(x, table.entries).mean;
  rec.dominant = tracker.result(rec.converged);
  return rec;
}

struct BasinPoint {
  std::size_t i = 0, j = 0, k = 0;  // lattice coordinates, i + j + k = resolution
  double u = 0.0;                   // x of set 0
  double v = 0.0;                   // x of set 1
  std::optional<std::size_t> winner;
  double mean_payoff = 0.0;         // at the starting composition
  bool interior() const { return i > 0 && j > 0 && k > 0; }
};

// Integrates from every point (i, j, k) / resolution of the 2-simplex and
// records where each trajectory ends up. resolution = 1 gives the vertices.
inline std::vector<BasinPoint> basin_scan(const PayoffTable& table, std::size_t resolution,
                                          ReplicatorOptions opts = {}, std::size_t jobs = 0) {
  if (table.size() != 3) throw std::invalid_argument("basin scan needs exactly 3 strategy sets");
  if (resolution == 0) throw std::invalid_argument("basin scan resolution must be >= 1");
  opts.store_samples = false;
  std::vector<BasinPoint> points;
  for (std::size_t i = resolution + 1; i-- > 0;) {
    for (std::size_t j = resolution - i + 1; j-- > 0;) {
      BasinPoint pt;
      pt.i = i;
      pt.j = j;
      pt.k = resolution - i - j;
      pt.u = static_cast<double>(i) / static_cast<double>(resolution);
      pt.v = static_cast<double>(j) / static_cast<double>(resolution);
      points.push_back(pt);
    }
  }
  parallel_for(points.size(), jobs, [&](std::size_t idx) {
    BasinPoint& pt = points[idx];
    PopulationState x(3);
    x << pt.u, pt.v, static_cast<double>(pt.k) / static_cast<double>(resolution);
    x /= x.sum();
    pt.mean_payoff = fitness(x, table.entries).mean;
    pt.winner = integrate_replicator(x, table, opts).dominant;
  });
  return points;
}

// t,x_<set1>,...,x_<setk>,P_bar
inline void write_trajectory_csv(std::ostream& os, const std::vector<StrategySet>& sets, const TrajectoryRecord& rec,
                                 const NumberFormat& fmt = {}) {
  os << 't';
  for (const auto& s : sets) os << ",x_" << s.name();
  os << ",P_bar\n";
  for (std::size_t r = 0; r < rec.times.size(); ++r) {
    os << fmt(rec.times[r]);
    for (Eigen::Index i = 0; i < rec.states[r].size(); ++i) os << ',' << fmt(rec.states[r](i));
    os << ',' << fmt(rec.mean_payoff[r]) << '\n';
  }
}

// u,v,winner_set,P_bar; winner_set is "none" when no set became dominant.
inline void write_basin_csv(std::ostream& os, const std::vector<StrategySet>& sets,
                            const std::vector<BasinPoint>& points, const NumberFormat& fmt = {}) {
  os << "u,v,winner_set,P_bar\n";
  for (const auto& pt : points) {
    os << fmt(pt.u) << ',' << fmt(pt.v) << ',' << (pt.winner ? sets[*pt.winner].name() : std::string("none")) << ','
       << fmt(pt.mean_payoff) << '\n';
  }
}

}  // namespace hypergame

#endif  // HYPERGAME_REPLICATOR_HPP
