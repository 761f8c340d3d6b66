#ifndef HYPERGAME_INTROSPECTION_HPP
#define HYPERGAME_INTROSPECTION_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypergame/game.hpp"
#include "hypergame/rng.hpp"

namespace hypergame {

struct IntrospectionConfig {
  double w = 1.0;  // introspection strength

  void validate() const {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("introspection strength w must be finite and >= 0");
    }
  }
};

// Probability of switching to an alternative whose payoff exceeds the current
// one by delta_pi. Branches on the sign so exp() never overflows.
inline double fermi(double delta_pi, double w) {
  if (w == 0.0) return 0.5;
  const double z = w * delta_pi;
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Joint strategy profile (player-1 index i into S1, player-2 index j into S2).
struct JointState {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t flat(std::size_t n) const { return i * n + j; }
  static JointState from_flat(std::size_t index, std::size_t n) { return {index / n, index % n}; }
};

using TransitionMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// mn x mn introspection chain over joint states, row = current state.
// A player whose set is a singleton has no alternative to try; its half of the
// update probability stays on the diagonal.
inline TransitionMatrix build_transition_matrix(const StrategySet& s1, const StrategySet& s2, const GameParams& p,
                                                const IntrospectionConfig& cfg) {
  const std::size_t m = s1.size();
  const std::size_t n = s2.size();
  const auto dim = static_cast<Eigen::Index>(m * n);
  TransitionMatrix M = TransitionMatrix::Zero(dim, dim);

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = static_cast<Eigen::Index>(i * n + j);
      double leave = 0.0;
      if (m > 1) {
        const double current = payoff(s1[i], s2[j], p);
        const double scale = 1.0 / (2.0 * static_cast<double>(m - 1));
        for (std::size_t k = 0; k < m; ++k) {
          if (k == i) continue;
          const double prob = scale * fermi(payoff(s1[k], s2[j], p) - current, cfg.w);
          M(row, static_cast<Eigen::Index>(k * n + j)) = prob;
          leave += prob;
        }
      }
      if (n > 1) {
        const double current = payoff(s2[j], s1[i], p);
        const double scale = 1.0 / (2.0 * static_cast<double>(n - 1));
        for (std::size_t l = 0; l < n; ++l) {
          if (l == j) continue;
          const double prob = scale * fermi(payoff(s2[l], s1[i], p) - current, cfg.w);
          M(row, static_cast<Eigen::Index>(i * n + l)) = prob;
          leave += prob;
        }
      }
      M(row, row) = 1.0 - leave;
    }
  }
  return M;
}

class StationarySolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StationaryDistribution {
  Eigen::VectorXd v;
  double residual = 0.0;        // ||v M - v||_inf
  bool used_power_iteration = false;
};

namespace detail {

inline double stationarity_residual(const TransitionMatrix& M, const Eigen::VectorXd& v) {
  return (v.transpose() * M - v.transpose()).cwiseAbs().maxCoeff();
}

inline bool acceptable(const TransitionMatrix& M, const Eigen::VectorXd& v, double tol) {
  if (!v.allFinite()) return false;
  if (v.minCoeff() < -1e-12) return false;
  if (std::abs(v.sum() - 1.0) > 1e-12) return false;
  return stationarity_residual(M, v) < tol;
}

inline Eigen::VectorXd clean(Eigen::VectorXd v) {
  v = v.cwiseMax(0.0);
  return v / v.sum();
}

}  // namespace detail

inline constexpr double kStationaryTolerance = 1e-10;

// Left fixed vector of a row-stochastic matrix. Solves (M^T - I) v = 0 with the
// last equation replaced by sum(v) = 1; falls back to power iteration when the
// direct solve does not meet the residual tolerance.
inline StationaryDistribution stationary_distribution(const TransitionMatrix& M) {
  const Eigen::Index dim = M.rows();
  if (dim == 0 || M.cols() != dim) {
    throw StationarySolveError("transition matrix must be square and nonempty");
  }
  if (dim == 1) {
    if (!std::isfinite(M(0, 0))) throw StationarySolveError("non-finite transition matrix");
    return {Eigen::VectorXd::Ones(1), 0.0, false};
  }

  Eigen::MatrixXd A = M.transpose() - Eigen::MatrixXd::Identity(dim, dim);
  A.row(dim - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  rhs(dim - 1) = 1.0;
  Eigen::VectorXd v = A.fullPivLu().solve(rhs);

  if (v.allFinite()) {
    Eigen::VectorXd cleaned = detail::clean(v);
    if (detail::acceptable(M, cleaned, kStationaryTolerance)) {
      return {cleaned, detail::stationarity_residual(M, cleaned), false};
    }
  }

  Eigen::RowVectorXd x = Eigen::RowVectorXd::Constant(dim, 1.0 / static_cast<double>(dim));
  for (int iter = 0; iter < 1'000'000; ++iter) {
    Eigen::RowVectorXd next = x * M;
    const double change = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (!(change >= 0.0)) break;  // NaN
    if (change < 1e-13) break;
  }
  Eigen::VectorXd fallback = x.transpose();
  if (fallback.allFinite() && fallback.sum() > 0.0) {
    fallback = detail::clean(fallback);
    if (detail::acceptable(M, fallback, kStationaryTolerance)) {
      return {fallback, detail::stationarity_residual(M, fallback), true};
    }
  }
  throw StationarySolveError("stationary distribution did not reach residual tolerance 1e-10");
}

struct ExpectedPayoffPair {
  double pi_12 = 0.0;  // payoff of the S1 player against S2
  double pi_21 = 0.0;  // payoff of the S2 player against S1
};

// Stationary payoffs of both players; equals the long-run time average.
inline ExpectedPayoffPair expected_payoffs(const StrategySet& s1, const StrategySet& s2, const GameParams& p,
                                           const IntrospectionConfig& cfg) {
  const StationaryDistribution dist = stationary_distribution(build_transition_matrix(s1, s2, p, cfg));
  const std::size_t n = s2.size();
  ExpectedPayoffPair out;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double weight = dist.v(static_cast<Eigen::Index>(i * n + j));
      const PayoffPair pp = base_payoff(s1[i], s2[j], p);
      out.pi_12 += weight * pp.p1;
      out.pi_21 += weight * pp.p2;
    }
  }
  return out;
}

// Runs the literal introspection process and averages payoffs over all steps.
// Independent of the transition-matrix path; used to cross-check it.
inline ExpectedPayoffPair simulate_introspection(const StrategySet& s1, const StrategySet& s2, const GameParams& p,
                                                 const IntrospectionConfig& cfg, std::uint64_t steps,
                                                 std::uint64_t seed) {
  if (steps == 0) throw std::invalid_argument("simulate_introspection needs steps >= 1");
  Rng rng(seed);
  const std::size_t m = s1.size();
  const std::size_t n = s2.size();
  const std::size_t start = rng.uniform_index(m * n);
  std::size_t i = start / n;
  std::size_t j = start % n;

  std::vector<std::uint64_t> visits(m * n, 0);
  for (std::uint64_t t = 0; t < steps; ++t) {
    if (rng.uniform_index(2) == 0) {
      if (m > 1) {
        std::size_t k = rng.uniform_index(m - 1);
        if (k >= i) ++k;
        const double gain = payoff(s1[k], s2[j], p) - payoff(s1[i], s2[j], p);
        if (rng.bernoulli(fermi(gain, cfg.w))) i = k;
      }
    } else {
      if (n > 1) {
        std::size_t l = rng.uniform_index(n - 1);
        if (l >= j) ++l;
        const double gain = payoff(s2[l], s1[i], p) - payoff(s2[j], s1[i], p);
        if (rng.bernoulli(fermi(gain, cfg.w))) j = l;
      }
    }
    ++visits[i * n + j];
  }

  ExpectedPayoffPair out;
  const auto total = static_cast<double>(steps);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const std::uint64_t count = visits[a * n + b];
      if (count == 0) continue;
      const PayoffPair pp = base_payoff(s1[a], s2[b], p);
      out.pi_12 += static_cast<double>(count) * pp.p1 / total;
      out.pi_21 += static_cast<double>(count) * pp.p2 / total;
    }
  }
  return out;
}

}  // namespace hypergame

#endif  // HYPERGAME_INTROSPECTION_HPP
