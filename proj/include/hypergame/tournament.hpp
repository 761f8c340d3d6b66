#ifndef HYPERGAME_TOURNAMENT_HPP
#define HYPERGAME_TOURNAMENT_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hypergame/csv.hpp"
#include "hypergame/game.hpp"
#include "hypergame/introspection.hpp"

namespace hypergame {

// entries(i, j): stationary payoff of sets[i] when playing against sets[j].
struct PayoffTable {
  std::vector<StrategySet> sets;
  Eigen::MatrixXd entries;
  GameParams params;
  IntrospectionConfig config;

  std::size_t size() const { return sets.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::optional<std::size_t> index_of(const StrategySet& s) const {
    auto it = std::find(sets.begin(), sets.end(), s);
    if (it == sets.end()) return std::nullopt;
    return static_cast<std::size_t>(it - sets.begin());
  }
};

inline PayoffTable build_payoff_table(const std::vector<StrategySet>& sets, const GameParams& p,
                                      const IntrospectionConfig& cfg) {
  if (sets.empty()) throw std::invalid_argument("payoff table needs at least one strategy set");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      if (sets[i] == sets[j]) {
        throw std::invalid_argument("duplicate strategy set " + sets[i].name() + " in payoff table");
      }
    }
  }
  const auto k = static_cast<Eigen::Index>(sets.size());
  PayoffTable table{sets, Eigen::MatrixXd::Zero(k, k), p, cfg};
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) {
      const auto& si = sets[static_cast<std::size_t>(i)];
      const auto& sj = sets[static_cast<std::size_t>(j)];
      ExpectedPayoffPair pair;
      try {
        pair = expected_payoffs(si, sj, p, cfg);
      } catch (const StationarySolveError& e) {
        throw StationarySolveError("pairing " + si.name() + ":" + sj.name() + ": " + e.what());
      }
      table.entries(i, j) = pair.pi_12;
      // Self-play: both roles are the same set, keep the row player's value for both.
      table.entries(j, i) = (i == j) ? pair.pi_12 : pair.pi_21;
    }
  }
  return table;
}

inline constexpr double kTieTolerance = 1e-9;

struct PairOutcome {
  std::size_t i = 0;
  std::size_t j = 0;
  double payoff_i = 0.0;  // table(i, j)
  double payoff_j = 0.0;  // table(j, i)
  std::optional<std::size_t> winner;  // empty on a tie
};

struct RankEntry {
  std::size_t set_index = 0;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  bool tied = false;     // within kTieTolerance of a neighbour; order falls back to canonical set order
};

struct TournamentReport {
  std::vector<PairOutcome> pairwise;
  std::vector<double> combined_scores;
  std::vector<RankEntry> ranking;
  std::optional<std::size_t> best_self_play;  // empty on a tie

  std::size_t top_scorer() const { return ranking.front().set_index; }
};

inline TournamentReport tournament_report(const PayoffTable& table) {
  const std::size_t k = table.size();
  TournamentReport report;

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      PairOutcome outcome{i, j, table(i, j), table(j, i), std::nullopt};
      if (std::abs(outcome.payoff_i - outcome.payoff_j) >= kTieTolerance) {
        outcome.winner = outcome.payoff_i > outcome.payoff_j ? i : j;
      }
      report.pairwise.push_back(outcome);
    }
  }

  report.combined_scores.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    report.combined_scores[i] = table.entries.row(static_cast<Eigen::Index>(i)).sum();
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = report.combined_scores[a];
    const double sb = report.combined_scores[b];
    if (std::abs(sa - sb) < kTieTolerance) return table.sets[a] < table.sets[b];
    return sa > sb;
  });
  for (std::size_t r = 0; r < k; ++r) {
    report.ranking.push_back({order[r], report.combined_scores[order[r]], r + 1, false});
  }
  for (std::size_t r = 0; r + 1 < k; ++r) {
    if (std::abs(report.ranking[r].score - report.ranking[r + 1].score) < kTieTolerance) {
      report.ranking[r].tied = report.ranking[r + 1].tied = true;
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < k; ++i) {
    if (table(i, i) > table(best, best)) best = i;
  }
  bool tie = false;
  for (std::size_t i = 0; i < k; ++i) {
    if (i != best && std::abs(table(i, i) - table(best, best)) < kTieTolerance) tie = true;
  }
  if (!tie) report.best_self_play = best;
  return report;
}

// One row per ordered pair: w,b,c,delta,set_row,set_col,payoff
inline void write_payoff_table_csv(std::ostream& os, const PayoffTable& table, const NumberFormat& fmt = {},
                                   bool header = true) {
  if (header) os << "w,b,c,delta,set_row,set_col,payoff\n";
  const NumberFormat exact{};
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t j = 0; j < table.size(); ++j) {
      os << exact(table.config.w) << ',' << exact(table.params.b) << ',' << exact(table.params.c) << ','
         << exact(table.params.delta) << ',' << table.sets[i].name() << ',' << table.sets[j].name() << ','
         << fmt(table(i, j)) << '\n';
    }
  }
}

// set,combined_score,rank in ranking order.
inline void write_report_csv(std::ostream& os, const PayoffTable& table, const TournamentReport& report,
                             const NumberFormat& fmt = {}, bool header = true) {
  if (header) os << "set,combined_score,rank\n";
  for (const auto& entry : report.ranking) {
    os << table.sets[entry.set_index].name() << ',' << fmt(entry.score) << ',' << entry.rank << '\n';
  }
}

}  // namespace hypergame

#endif  // HYPERGAME_TOURNAMENT_HPP
