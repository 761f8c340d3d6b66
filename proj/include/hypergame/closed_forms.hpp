#ifndef HYPERGAME_CLOSED_FORMS_HPP
#define HYPERGAME_CLOSED_FORMS_HPP

// Closed-form stationary distributions and payoffs for the {C,L} subgames,
// and the critical introspection strengths at which {C,L} self-play overtakes
// {D} and {D,L} exploiters. Used as analytic cross-checks of the generic solver.

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>

#include "hypergame/game.hpp"
#include "hypergame/introspection.hpp"

namespace hypergame {

namespace detail {

// coef * exp(exponent)
struct ExpTerm {
  double coef;
  double exponent;
};

// Ratio of two sums of exponentials, shifted by the largest exponent so that
// neither sum overflows.
inline double exp_ratio(std::initializer_list<ExpTerm> num, std::initializer_list<ExpTerm> den) {
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& t : num) shift = std::max(shift, t.exponent);
  for (const auto& t : den) shift = std::max(shift, t.exponent);
  double n = 0.0;
  double d = 0.0;
  for (const auto& t : num) n += t.coef * std::exp(t.exponent - shift);
  for (const auto& t : den) d += t.coef * std::exp(t.exponent - shift);
  return n / d;
}

}  // namespace detail

// Stationary distribution of {C,L} vs {C,L} over (CC, CL, LC, LL).
struct ClSelfDistribution {
  double v_cc = 0.0;
  double v_cl = 0.0;
  double v_lc = 0.0;
  double v_ll = 0.0;
};

inline ClSelfDistribution cl_self_stationary(const GameParams& p, const IntrospectionConfig& cfg) {
  const double x = cfg.w * (p.b - p.c - p.delta);
  const double v_cc = detail::exp_ratio({{3.0, 2.0 * x}, {1.0, x}}, {{3.0, 2.0 * x}, {10.0, x}, {3.0, 0.0}});
  const double v_rest = detail::exp_ratio({{3.0, x}, {1.0, 0.0}}, {{3.0, 2.0 * x}, {10.0, x}, {3.0, 0.0}});
  return {v_cc, v_rest, v_rest, v_rest};
}

inline double cl_self_payoff(const GameParams& p, const IntrospectionConfig& cfg) {
  return cl_self_stationary(p, cfg).v_cc * (p.b - p.c - p.delta) + p.delta;
}

// Stationary weights of (C,D) and (L,D) when {C,L} faces an unconditional defector.
struct ClVsDDistribution {
  double v_cd = 0.0;
  double v_ld = 0.0;
};

inline ClVsDDistribution cl_vs_d_stationary(const GameParams& p, const IntrospectionConfig& cfg) {
  const double y = cfg.w * (p.c + p.delta);
  const double v_cd = detail::exp_ratio({{1.0, -y}, {1.0, 0.0}}, {{1.0, -y}, {1.0, y}, {2.0, 0.0}});
  const double v_ld = detail::exp_ratio({{1.0, y}, {1.0, 0.0}}, {{1.0, -y}, {1.0, y}, {2.0, 0.0}});
  return {v_cd, v_ld};
}

// Payoff of a {D} player against a {C,L} player.
inline double d_vs_cl_payoff(const GameParams& p, const IntrospectionConfig& cfg) {
  const ClVsDDistribution v = cl_vs_d_stationary(p, cfg);
  return v.v_cd * p.b + v.v_ld * p.delta;
}

// Stationary distribution of {C,L} (row player) vs {D,L} over (CD, CL, LD, LL).
struct ClVsDlDistribution {
  double v_cd = 0.0;
  double v_cl = 0.0;
  double v_ld = 0.0;
  double v_ll = 0.0;
};

inline ClVsDlDistribution cl_vs_dl_stationary(const GameParams& p, const IntrospectionConfig& cfg) {
  const double w = cfg.w;
  const double ea = w * (-p.c - p.delta);
  const double eb = w * (p.b - p.delta);
  const double ec = w * (p.b - p.c - 2.0 * p.delta);
  const auto den = {detail::ExpTerm{10.0, ea}, detail::ExpTerm{10.0, eb}, detail::ExpTerm{6.0, ec},
                    detail::ExpTerm{6.0, 0.0}};
  return {
      detail::exp_ratio({{1.0, ea}, {1.0, eb}, {6.0, ec}}, den),
      detail::exp_ratio({{5.0, ea}, {1.0, eb}, {2.0, 0.0}}, den),
      detail::exp_ratio({{1.0, ea}, {5.0, eb}, {2.0, 0.0}}, den),
      detail::exp_ratio({{3.0, ea}, {3.0, eb}, {2.0, 0.0}}, den),
  };
}

// pi_12: the {D,L} player's payoff against {C,L}; pi_21: the {C,L} player's.
// Every state other than (C,D) pays delta to both sides.
inline ExpectedPayoffPair dl_vs_cl_payoffs(const GameParams& p, const IntrospectionConfig& cfg) {
  const ClVsDlDistribution v = cl_vs_dl_stationary(p, cfg);
  const double voided = v.v_cl + v.v_ld + v.v_ll;
  return {v.v_cd * p.b + voided * p.delta, v.v_cd * (-p.c) + voided * p.delta};
}

class ThresholdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain bisection on a sign change of f over [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200,
                     double tol = 0.0) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0.0) == (f_hi > 0.0)) {
    throw ThresholdError("no sign change bracketed in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  for (int it = 0; it < iterations && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline constexpr double kThresholdBracketLo = 1e-6;
inline constexpr double kThresholdBracketHi = 1e3;

struct DefectorThreshold {
  double alpha = 0.0;       // (c + delta) / (b - c - delta)
  double beta = 0.0;        // (b - delta) / (b - c - delta)
  double x_root = 0.0;      // root of the transcendental equation in x = w (b - c - delta)
  double w_root = 0.0;      // x_root / (b - c - delta)
  double w_crossing = 0.0;  // direct sign change of cl_self_payoff - d_vs_cl_payoff
};

inline void require_positive_surplus(const GameParams& p) {
  if (!(p.b - p.c - p.delta > 0.0)) {
    throw ThresholdError("thresholds require b - c - delta > 0");
  }
}

// Critical w above which {C,L} self-play earns at least as much as a {D}
// player earns against {C,L}. With x = w (b-c-delta), the condition reduces to
//   (3 e^{2x} + e^x)(1 + e^{alpha x}) = beta (3 e^{2x} + 10 e^x + 3),
// solved here after dividing through by e^{2x}. The result is confirmed by
// bisecting the payoff difference directly.
inline DefectorThreshold critical_w_vs_d(const GameParams& p) {
  require_positive_surplus(p);
  const double surplus = p.b - p.c - p.delta;
  DefectorThreshold out;
  out.alpha = (p.c + p.delta) / surplus;
  out.beta = (p.b - p.delta) / surplus;

  const double alpha = out.alpha;
  const double beta = out.beta;
  auto transcendental = [alpha, beta](double x) {
    const double em = std::exp(-x);
    return (3.0 + em) * (1.0 + std::exp(alpha * x)) - beta * (3.0 + 10.0 * em + 3.0 * em * em);
  };
  out.x_root = bisect(transcendental, kThresholdBracketLo * surplus, kThresholdBracketHi * surplus);
  out.w_root = out.x_root / surplus;

  auto difference = [&p](double w) {
    const IntrospectionConfig cfg{w};
    return cl_self_payoff(p, cfg) - d_vs_cl_payoff(p, cfg);
  };
  out.w_crossing = bisect(difference, kThresholdBracketLo, kThresholdBracketHi);

  if (std::abs(out.w_root - out.w_crossing) >= 1e-6) {
    throw ThresholdError("transcendental root " + std::to_string(out.w_root) + " and payoff crossing " +
                         std::to_string(out.w_crossing) + " disagree");
  }
  return out;
}

// Critical w above which {C,L} self-play earns at least as much as a {D,L}
// player earns against {C,L}.
inline double critical_w_vs_dl(const GameParams& p) {
  require_positive_surplus(p);
  auto difference = [&p](double w) {
    const IntrospectionConfig cfg{w};
    return cl_self_payoff(p, cfg) - dl_vs_cl_payoffs(p, cfg).pi_12;
  };
  return bisect(difference, kThresholdBracketLo, kThresholdBracketHi, 200, 1e-8);
}

}  // namespace hypergame

#endif  // HYPERGAME_CLOSED_FORMS_HPP
