#ifndef HYPERGAME_GAME_HPP
#define HYPERGAME_GAME_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypergame {

// Canonical order C < D < L; the underlying value is the canonical index.
enum class Strategy : std::uint8_t { C = 0, D = 1, L = 2 };

inline constexpr std::array<Strategy, 3> kAllStrategies = {Strategy::C, Strategy::D, Strategy::L};

constexpr char to_char(Strategy s) {
  switch (s) {
    case Strategy::C: return 'C';
    case Strategy::D: return 'D';
    case Strategy::L: return 'L';
  }
  return '?';
}

inline Strategy strategy_from_char(char ch) {
  switch (ch) {
    case 'C': case 'c': return Strategy::C;
    case 'D': case 'd': return Strategy::D;
    case 'L': case 'l': return Strategy::L;
    default: break;
  }
  throw std::invalid_argument(std::string("unknown strategy '") + ch + "', expected one of C, D, L");
}

// Payoff parameters of the prisoner's dilemma with voluntary participation.
struct GameParams {
  double b = 3.0;      // benefit
  double c = 1.0;      // cost
  double delta = 0.25; // loner payoff

  // Throws std::invalid_argument naming the violated constraint.
  // `allow_any_delta` lifts 0 < delta < b - c for exploratory sweeps.
  void validate(bool allow_any_delta = false) const {
    if (!std::isfinite(b) || !std::isfinite(c) || !std::isfinite(delta)) {
      throw std::invalid_argument("game parameters must be finite");
    }
    if (!(c > 0.0)) {
      throw std::invalid_argument("cost c must be > 0");
    }
    if (!(b > c)) {
      throw std::invalid_argument("benefit b must exceed cost c");
    }
    if (!allow_any_delta && !(delta > 0.0 && delta < b - c)) {
      std::ostringstream oss;
      oss << "loner payoff delta must satisfy 0 < delta < b - c = " << (b - c);
      throw std::invalid_argument(oss.str());
    }
  }

  friend bool operator==(const GameParams&, const GameParams&) = default;
};

struct PayoffPair {
  double p1 = 0.0;
  double p2 = 0.0;
  friend bool operator==(const PayoffPair&, const PayoffPair&) = default;
};

// One-shot payoffs. Any encounter with a loner voids the game.
constexpr PayoffPair base_payoff(Strategy s1, Strategy s2, const GameParams& p) {
  if (s1 == Strategy::L || s2 == Strategy::L) {
    return {p.delta, p.delta};
  }
  if (s1 == Strategy::C) {
    return s2 == Strategy::C ? PayoffPair{p.b - p.c, p.b - p.c} : PayoffPair{-p.c, p.b};
  }
  return s2 == Strategy::C ? PayoffPair{p.b, -p.c} : PayoffPair{0.0, 0.0};
}

// Payoff of the focal player only.
constexpr double payoff(Strategy focal, Strategy other, const GameParams& p) {
  return base_payoff(focal, other, p).p1;
}

// Nonempty subset of {C, D, L}, stored as a bitmask and iterated in canonical order.
class StrategySet {
 public:
  constexpr StrategySet() = default;

  static constexpr StrategySet from_mask(std::uint8_t mask) {
    if (mask == 0 || mask > 7) {
      throw std::invalid_argument("strategy set mask must be in [1, 7]");
    }
    StrategySet s;
    s.mask_ = mask;
    for (Strategy st : kAllStrategies) {
      if (mask & bit(st)) s.members_[s.size_++] = st;
    }
    return s;
  }

  static StrategySet from_strategies(std::initializer_list<Strategy> list) {
    std::uint8_t mask = 0;
    for (Strategy s : list) {
      if (mask & bit(s)) {
        throw std::invalid_argument("duplicate strategy in set");
      }
      mask |= bit(s);
    }
    if (mask == 0) throw std::invalid_argument("strategy set must be nonempty");
    return from_mask(mask);
  }

  // Accepts "CL", "lc", "{C,L}", "C,L"; rejects empty input and duplicates.
  static StrategySet parse(std::string_view text) {
    std::uint8_t mask = 0;
    for (char ch : text) {
      if (ch == '{' || ch == '}' || ch == ',' || ch == ' ') continue;
      Strategy s = strategy_from_char(ch);
      if (mask & bit(s)) {
        throw std::invalid_argument("duplicate strategy in set '" + std::string(text) + "'");
      }
      mask |= bit(s);
    }
    if (mask == 0) {
      throw std::invalid_argument("strategy set '" + std::string(text) + "' is empty");
    }
    return from_mask(mask);
  }

  constexpr std::size_t size() const { return size_; }
  constexpr std::uint8_t mask() const { return mask_; }
  constexpr Strategy operator[](std::size_t i) const { return members_[i]; }
  constexpr bool contains(Strategy s) const { return (mask_ & bit(s)) != 0; }
  std::span<const Strategy> members() const { return {members_.data(), size_}; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.begin() + static_cast<std::ptrdiff_t>(size_); }

  // Position in the canonical seven-set order {C},{D},{L},{C,D},{C,L},{D,L},{C,D,L}.
  constexpr std::size_t canonical_index() const {
    constexpr std::array<std::size_t, 8> index_of_mask = {0, 0, 1, 3, 2, 4, 5, 6};
    return index_of_mask[mask_];
  }

  std::string name() const {
    std::string out;
    for (Strategy s : *this) out.push_back(to_char(s));
    return out;
  }

  friend constexpr bool operator==(const StrategySet& a, const StrategySet& b) { return a.mask_ == b.mask_; }
  friend constexpr bool operator<(const StrategySet& a, const StrategySet& b) {
    return a.canonical_index() < b.canonical_index();
  }

 private:
  static constexpr std::uint8_t bit(Strategy s) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s)); }

  std::array<Strategy, 3> members_{};
  std::uint8_t size_ = 0;
  std::uint8_t mask_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const StrategySet& s) { return os << s.name(); }

enum class SetMode { Pairs, All };

inline SetMode parse_set_mode(std::string_view text) {
  if (text == "pairs") return SetMode::Pairs;
  if (text == "all") return SetMode::All;
  throw std::invalid_argument("mode must be 'pairs' or 'all', got '" + std::string(text) + "'");
}

inline const char* to_string(SetMode mode) { return mode == SetMode::Pairs ? "pairs" : "all"; }

inline std::vector<StrategySet> enumerate_strategy_sets(SetMode mode) {
  // masks: C=1, D=2, L=4
  if (mode == SetMode::Pairs) {
    return {StrategySet::from_mask(0b011), StrategySet::from_mask(0b101), StrategySet::from_mask(0b110)};
  }
  return {StrategySet::from_mask(0b001), StrategySet::from_mask(0b010), StrategySet::from_mask(0b100),
          StrategySet::from_mask(0b011), StrategySet::from_mask(0b101), StrategySet::from_mask(0b110),
          StrategySet::from_mask(0b111)};
}

}  // namespace hypergame

#endif  // HYPERGAME_GAME_HPP
