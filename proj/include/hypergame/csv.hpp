#ifndef HYPERGAME_CSV_HPP
#define HYPERGAME_CSV_HPP

#include <charconv>
#include <cstdio>
#include <optional>
#include <string>

namespace hypergame {

// Numeric formatting for CSV output: shortest text that round-trips the
// double, unless a fixed number of decimals is requested.
struct NumberFormat {
  std::optional<int> decimals;

  std::string operator()(double x) const {
    char buf[64];
    if (decimals) {
      std::snprintf(buf, sizeof buf, "%.*f", *decimals, x);
      return buf;
    }
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  }
};

}  // namespace hypergame

#endif  // HYPERGAME_CSV_HPP
