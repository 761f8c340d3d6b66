#ifndef HYPERGAME_RNG_HPP
#define HYPERGAME_RNG_HPP

#include <cstdint>
#include <random>

namespace hypergame {

// 64-bit Mersenne Twister seeded through splitmix64. Both the engine and the
// draws below are fully specified, so streams are identical on every platform
// (std:: distributions are not).
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/splitmix64-seed/lemire-bounded/53bit-uniform";

  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n); n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    std::uint64_t x = next();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = next();
        m = static_cast<unsigned __int128>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace hypergame

#endif  // HYPERGAME_RNG_HPP
