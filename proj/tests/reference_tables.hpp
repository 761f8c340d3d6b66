#ifndef HYPERGAME_TESTS_REFERENCE_TABLES_HPP
#define HYPERGAME_TESTS_REFERENCE_TABLES_HPP

// Published 4-decimal payoff tables (c = 1, delta = 0.25) used as external
// reference values by the tournament tests and the acceptance runner.

#include <array>
#include <cstddef>
#include <utility>

namespace reference {

inline constexpr std::array<double, 3> kW = {0.1, 1.0, 10.0};
inline constexpr std::array<double, 5> kB = {1.5, 2.0, 3.0, 4.0, 5.0};

// Pairs-mode cells in the order
//   CD:CL, CL:CD, CD:DL, DL:CD, CL:DL, DL:CL, CD:CD, CL:CL, DL:DL
// with pairs-mode indices CD = 0, CL = 1, DL = 2.
inline constexpr std::array<std::pair<std::size_t, std::size_t>, 9> kPairCells = {{
    {0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}, {0, 0}, {1, 1}, {2, 2},
}};

// [w][b][cell]
inline constexpr double kPairPayoffs[3][5][9] = {
    {
        {0.6197, 0.0000, -0.1290, 0.4985, -0.0616, 0.5616, 0.2375, 0.3137, 0.1887},
        {0.8694, 0.1208, -0.1349, 0.6314, -0.0670, 0.6939, 0.4750, 0.4482, 0.1887},
        {1.3870, 0.3759, -0.1467, 0.9101, -0.0779, 0.9713, 0.9500, 0.7474, 0.1887},
        {1.9285, 0.6485, -0.1583, 1.2060, -0.0885, 1.2656, 1.4251, 1.0887, 0.1887},
        {2.4933, 0.9382, -0.1697, 1.5183, -0.0990, 1.5761, 1.9001, 1.4747, 0.1887},
    },
    {
        {0.5390, 0.0439, -0.1103, 0.4384, 0.0044, 0.4956, 0.1345, 0.3249, 0.1985},
        {0.7712, 0.1254, -0.1313, 0.5713, -0.0110, 0.6154, 0.2689, 0.5603, 0.1985},
        {1.3102, 0.3533, -0.1553, 0.8486, -0.0285, 0.8627, 0.5379, 1.4003, 0.1985},
        {1.8721, 0.6182, -0.1651, 1.1241, -0.0357, 1.1070, 0.8068, 2.5575, 0.1985},
        {2.4211, 0.8879, -0.1689, 1.3940, -0.0384, 1.3459, 1.0758, 3.7529, 0.1985},
    },
    {
        {0.4870, 0.0920, 0.0000, 0.3951, 0.1250, 0.3750, 0.0000, 0.4506, 0.2433},
        {0.6665, 0.1667, 0.0000, 0.4741, 0.1250, 0.4250, 0.0000, 0.9988, 0.2433},
        {1.0000, 0.3334, 0.0000, 0.6321, 0.1250, 0.5250, 0.0000, 2.0000, 0.2433},
        {1.3334, 0.5000, 0.0000, 0.7902, 0.1250, 0.7250, 0.0000, 3.0000, 0.2433},
        {1.6667, 0.6667, 0.0000, 0.9482, 0.1250, 1.3459, 0.0000, 4.0000, 0.2433},
    },
};

// The w = 10, b = 5, DL:CL entry repeats the w = 1 value and is treated as a
// transcription error; comparisons skip it.
inline constexpr std::size_t kSuspectW = 2, kSuspectB = 4, kSuspectCell = 5;

inline constexpr bool is_suspect(std::size_t wi, std::size_t bi, std::size_t cell) {
  return wi == kSuspectW && bi == kSuspectB && cell == kSuspectCell;
}

// The w = 10, b = 4, DL:CL entry (0.7250) disagrees with the combined-score
// table, whose DL row at the same point implies 1.6585 - 0.7902 - 0.2433 = 0.6250.
inline constexpr std::size_t kRowSumConflictB = 3;

inline constexpr bool conflicts_with_row_sum(std::size_t wi, std::size_t bi, std::size_t cell) {
  return wi == kSuspectW && bi == kRowSumConflictB && cell == kSuspectCell;
}

// DL:CL implied by the combined scores: DL row total minus DL:CD and DL:DL.
inline constexpr double implied_dl_vs_cl(std::size_t wi, std::size_t bi);

// Underlined winner of each cross pairing: index of the winning set, one per
// pairing CD:CL, CD:DL, CL:DL, and the best self-play set.
inline constexpr std::size_t kPairWinners[3][5][4] = {
    {{0, 2, 2, 1}, {0, 2, 2, 0}, {0, 2, 2, 0}, {0, 2, 2, 0}, {0, 2, 2, 0}},
    {{0, 2, 2, 1}, {0, 2, 2, 1}, {0, 2, 2, 1}, {0, 2, 2, 1}, {0, 2, 2, 1}},
    {{0, 2, 2, 1}, {0, 2, 2, 1}, {0, 2, 2, 1}, {0, 2, 2, 1}, {0, 2, 2, 1}},
};

// Pairs-mode combined scores [w][set CD, CL, DL][b].
inline constexpr double kPairScores[3][3][5] = {
    {{0.7282, 1.2095, 2.1903, 3.1952, 4.2237},
     {0.2520, 0.5020, 1.0454, 1.6487, 2.3140},
     {1.2488, 1.5139, 2.0701, 2.6602, 3.2830}},
    {{0.5632, 0.9088, 1.6928, 2.5138, 3.3280},
     {0.3733, 0.6747, 1.7251, 3.1400, 4.6024},
     {1.1324, 1.3852, 1.9097, 2.4296, 2.9384}},
    {{0.4870, 0.6666, 1.0001, 1.3335, 1.6669},
     {0.6676, 1.2905, 2.4584, 3.6250, 4.7917},
     {1.0134, 1.1424, 1.4005, 1.6585, 1.9165}},
};

// Underlined top scorer [w][b] in pairs mode.
inline constexpr std::size_t kPairTop[3][5] = {{2, 2, 0, 0, 0}, {2, 2, 2, 1, 1}, {2, 1, 1, 1, 1}};

// All-mode combined scores [w][set C, D, L, CD, CL, DL, CDL][b].
inline constexpr double kAllScores[3][7][5] = {
    {{-0.6922, 0.4513, 2.7912, 5.1998, 7.6751},
     {3.9758, 5.1021, 7.3547, 9.6073, 11.8599},
     {1.7500, 1.7500, 1.7500, 1.7500, 1.7500},
     {1.7639, 2.9035, 5.2085, 7.5470, 9.9180},
     {0.6234, 1.2181, 2.5030, 3.9172, 5.4620},
     {2.9526, 3.5920, 4.9417, 6.3840, 7.9159},
     {1.8086, 2.6090, 4.2846, 6.0573, 7.9231}},
    {{-1.6276, -0.6495, 1.6995, 4.2680, 6.8634},
     {3.1515, 3.9666, 5.5970, 7.2274, 8.8577},
     {1.7500, 1.7500, 1.7500, 1.7500, 1.7500},
     {1.9080, 2.8438, 4.8335, 6.8717, 8.9030},
     {1.0809, 1.8274, 4.1137, 6.9468, 9.8203},
     {3.1069, 3.9551, 5.7315, 7.4868, 9.1944},
     {2.2868, 3.1849, 5.2078, 7.3189, 9.4013}},
    {{-2.7688, -1.7502, 0.2503, 2.2504, 4.2505},
     {2.4621, 2.9622, 3.9622, 4.9623, 5.9623},
     {1.7500, 1.7500, 1.7500, 1.7500, 1.7500},
     {2.3669, 3.0970, 4.5209, 5.9446, 7.3683},
     {1.7908, 3.0383, 5.4253, 7.8105, 10.1957},
     {3.3280, 3.9953, 5.3299, 6.6645, 7.9992},
     {3.0742, 3.8909, 5.5023, 7.1134, 8.7244}},
};

// Underlined top scorer [w][b] in all mode (indices into the 7-set order).
// Three underlines disagree with the printed scores beside them: at w = 1,
// b = 1.5 and b = 2, {D} outscores the underlined {D,L}; at w = 10, b = 3,
// {C,D,L} outscores the underlined {C,L}.
inline constexpr std::size_t kAllTop[3][5] = {{1, 1, 1, 1, 1}, {5, 5, 5, 5, 4}, {5, 5, 4, 4, 4}};

// Highest printed all-mode score at (w, b).
inline constexpr std::size_t printed_all_top(std::size_t wi, std::size_t bi) {
  std::size_t best = 0;
  for (std::size_t s = 1; s < 7; ++s) {
    if (kAllScores[wi][s][bi] > kAllScores[wi][best][bi]) best = s;
  }
  return best;
}

inline constexpr double implied_dl_vs_cl(std::size_t wi, std::size_t bi) {
  return kPairScores[wi][2][bi] - kPairPayoffs[wi][bi][3] - kPairPayoffs[wi][bi][8];
}

}  // namespace reference

#endif  // HYPERGAME_TESTS_REFERENCE_TABLES_HPP
