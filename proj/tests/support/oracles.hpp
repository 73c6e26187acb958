#pragma once

// Independent oracles for derived expected values. Deliberately naive
// implementations (brute-force recursion, direct summation, hand-evaluated
// formulas) that never share code with the library paths they check.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace oracles {

/// Brute-force recursive edit distance (no memoization; lengths <= ~10).
inline std::size_t edit_distance_recursive(const std::vector<std::string>& a,
                                           const std::vector<std::string>& b,
                                           std::size_t i = 0, std::size_t j = 0) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  std::size_t best = edit_distance_recursive(a, b, i + 1, j + 1) +
                     (a[i] == b[j] ? 0 : 1);
  best = std::min(best, edit_distance_recursive(a, b, i + 1, j) + 1);
  best = std::min(best, edit_distance_recursive(a, b, i, j + 1) + 1);
  return best;
}

/// RMS by direct summation over double accumulation.
inline double rms_direct(const std::vector<float>& samples) {
  double acc = 0.0;
  for (float s : samples) acc += double(s) * double(s);
  return std::sqrt(acc / double(samples.size()));
}

/// Fleiss' kappa evaluated directly from the formula, for a list of
/// per-sample "Yes" counts (3 raters, 2 categories).
inline double fleiss_kappa_by_hand(const std::vector<int>& yes_counts) {
  const double n = 3.0;
  double sum_pi = 0.0;
  double yes_total = 0.0;
  for (int yes : yes_counts) {
    int no = 3 - yes;
    sum_pi += (double(yes * yes + no * no) - n) / (n * (n - 1.0));
    yes_total += yes;
  }
  double p_bar = sum_pi / double(yes_counts.size());
  double p_yes = yes_total / (3.0 * double(yes_counts.size()));
  double p_e = p_yes * p_yes + (1.0 - p_yes) * (1.0 - p_yes);
  if (p_e >= 1.0) return 1.0;
  return (p_bar - p_e) / (1.0 - p_e);
}

/// Counts pure insertions needed to turn `original` into `variant`, or -1
/// when `variant` is not `original` with insertions only (order preserved).
inline long pure_insertion_count(const std::vector<std::string>& original,
                                 const std::vector<std::string>& variant) {
  std::size_t oi = 0;
  for (const auto& tok : variant) {
    if (oi < original.size() && original[oi] == tok) ++oi;
  }
  if (oi != original.size()) return -1;
  return long(variant.size()) - long(original.size());
}

/// Multiset symmetric-difference size via sorted copies.
inline std::size_t multiset_diff_by_count(std::vector<std::string> a,
                                          std::vector<std::string> b) {
  std::map<std::string, long> counts;
  for (auto& t : a) ++counts[t];
  for (auto& t : b) --counts[t];
  std::size_t total = 0;
  for (auto& [_, c] : counts) total += std::size_t(c < 0 ? -c : c);
  return total;
}

}  // namespace oracles
