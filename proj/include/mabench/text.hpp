#pragma once

// Text normalization and word-level distance primitives shared by the
// transcript checks, the variant validators and the WER metric.
//
// Normalization rule (fixed project-wide): lowercase, strip punctuation
// except apostrophes, collapse whitespace.

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mabench {

inline std::string normalize_text(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  bool pending_space = false;
  for (unsigned char c : in) {
    char mapped;
    if (std::isalnum(c)) {
      mapped = char(std::tolower(c));
    } else if (c == '\'' || c >= 0x80) {
      // keep apostrophes and non-ASCII bytes untouched
      mapped = char(c);
    } else {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(mapped);
  }
  return out;
}

/// Normalized word tokens of `in`.
inline std::vector<std::string> tokenize(std::string_view in) {
  std::string norm = normalize_text(in);
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < norm.size()) {
    std::size_t space = norm.find(' ', pos);
    if (space == std::string::npos) space = norm.size();
    if (space > pos) tokens.emplace_back(norm.substr(pos, space - pos));
    pos = space + 1;
  }
  return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens,
                               std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

/// Word-level Levenshtein distance (insert/delete/substitute, unit costs).
inline std::size_t token_levenshtein(const std::vector<std::string>& a,
                                     const std::vector<std::string>& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

/// True when `needle` is a (not necessarily contiguous) subsequence of `hay`.
inline bool is_subsequence(const std::vector<std::string>& needle,
                           const std::vector<std::string>& hay) {
  std::size_t i = 0;
  for (const auto& tok : hay) {
    if (i < needle.size() && needle[i] == tok) ++i;
  }
  return i == needle.size();
}

/// Size of the multiset symmetric difference of two token lists.
inline std::size_t multiset_difference_size(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
  std::map<std::string, long> counts;
  for (const auto& t : a) ++counts[t];
  for (const auto& t : b) --counts[t];
  std::size_t diff = 0;
  for (const auto& [_, c] : counts) diff += std::size_t(std::abs(c));
  return diff;
}

/// Distinct tokens whose multiset counts differ between the two lists,
/// sorted for deterministic output.
inline std::vector<std::string> differing_tokens(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::string, long> counts;
  for (const auto& t : a) ++counts[t];
  for (const auto& t : b) --counts[t];
  std::vector<std::string> out;
  for (const auto& [tok, c] : counts) {
    if (c != 0) out.push_back(tok);
  }
  return out;
}

}  // namespace mabench
