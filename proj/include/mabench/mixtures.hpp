#pragma once

// Sound-pair synthesis: SNR-balanced mixtures of single-event clips,
// arranged into the five discriminative pair patterns, plus the fixed
// response templates that turn event bookkeeping into training targets.
// Labels are substituted bare (no brackets) into the emitted text.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mabench/audio.hpp"
#include "mabench/error.hpp"
#include "mabench/rng.hpp"
#include "mabench/text.hpp"

namespace mabench {

/// The five audio-pair patterns. With base clips A1/A2 sharing one event and
/// A3/A4 carrying two further distinct events:
///   same_event          A1 vs A2        both sides the one shared event
///   different_event     A1 vs A3        one distinct event per side
///   added_event         A1 vs A1+A3     right side adds one event
///   two_added_events    A1+A3 vs A1+A4  both sides add a distinct event
///   common_event        A1+A3 vs A1+A4  asked for the shared event instead
enum class MixPattern {
  same_event,
  different_event,
  added_event,
  two_added_events,
  common_event,
};

inline constexpr MixPattern kAllMixPatterns[] = {
    MixPattern::same_event, MixPattern::different_event, MixPattern::added_event,
    MixPattern::two_added_events, MixPattern::common_event};

inline std::string to_string(MixPattern p) {
  switch (p) {
    case MixPattern::same_event: return "same_event";
    case MixPattern::different_event: return "different_event";
    case MixPattern::added_event: return "added_event";
    case MixPattern::two_added_events: return "two_added_events";
    case MixPattern::common_event: return "common_event";
  }
  throw DataError("bad MixPattern");
}

inline MixPattern mix_pattern_from_string(const std::string& s) {
  for (MixPattern p : kAllMixPatterns) {
    if (to_string(p) == s) return p;
  }
  throw DataError("unknown mix pattern: " + s);
}

/// Event bookkeeping for one audio pair. Event lists are ordered with the
/// common/base event first; they stay consistent with the source clip labels
/// by construction (mixing never relabels anything).
struct MixCombination {
  MixPattern pattern = MixPattern::same_event;
  std::vector<std::string> left_events;
  std::vector<std::string> right_events;
};

namespace mixture_detail {

inline std::vector<std::string> intersect(const std::vector<std::string>& a,
                                          const std::vector<std::string>& b) {
  std::set<std::string> sb(b.begin(), b.end());
  std::vector<std::string> out;
  for (const auto& e : a) {
    if (sb.count(e)) out.push_back(e);
  }
  return out;
}

inline std::vector<std::string> subtract(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b) {
  std::set<std::string> sb(b.begin(), b.end());
  std::vector<std::string> out;
  for (const auto& e : a) {
    if (!sb.count(e)) out.push_back(e);
  }
  return out;
}

}  // namespace mixture_detail

/// Renders the fixed response template for the combination's pattern.
/// Throws on pattern/label inconsistency.
inline std::string render_pair_response(const MixCombination& c) {
  using namespace mixture_detail;
  const auto common = intersect(c.left_events, c.right_events);
  const auto left_only = subtract(c.left_events, c.right_events);
  const auto right_only = subtract(c.right_events, c.left_events);
  switch (c.pattern) {
    case MixPattern::same_event:
      if (c.left_events.size() != 1 || c.left_events != c.right_events) {
        throw DataError("same_event requires one shared event");
      }
      return "Both audios have the same sound event of " + c.left_events[0] + ".";
    case MixPattern::different_event:
      if (c.left_events.size() != 1 || c.right_events.size() != 1 ||
          !common.empty()) {
        throw DataError("different_event requires one distinct event per side");
      }
      return "Audio1 has sound of " + c.left_events[0] + ", while Audio2 has sound of " +
             c.right_events[0] + ".";
    case MixPattern::added_event:
      if (c.left_events.size() != 1 || c.right_events.size() != 2 ||
          common.size() != 1 || right_only.size() != 1) {
        throw DataError("added_event requires left subset of right with one extra");
      }
      return "Both audios have sound of " + common[0] +
             ", while Audio2 has additional sound of " + right_only[0] + ".";
    case MixPattern::two_added_events:
      if (c.left_events.size() != 2 || c.right_events.size() != 2 ||
          common.size() != 1 || left_only.size() != 1 || right_only.size() != 1) {
        throw DataError("two_added_events requires one shared and one extra per side");
      }
      return "Both audios have sound of " + common[0] +
             ", while Audio1 has additional sound of " + left_only[0] +
             " and Audio2 has additional sound of " + right_only[0] + ".";
    case MixPattern::common_event:
      if (common.size() != 1) {
        throw DataError("common_event requires exactly one shared event");
      }
      return "The common sound event in two audios is " + common[0] + ".";
  }
  throw DataError("bad MixPattern");
}

struct MixturePair {
  MixCombination combo;
  Waveform left;
  Waveform right;
  std::string source_ids;  // provenance, joined clip ids
};

/// Builds audio pairs over the five patterns (round-robin until `count`),
/// mixing clips at the balanced SNR. `clips` must be single-event; the
/// loader maps a clip index to its waveform.
inline std::vector<MixturePair> build_mixture_pairs(
    const std::vector<std::pair<std::string, std::string>>& clip_ids_and_events,
    const std::function<Waveform(std::size_t)>& load_clip, int count,
    std::uint64_t seed, double snr_db = 0.0) {
  const auto& clips = clip_ids_and_events;
  std::set<std::string> distinct;
  for (const auto& [_, event] : clips) distinct.insert(event);
  if (distinct.size() < 3) {
    throw DataError("mixture synthesis needs >= 3 distinct events");
  }

  Rng rng(seed);
  MixSpec mix{snr_db, -1.0};
  std::vector<MixturePair> out;
  std::set<std::string> used;
  int attempts = count * 200 + 1000;

  auto draw = [&](const std::set<std::string>& exclude_events)
      -> std::optional<std::size_t> {
    for (int tries = 0; tries < 64; ++tries) {
      std::size_t i = rng.bounded(clips.size());
      if (!exclude_events.count(clips[i].second)) return i;
    }
    return std::nullopt;
  };

  while (int(out.size()) < count && attempts-- > 0) {
    MixPattern pattern = kAllMixPatterns[out.size() % 5];
    MixturePair pair;
    pair.combo.pattern = pattern;
    std::string key;
    switch (pattern) {
      case MixPattern::same_event: {
        std::size_t a = rng.bounded(clips.size());
        std::size_t b = rng.bounded(clips.size());
        if (a == b || clips[a].second != clips[b].second) continue;
        key = to_string(pattern) + "|" + clips[a].first + "|" + clips[b].first;
        if (used.count(key)) continue;
        pair.combo.left_events = {clips[a].second};
        pair.combo.right_events = {clips[b].second};
        pair.left = load_clip(a);
        pair.right = load_clip(b);
        pair.source_ids = clips[a].first + "+" + clips[b].first;
        break;
      }
      case MixPattern::different_event: {
        std::size_t a = rng.bounded(clips.size());
        auto b = draw({clips[a].second});
        if (!b) continue;
        key = to_string(pattern) + "|" + clips[a].first + "|" + clips[*b].first;
        if (used.count(key)) continue;
        pair.combo.left_events = {clips[a].second};
        pair.combo.right_events = {clips[*b].second};
        pair.left = load_clip(a);
        pair.right = load_clip(*b);
        pair.source_ids = clips[a].first + "+" + clips[*b].first;
        break;
      }
      case MixPattern::added_event: {
        std::size_t a = rng.bounded(clips.size());
        auto b = draw({clips[a].second});
        if (!b) continue;
        key = to_string(pattern) + "|" + clips[a].first + "|" + clips[*b].first;
        if (used.count(key)) continue;
        pair.combo.left_events = {clips[a].second};
        pair.combo.right_events = {clips[a].second, clips[*b].second};
        Waveform base = load_clip(a);
        pair.right = mix_at_snr(base, load_clip(*b), mix).audio;
        pair.left = std::move(base);
        pair.source_ids = clips[a].first + "+" + clips[a].first + "_" +
                          clips[*b].first;
        break;
      }
      case MixPattern::two_added_events:
      case MixPattern::common_event: {
        std::size_t a = rng.bounded(clips.size());
        auto b = draw({clips[a].second});
        if (!b) continue;
        auto c = draw({clips[a].second, clips[*b].second});
        if (!c) continue;
        key = to_string(pattern) + "|" + clips[a].first + "|" + clips[*b].first +
              "|" + clips[*c].first;
        if (used.count(key)) continue;
        pair.combo.left_events = {clips[a].second, clips[*b].second};
        pair.combo.right_events = {clips[a].second, clips[*c].second};
        Waveform base = load_clip(a);
        pair.left = mix_at_snr(base, load_clip(*b), mix).audio;
        pair.right = mix_at_snr(base, load_clip(*c), mix).audio;
        pair.source_ids = clips[a].first + "_" + clips[*b].first + "+" +
                          clips[a].first + "_" + clips[*c].first;
        break;
      }
    }
    used.insert(key);
    out.push_back(std::move(pair));
  }
  if (int(out.size()) < count) {
    throw DataError("insufficient distinct clips to fill mixture quota");
  }
  return out;
}

}  // namespace mabench
