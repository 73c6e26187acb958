#pragma once

// Builders for the 11 benchmark tasks. Every builder is deterministic given
// (inputs, TaskSpec.seed): sampling goes through Rng, candidate scans use
// sorted containers, and emitted ids derive from content hashes of the
// source ids + task + seed. Closed-form builders construct their class
// quotas exactly; balance_and_shuffle is the final equalize/shuffle pass.
//
// Audio handling: source corpora are ingested to 16 kHz mono through the
// content-addressed store, so a finished shard directory is self-contained
// (shard + audio/ subdirectory) and revalidates cleanly against itself.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mabench/asset_store.hpp"
#include "mabench/audio.hpp"
#include "mabench/error.hpp"
#include "mabench/manifest.hpp"
#include "mabench/model_client.hpp"
#include "mabench/prompts.hpp"
#include "mabench/rng.hpp"
#include "mabench/sha256.hpp"
#include "mabench/task.hpp"
#include "mabench/text.hpp"

namespace mabench {

struct BenchContext {
  std::filesystem::path source_root;  // resolves source-manifest audio paths
  AssetStore* store = nullptr;
  const InstructionTemplates* templates = nullptr;

  Waveform load(const AudioAsset& a) const {
    return resample(read_wav(source_root / a.path), kPipelineSampleRate);
  }
};

struct BuildOutcome {
  std::vector<PairSample> samples;
  int requested = 0;
  std::vector<std::string> notes;  // skips, exclusions, shortfalls
};

namespace benchgen_detail {

/// Content-derived sample id: stable across reruns of the same build.
inline std::string sample_id(const std::string& task, std::uint64_t seed,
                             const std::string& a, const std::string& b,
                             const std::string& extra = {}) {
  return sha256_hex(task + "|" + std::to_string(seed) + "|" + a + "|" + b + "|" +
                    extra)
      .substr(0, 16);
}

/// Deterministic choice among several qualifying tokens: longest first,
/// then lexicographic.
inline std::optional<std::string> pick_longest_lex(std::vector<std::string> cands) {
  if (cands.empty()) return std::nullopt;
  std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return x.size() > y.size();
    return x < y;
  });
  return cands.front();
}

/// Ingestion cache: one store entry per source record no matter how many
/// pairs reference it.
class IngestCache {
 public:
  explicit IngestCache(const BenchContext& ctx) : ctx_(ctx) {}

  const AudioAsset& get(const AudioAsset& source) {
    auto it = cache_.find(source.id);
    if (it != cache_.end()) return it->second;
    AudioAsset stored = ctx_.store->add_waveform(ctx_.load(source));
    return cache_.emplace(source.id, std::move(stored)).first->second;
  }

 private:
  const BenchContext& ctx_;
  std::map<std::string, AudioAsset> cache_;
};

struct PositionQuota {
  int first = 0;   // remaining samples whose answer is Audio1
  int second = 0;  // remaining samples whose answer is Audio2

  static PositionQuota split(int target) {
    return {target - target / 2, target / 2};
  }
  bool open() const { return first > 0 || second > 0; }
  /// Draws the position for the answer-holding clip.
  bool place_first(Rng& rng) {
    bool first_pos = first > 0 && (second == 0 || rng.coin());
    (first_pos ? first : second) -= 1;
    return first_pos;
  }
};

inline int attempt_budget(int target) { return target * 200 + 1000; }

}  // namespace benchgen_detail

// ---------------------------------------------------------------------------
// balance_and_shuffle

/// Downsamples the majority class to equality (for labeled samples) and
/// applies a deterministic shuffle. With equalize=false only the shuffle
/// runs, which is how the retrieval tasks keep their uneven splits.
inline std::vector<PairSample> balance_and_shuffle(std::vector<PairSample> samples,
                                                   std::uint64_t seed,
                                                   bool equalize = true) {
  Rng rng(seed);
  bool labeled = !samples.empty() &&
                 samples.front().ground_truth.kind != GroundTruthKind::references;
  if (equalize && labeled) {
    std::map<std::string, std::vector<PairSample>> groups;
    for (auto& s : samples) groups[s.ground_truth.label].push_back(std::move(s));
    std::size_t m = SIZE_MAX;
    for (const auto& [_, g] : groups) m = std::min(m, g.size());
    samples.clear();
    for (auto& [_, g] : groups) {
      rng.shuffle(g);
      g.resize(m);
      for (auto& s : g) samples.push_back(std::move(s));
    }
  }
  rng.shuffle(samples);
  return samples;
}

// ---------------------------------------------------------------------------
// Closed-form speech/sound builders

/// Shared same/different pairing for intent_identification (key=intent),
/// keyword_comparison (key=keyword) and sound_comparison (key=sound_event).
inline BuildOutcome build_pair_match(
    const std::vector<std::string>& labels,
    const std::vector<const AudioAsset*>& assets, const std::string& task,
    const TaskSpec& spec, const BenchContext& ctx) {
  using namespace benchgen_detail;
  if (labels.size() != assets.size()) throw DataError("labels/assets size mismatch");
  BuildOutcome out;
  out.requested = spec.target_count;

  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);

  std::vector<std::size_t> pos_candidates;  // members of classes with >= 2 items
  for (const auto& [label, members] : by_label) {
    if (members.size() < 2) {
      out.notes.push_back("excluded singleton class '" + label + "'");
      continue;
    }
    pos_candidates.insert(pos_candidates.end(), members.begin(), members.end());
  }

  Rng rng(spec.seed);
  IngestCache cache(ctx);
  int pos_quota = spec.target_count - spec.target_count / 2;
  int neg_quota = spec.target_count / 2;
  std::set<std::string> used;
  int attempts = attempt_budget(spec.target_count);

  auto emit = [&](std::size_t i, std::size_t j, const std::string& truth) {
    if (rng.coin()) std::swap(i, j);
    PairSample p;
    p.task = task;
    p.id = sample_id(task, spec.seed, assets[i]->id, assets[j]->id);
    p.audio1 = cache.get(*assets[i]);
    p.audio2 = cache.get(*assets[j]);
    p.instruction = ctx.templates->render(task);
    p.ground_truth = GroundTruth::binary(truth);
    p.meta = {{"dataset", spec.dataset},
              {"label_1", labels[i]},
              {"label_2", labels[j]},
              {"source_1", assets[i]->id},
              {"source_2", assets[j]->id}};
    out.samples.push_back(std::move(p));
  };

  while (pos_quota > 0 && attempts-- > 0 && pos_candidates.size() >= 2) {
    std::size_t i = pos_candidates[rng.bounded(pos_candidates.size())];
    const auto& members = by_label.at(labels[i]);
    std::size_t j = members[rng.bounded(members.size())];
    if (i == j) continue;
    std::string key = assets[std::min(i, j)]->id + "|" + assets[std::max(i, j)]->id;
    if (!used.insert(key).second) continue;
    emit(i, j, "Yes");
    --pos_quota;
  }
  while (neg_quota > 0 && attempts-- > 0 && by_label.size() >= 2) {
    std::size_t i = rng.bounded(labels.size());
    std::size_t j = rng.bounded(labels.size());
    if (i == j || labels[i] == labels[j]) continue;
    std::string key = assets[std::min(i, j)]->id + "|" + assets[std::max(i, j)]->id;
    if (!used.insert(key).second) continue;
    emit(i, j, "No");
    --neg_quota;
  }
  if (pos_quota > 0 || neg_quota > 0) {
    out.notes.push_back("shortfall: " + std::to_string(pos_quota) +
                        " positives, " + std::to_string(neg_quota) +
                        " negatives unfilled");
  }
  return out;
}

inline std::string intent_key(const Utterance& u) {
  if (!u.intent || u.intent->empty()) throw DataError("utterance lacks intent tuple");
  return join_tokens(*u.intent, "|");
}

inline BuildOutcome build_intent_identification(const std::vector<Utterance>& d,
                                                const TaskSpec& spec,
                                                const BenchContext& ctx) {
  std::vector<std::string> labels;
  std::vector<const AudioAsset*> assets;
  for (const auto& u : d) {
    labels.push_back(intent_key(u));
    assets.push_back(&u.asset);
  }
  return build_pair_match(labels, assets, "intent_identification", spec, ctx);
}

inline BuildOutcome build_keyword_comparison(const std::vector<Utterance>& d,
                                             const TaskSpec& spec,
                                             const BenchContext& ctx) {
  std::vector<std::string> labels;
  std::vector<const AudioAsset*> assets;
  for (const auto& u : d) {
    if (!u.keyword) throw DataError("utterance lacks keyword label: " + u.asset.id);
    labels.push_back(*u.keyword);
    assets.push_back(&u.asset);
  }
  return build_pair_match(labels, assets, "keyword_comparison", spec, ctx);
}

inline BuildOutcome build_sound_comparison(const std::vector<SoundClip>& d,
                                           const TaskSpec& spec,
                                           const BenchContext& ctx) {
  std::vector<std::string> labels;
  std::vector<const AudioAsset*> assets;
  for (const auto& c : d) {
    std::vector<std::string> evs = c.events;
    std::sort(evs.begin(), evs.end());
    labels.push_back(join_tokens(evs, "|"));
    assets.push_back(&c.asset);
  }
  return build_pair_match(labels, assets, "sound_comparison", spec, ctx);
}

/// Hotword detection: a noun from the lexicon occurs in exactly one of two
/// randomly paired utterances; the answer is the audio that contains it.
inline BuildOutcome build_hotword_detection(const std::vector<Utterance>& d,
                                            const std::set<std::string>& noun_lexicon,
                                            const TaskSpec& spec,
                                            const BenchContext& ctx) {
  using namespace benchgen_detail;
  BuildOutcome out;
  out.requested = spec.target_count;
  if (d.size() < 2) throw DataError("hotword_detection needs >= 2 utterances");
  if (noun_lexicon.empty()) throw DataError("empty noun lexicon");

  std::vector<std::set<std::string>> token_sets(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (auto& t : tokenize(d[i].transcript)) token_sets[i].insert(std::move(t));
  }

  Rng rng(spec.seed);
  IngestCache cache(ctx);
  auto quota = PositionQuota::split(spec.target_count);
  std::set<std::string> used;
  int attempts = attempt_budget(spec.target_count);

  while (quota.open() && attempts-- > 0) {
    std::size_t i = rng.bounded(d.size());
    std::size_t j = rng.bounded(d.size());
    if (i == j) continue;
    std::vector<std::string> cands;
    for (const auto& noun : noun_lexicon) {
      bool in_a = token_sets[i].count(noun) > 0;
      bool in_b = token_sets[j].count(noun) > 0;
      if (in_a != in_b) cands.push_back(noun);
    }
    auto noun = pick_longest_lex(std::move(cands));
    if (!noun) continue;  // no qualifying noun; resample
    std::size_t holder = token_sets[i].count(*noun) ? i : j;
    std::size_t other = holder == i ? j : i;
    std::string key = d[holder].asset.id + "|" + d[other].asset.id + "|" + *noun;
    if (!used.insert(key).second) continue;

    bool holder_first = quota.place_first(rng);
    const Utterance& first = holder_first ? d[holder] : d[other];
    const Utterance& second = holder_first ? d[other] : d[holder];
    PairSample p;
    p.task = "hotword_detection";
    p.id = sample_id(p.task, spec.seed, first.asset.id, second.asset.id, *noun);
    p.audio1 = cache.get(first.asset);
    p.audio2 = cache.get(second.asset);
    p.instruction = ctx.templates->render(p.task, {{"WORD", *noun}});
    p.ground_truth = GroundTruth::choice(holder_first ? "Audio1" : "Audio2");
    p.meta = {{"dataset", spec.dataset},
              {"query", *noun},
              {"source_1", first.asset.id},
              {"source_2", second.asset.id}};
    out.samples.push_back(std::move(p));
  }
  if (quota.open()) {
    out.notes.push_back("shortfall: " + std::to_string(quota.first + quota.second) +
                        " samples unfilled");
  }
  return out;
}

/// Speech identification: positives mix the same utterance with two
/// different background noises (speech-dominant SNR); negatives are two
/// random distinct utterances.
inline BuildOutcome build_speech_identification(const std::vector<Utterance>& d,
                                                const std::vector<SoundClip>& noises,
                                                const TaskSpec& spec,
                                                const BenchContext& ctx) {
  using namespace benchgen_detail;
  BuildOutcome out;
  out.requested = spec.target_count;
  if (d.empty()) throw DataError("no utterances for speech_identification");
  if (noises.size() < 2) throw DataError("need >= 2 noise clips");

  Rng rng(spec.seed);
  IngestCache cache(ctx);
  int pos_quota = spec.target_count - spec.target_count / 2;
  int neg_quota = spec.target_count / 2;
  std::set<std::string> used;
  int attempts = attempt_budget(spec.target_count);
  MixSpec mix{spec.noise_snr_db, -1.0};

  while (pos_quota > 0 && attempts-- > 0) {
    std::size_t u = rng.bounded(d.size());
    std::size_t n1 = rng.bounded(noises.size());
    std::size_t n2 = rng.bounded(noises.size());
    if (n1 == n2 || noises[n1].events == noises[n2].events) continue;
    std::string key = d[u].asset.id + "|" + noises[n1].asset.id + "|" +
                      noises[n2].asset.id;
    if (!used.insert(key).second) continue;
    Waveform speech = ctx.load(d[u].asset);
    AudioAsset a1, a2;
    try {
      a1 = ctx.store->add_waveform(mix_at_snr(speech, ctx.load(noises[n1].asset), mix).audio);
      a2 = ctx.store->add_waveform(mix_at_snr(speech, ctx.load(noises[n2].asset), mix).audio);
    } catch (const DataError& e) {
      out.notes.push_back(std::string("skipped noisy positive: ") + e.what());
      continue;  // silent noise clip and similar
    }
    PairSample p;
    p.task = "speech_identification";
    p.id = sample_id(p.task, spec.seed, d[u].asset.id,
                     noises[n1].asset.id + "+" + noises[n2].asset.id);
    p.audio1 = std::move(a1);
    p.audio2 = std::move(a2);
    p.instruction = ctx.templates->render(p.task);
    p.ground_truth = GroundTruth::binary("Yes");
    p.meta = {{"dataset", spec.dataset},
              {"noise_1", noises[n1].asset.id},
              {"noise_2", noises[n2].asset.id},
              {"source_1", d[u].asset.id},
              {"source_2", d[u].asset.id}};
    out.samples.push_back(std::move(p));
    --pos_quota;
  }
  while (neg_quota > 0 && attempts-- > 0 && d.size() >= 2) {
    std::size_t i = rng.bounded(d.size());
    std::size_t j = rng.bounded(d.size());
    if (i == j) continue;
    std::string key = d[i].asset.id + "|" + d[j].asset.id;
    if (!used.insert(key).second) continue;
    PairSample p;
    p.task = "speech_identification";
    p.id = sample_id(p.task, spec.seed, d[i].asset.id, d[j].asset.id);
    p.audio1 = cache.get(d[i].asset);
    p.audio2 = cache.get(d[j].asset);
    p.instruction = ctx.templates->render(p.task);
    p.ground_truth = GroundTruth::binary("No");
    p.meta = {{"dataset", spec.dataset},
              {"source_1", d[i].asset.id},
              {"source_2", d[j].asset.id}};
    out.samples.push_back(std::move(p));
    --neg_quota;
  }
  if (pos_quota > 0 || neg_quota > 0) {
    out.notes.push_back("shortfall: " + std::to_string(pos_quota) + " positives, " +
                        std::to_string(neg_quota) + " negatives unfilled");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Open-ended speech builders

namespace benchgen_detail {

/// Word indices of the utterance whose normalized tokens greedily match
/// `subset` as a subsequence. Requires every word to normalize to exactly
/// one token; returns nullopt when matching fails.
inline std::optional<std::vector<std::size_t>> match_word_subset(
    const Utterance& u, const std::vector<std::string>& subset) {
  std::vector<std::string> word_tokens;
  for (const auto& w : u.words) {
    auto toks = tokenize(w.token);
    if (toks.size() != 1) return std::nullopt;
    word_tokens.push_back(std::move(toks.front()));
  }
  std::vector<std::size_t> keep;
  std::size_t si = 0;
  for (std::size_t wi = 0; wi < word_tokens.size() && si < subset.size(); ++wi) {
    if (word_tokens[wi] == subset[si]) {
      keep.push_back(wi);
      ++si;
    }
  }
  if (si != subset.size()) return std::nullopt;
  return keep;
}

struct Reconstruction {
  std::vector<std::size_t> keep;
  std::string transcript;
  AudioAsset asset;
};

}  // namespace benchgen_detail

/// Speech comparison: pairs an utterance with an editor-chosen word-subset
/// reconstruction (or two distinct reconstructions), rendered by cutting the
/// timestamped word segments back together.
inline BuildOutcome build_speech_comparison(const std::vector<Utterance>& d,
                                            ChatClient& editor,
                                            const EditorOptions& editor_opts,
                                            const TaskSpec& spec,
                                            const BenchContext& ctx) {
  using namespace benchgen_detail;
  BuildOutcome out;
  out.requested = spec.target_count;

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i].words.size() >= 2) usable.push_back(i);
  }
  if (usable.empty()) throw DataError("no utterances with word timestamps");

  Rng rng(spec.seed);
  IngestCache cache(ctx);

  auto reconstruct = [&](const Utterance& u,
                         const std::set<std::string>& exclude)
      -> std::optional<Reconstruction> {
    std::vector<std::string> orig_tokens = tokenize(u.transcript);
    for (int attempt = 0; attempt < spec.editor_retries; ++attempt) {
      ChatRequest req = ChatRequest::user(render_reconstruct_prompt(u.transcript),
                                          editor_opts.model, editor_opts.temperature,
                                          1, editor_opts.max_tokens);
      std::string reply = trim_trailing_whitespace(editor.complete(req).at(0));
      if (reply == "None") continue;
      std::vector<std::string> subset = tokenize(reply);
      if (subset.empty() || subset.size() >= orig_tokens.size()) continue;
      if (!is_subsequence(subset, orig_tokens)) continue;
      auto keep = match_word_subset(u, subset);
      if (!keep) continue;
      std::string key = join_tokens(subset);
      if (exclude.count(key)) continue;

      std::vector<std::pair<double, double>> spans;
      for (const auto& w : u.words) spans.emplace_back(w.start, w.end);
      Waveform recon = concat_word_segments(ctx.load(u.asset), spans, *keep,
                                            spec.crossfade_ms);
      std::vector<std::string> kept_words;
      for (std::size_t k : *keep) kept_words.push_back(u.words[k].token);
      return Reconstruction{*keep, join_tokens(kept_words),
                            ctx.store->add_waveform(recon)};
    }
    return std::nullopt;
  };

  int attempts = attempt_budget(spec.target_count);
  std::set<std::string> used;
  while (int(out.samples.size()) < spec.target_count && attempts-- > 0) {
    const Utterance& u = d[usable[rng.bounded(usable.size())]];
    bool recon_pair = rng.uniform() < spec.recon_pair_ratio;

    auto first = reconstruct(u, {});
    if (!first) {
      out.notes.push_back("skipped " + u.asset.id + ": editor returned no valid subset");
      continue;
    }
    std::string left_transcript, right_transcript;
    AudioAsset left_asset, right_asset;
    std::string variant_kind;
    if (recon_pair) {
      auto second = reconstruct(u, {join_tokens(tokenize(first->transcript))});
      if (!second) {
        out.notes.push_back("skipped " + u.asset.id +
                            ": no second distinct reconstruction");
        continue;
      }
      left_transcript = first->transcript;
      left_asset = first->asset;
      right_transcript = second->transcript;
      right_asset = second->asset;
      variant_kind = "recon_vs_recon";
    } else {
      left_transcript = u.transcript;
      left_asset = cache.get(u.asset);
      right_transcript = first->transcript;
      right_asset = first->asset;
      variant_kind = "original_vs_recon";
    }
    if (rng.coin()) {
      std::swap(left_transcript, right_transcript);
      std::swap(left_asset, right_asset);
    }
    std::string key = left_asset.id + "|" + right_asset.id;
    if (!used.insert(key).second) continue;

    PairSample p;
    p.task = "speech_comparison";
    p.id = sample_id(p.task, spec.seed, left_asset.id, right_asset.id);
    p.audio1 = std::move(left_asset);
    p.audio2 = std::move(right_asset);
    p.instruction = ctx.templates->render(p.task);
    p.ground_truth = GroundTruth::references({left_transcript, right_transcript});
    p.meta = {{"dataset", spec.dataset},
              {"source_1", u.asset.id},
              {"source_2", u.asset.id},
              {"variant", variant_kind}};
    out.samples.push_back(std::move(p));
  }
  if (int(out.samples.size()) < spec.target_count) {
    out.notes.push_back("shortfall: built " + std::to_string(out.samples.size()) +
                        " of " + std::to_string(spec.target_count));
  }
  return out;
}

/// Dialogue generation: the first two turns of each dialogue become the
/// context pair; the judge references are their transcripts.
inline BuildOutcome build_dialogue_generation(const std::vector<Utterance>& d,
                                              const TaskSpec& spec,
                                              const BenchContext& ctx) {
  using namespace benchgen_detail;
  BuildOutcome out;
  out.requested = spec.target_count;

  std::map<std::string, std::vector<const Utterance*>> dialogues;
  for (const auto& u : d) {
    if (u.dialogue) dialogues[*u.dialogue].push_back(&u);
  }
  std::vector<std::pair<const Utterance*, const Utterance*>> openers;
  for (auto& [id, turns] : dialogues) {
    std::sort(turns.begin(), turns.end(), [](const Utterance* a, const Utterance* b) {
      return a->turn.value_or(0) < b->turn.value_or(0);
    });
    if (turns.size() < 2) {
      out.notes.push_back("skipped dialogue '" + id + "': fewer than 2 turns");
      continue;
    }
    openers.emplace_back(turns[0], turns[1]);
  }

  Rng rng(spec.seed);
  IngestCache cache(ctx);
  rng.shuffle(openers);
  if (int(openers.size()) > spec.target_count) openers.resize(spec.target_count);
  for (const auto& [first, second] : openers) {
    PairSample p;
    p.task = "dialogue_generation";
    p.id = sample_id(p.task, spec.seed, first->asset.id, second->asset.id);
    p.audio1 = cache.get(first->asset);
    p.audio2 = cache.get(second->asset);
    p.instruction = ctx.templates->render(p.task);
    p.ground_truth = GroundTruth::references({first->transcript, second->transcript});
    p.meta = {{"dataset", spec.dataset},
              {"source_1", first->asset.id},
              {"source_2", second->asset.id}};
    out.samples.push_back(std::move(p));
  }
  if (int(out.samples.size()) < spec.target_count) {
    out.notes.push_back("shortfall: only " + std::to_string(out.samples.size()) +
                        " dialogues available");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sound builders

/// Story generation: two single-event clips with distinct events; the judge
/// references are the two event labels.
inline BuildOutcome build_story_generation(const std::vector<SoundClip>& d,
                                           const TaskSpec& spec,
                                           const BenchContext& ctx) {
  using namespace benchgen_detail;
  BuildOutcome out;
  out.requested = spec.target_count;
  std::vector<const SoundClip*> clips;
  for (const auto& c : d) {
    if (c.events.size() == 1) clips.push_back(&c);
  }
  std::set<std::string> distinct;
  for (const auto* c : clips) distinct.insert(c->events.front());
  if (distinct.size() < 2) throw DataError("need >= 2 distinct events for stories");

  Rng rng(spec.seed);
  IngestCache cache(ctx);
  std::set<std::string> used;
  int attempts = attempt_budget(spec.target_count);
  while (int(out.samples.size()) < spec.target_count && attempts-- > 0) {
    const SoundClip& a = *clips[rng.bounded(clips.size())];
    const SoundClip& b = *clips[rng.bounded(clips.size())];
    if (a.asset.id == b.asset.id || a.events.front() == b.events.front()) continue;
    std::string key = a.asset.id + "|" + b.asset.id;
    if (!used.insert(key).second) continue;
    PairSample p;
    p.task = "story_generation";
    p.id = sample_id(p.task, spec.seed, a.asset.id, b.asset.id);
    p.audio1 = cache.get(a.asset);
    p.audio2 = cache.get(b.asset);
    p.instruction = ctx.templates->render(p.task);
    p.ground_truth = GroundTruth::references({a.events.front(), b.events.front()});
    p.meta = {{"dataset", spec.dataset},
              {"source_1", a.asset.id},
              {"source_2", b.asset.id}};
    out.samples.push_back(std::move(p));
  }
  if (int(out.samples.size()) < spec.target_count) {
    out.notes.push_back("shortfall: built " + std::to_string(out.samples.size()) +
                        " of " + std::to_string(spec.target_count));
  }
  return out;
}

/// Event detection: names an event present in exactly one clip of the pair.
inline BuildOutcome build_event_detection(const std::vector<SoundClip>& d,
                                          const TaskSpec& spec,
                                          const BenchContext& ctx) {
  using namespace benchgen_detail;
  BuildOutcome out;
  out.requested = spec.target_count;
  if (d.size() < 2) throw DataError("event_detection needs >= 2 clips");

  Rng rng(spec.seed);
  IngestCache cache(ctx);
  auto quota = PositionQuota::split(spec.target_count);
  std::set<std::string> used;
  int attempts = attempt_budget(spec.target_count);
  while (quota.open() && attempts-- > 0) {
    std::size_t i = rng.bounded(d.size());
    std::size_t j = rng.bounded(d.size());
    if (i == j) continue;
    std::set<std::string> ei(d[i].events.begin(), d[i].events.end());
    std::set<std::string> ej(d[j].events.begin(), d[j].events.end());
    std::vector<std::string> cands;
    for (const auto& e : ei) {
      if (!ej.count(e)) cands.push_back(e);
    }
    for (const auto& e : ej) {
      if (!ei.count(e)) cands.push_back(e);
    }
    auto event = pick_longest_lex(std::move(cands));
    if (!event) continue;  // no discriminating event; resample
    std::size_t holder = ei.count(*event) ? i : j;
    std::size_t other = holder == i ? j : i;
    std::string key = d[holder].asset.id + "|" + d[other].asset.id + "|" + *event;
    if (!used.insert(key).second) continue;

    bool holder_first = quota.place_first(rng);
    const SoundClip& first = holder_first ? d[holder] : d[other];
    const SoundClip& second = holder_first ? d[other] : d[holder];
    PairSample p;
    p.task = "event_detection";
    p.id = sample_id(p.task, spec.seed, first.asset.id, second.asset.id, *event);
    p.audio1 = cache.get(first.asset);
    p.audio2 = cache.get(second.asset);
    p.instruction = ctx.templates->render(p.task, {{"EVENT", *event}});
    p.ground_truth = GroundTruth::choice(holder_first ? "Audio1" : "Audio2");
    p.meta = {{"dataset", spec.dataset},
              {"query", *event},
              {"source_1", first.asset.id},
              {"source_2", second.asset.id}};
    out.samples.push_back(std::move(p));
  }
  if (quota.open()) {
    out.notes.push_back("shortfall: " + std::to_string(quota.first + quota.second) +
                        " samples unfilled");
  }
  return out;
}

enum class RetrievalMode { caption, event };

/// Caption/event retrieval: the query belongs to exactly one clip of the
/// pair. With balance_positions the answer positions are equalized; without
/// it they fall where the seeded coin flips land (uneven splits allowed).
inline BuildOutcome build_retrieval(const std::vector<SoundClip>& d,
                                    RetrievalMode mode, const TaskSpec& spec,
                                    const BenchContext& ctx) {
  using namespace benchgen_detail;
  BuildOutcome out;
  out.requested = spec.target_count;
  const std::string task =
      mode == RetrievalMode::caption ? "caption_retrieval" : "event_retrieval";

  std::vector<const SoundClip*> clips;
  for (const auto& c : d) {
    if (mode == RetrievalMode::caption && !c.caption) {
      out.notes.push_back("excluded captionless clip " + c.asset.id);
      continue;
    }
    clips.push_back(&c);
  }
  if (clips.size() < 2) throw DataError("retrieval needs >= 2 usable clips");

  Rng rng(spec.seed);
  IngestCache cache(ctx);
  auto quota = PositionQuota::split(spec.target_count);
  int remaining = spec.target_count;
  std::set<std::string> used;
  int attempts = attempt_budget(spec.target_count);
  while (remaining > 0 && attempts-- > 0) {
    const SoundClip& target = *clips[rng.bounded(clips.size())];
    const SoundClip& other = *clips[rng.bounded(clips.size())];
    if (target.asset.id == other.asset.id) continue;

    std::string query;
    if (mode == RetrievalMode::caption) {
      query = *target.caption;
      if (other.caption && *other.caption == query) continue;  // matches both
    } else {
      std::set<std::string> theirs(other.events.begin(), other.events.end());
      std::vector<std::string> cands;
      for (const auto& e : target.events) {
        if (!theirs.count(e)) cands.push_back(e);
      }
      auto picked = pick_longest_lex(std::move(cands));
      if (!picked) continue;  // every event shared; resample
      query = *picked;
    }
    std::string key = target.asset.id + "|" + other.asset.id + "|" + query;
    if (!used.insert(key).second) continue;

    bool target_first =
        spec.balance_positions ? quota.place_first(rng) : rng.coin();
    --remaining;
    const SoundClip& first = target_first ? target : other;
    const SoundClip& second = target_first ? other : target;
    PairSample p;
    p.task = task;
    p.id = sample_id(task, spec.seed, first.asset.id, second.asset.id, query);
    p.audio1 = cache.get(first.asset);
    p.audio2 = cache.get(second.asset);
    p.instruction = ctx.templates->render(
        task, {{mode == RetrievalMode::caption ? "CAPTION" : "EVENT", query}});
    p.ground_truth = GroundTruth::choice(target_first ? "Audio1" : "Audio2");
    p.meta = {{"dataset", spec.dataset},
              {"query", query},
              {"source_1", first.asset.id},
              {"source_2", second.asset.id}};
    out.samples.push_back(std::move(p));
  }
  if (remaining > 0) {
    out.notes.push_back("shortfall: " + std::to_string(remaining) +
                        " samples unfilled");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stats file (mirrors the benchmark statistics table: task, source,
// per-class counts, metric)

struct TaskStats {
  std::string task;
  std::string source;
  std::string category;
  std::string metric;
  std::map<std::string, int> class_counts;  // empty for open-ended tasks
  int total = 0;
  int requested = 0;
  std::vector<std::string> notes;
};

inline TaskStats summarize_shard(const std::vector<PairSample>& samples,
                                 const std::string& task, const std::string& source,
                                 const BuildOutcome& outcome) {
  const TaskInfo& info = task_info(task);
  TaskStats s;
  s.task = task;
  s.source = source;
  s.category =
      info.category == TaskCategory::open_ended ? "open_ended" : "closed_form";
  s.metric = metric_name(info);
  s.total = int(samples.size());
  s.requested = outcome.requested;
  s.notes = outcome.notes;
  if (info.category == TaskCategory::closed_form) {
    for (const auto& p : samples) s.class_counts[p.ground_truth.label] += 1;
  }
  return s;
}

inline json to_json(const TaskStats& s) {
  json counts = json::object();
  for (const auto& [label, n] : s.class_counts) counts[label] = n;
  return json{{"category", s.category}, {"class_counts", std::move(counts)},
              {"metric", s.metric},     {"notes", s.notes},
              {"requested", s.requested}, {"source", s.source},
              {"task", s.task},         {"total", s.total}};
}

inline void write_benchmark_stats(const std::vector<TaskStats>& rows,
                                  const std::filesystem::path& path) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write stats file: " + path.string());
  out << canonical_dump(arr) << '\n';
}

}  // namespace mabench
