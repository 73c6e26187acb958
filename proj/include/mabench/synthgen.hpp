#pragma once

// Training-data synthesis: TTS speech pairs from constrained sentence
// variants, mixed sound pairs with templated targets, single-audio examples,
// and the quota-driven final mix. Editor and TTS results are consumed in
// input order, so a run is reproducible whenever the clients are.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mabench/asset_store.hpp"
#include "mabench/audio.hpp"
#include "mabench/error.hpp"
#include "mabench/manifest.hpp"
#include "mabench/mixtures.hpp"
#include "mabench/model_client.hpp"
#include "mabench/prompts.hpp"
#include "mabench/rng.hpp"
#include "mabench/sha256.hpp"
#include "mabench/text.hpp"
#include "mabench/variants.hpp"

namespace mabench {

struct RejectionEntry {
  std::string sentence;
  std::string mode;  // edit mode, or stage name for non-variant rejections
  std::string reason;
};

inline json to_json(const RejectionEntry& r) {
  return json{{"mode", r.mode}, {"reason", r.reason}, {"sentence", r.sentence}};
}

/// Difference description for a transcript pair, with a lexical sanity
/// check: the description must mention at least one differing token, else it
/// is regenerated. Throws DataError on identical transcripts or an exhausted
/// regeneration budget.
inline std::string derive_speech_diff_target(const std::string& t1,
                                             const std::string& t2,
                                             ChatClient& editor,
                                             const EditorOptions& opts,
                                             int regen_budget = 3) {
  const auto tok1 = tokenize(t1);
  const auto tok2 = tokenize(t2);
  if (tok1 == tok2) {
    throw DataError("transcripts are identical after normalization");
  }
  const auto diff = differing_tokens(tok1, tok2);
  for (int attempt = 0; attempt < regen_budget; ++attempt) {
    ChatRequest req = ChatRequest::user(render_speech_diff_prompt(t1, t2),
                                        opts.model, opts.temperature, 1,
                                        opts.max_tokens);
    std::string reply = trim_trailing_whitespace(editor.complete(req).at(0));
    const auto reply_tokens = tokenize(reply);
    for (const auto& d : diff) {
      for (const auto& r : reply_tokens) {
        if (r == d) return reply;
      }
    }
  }
  throw DataError("diff description never mentioned a differing token");
}

struct SpeechPairResult {
  std::vector<TrainExample> examples;
  std::vector<RejectionEntry> rejections;
};

/// Speech pairs: each sentence yields up to four (original, variant) TTS
/// pairs, one per edit mode that produced a valid variant. Targets come
/// from the editor's difference descriptions.
inline SpeechPairResult synth_speech_pairs(
    const std::vector<std::string>& sentences, ChatClient& editor,
    const EditorOptions& editor_opts, TtsClient& tts, const std::string& voice,
    AssetStore& store, const std::string& instruction, int diff_regen_budget = 3) {
  SpeechPairResult out;
  for (const auto& sentence : sentences) {
    auto variants = propose_sentence_variants(sentence, editor, editor_opts);
    bool any_valid = false;
    for (const auto& v : variants) {
      if (!v.valid) {
        out.rejections.push_back({sentence, to_string(v.mode), v.rejection_reason});
      }
    }

    std::optional<AudioAsset> original_asset;
    for (const auto& v : variants) {
      if (!v.valid) continue;
      if (!original_asset) {
        Waveform w = tts.synthesize(sentence, voice);
        if (w.empty()) {
          out.rejections.push_back({sentence, "tts", "empty_audio"});
          break;  // no original, no pairs for this sentence
        }
        original_asset = store.add_waveform(w);
      }
      Waveform wv = tts.synthesize(v.variant, voice);
      if (wv.empty()) {
        out.rejections.push_back({v.variant, "tts", "empty_audio"});
        continue;
      }
      AudioAsset variant_asset = store.add_waveform(wv);

      TrainExample ex;
      ex.family = TrainFamily::speech_pair;
      ex.id = sha256_hex("speech_pair|" + sentence + "|" + to_string(v.mode) + "|" +
                         v.variant)
                  .substr(0, 16);
      ex.audios = {*original_asset, variant_asset};
      ex.instruction = instruction;
      try {
        ex.target = derive_speech_diff_target(sentence, v.variant, editor,
                                              editor_opts, diff_regen_budget);
      } catch (const DataError& e) {
        out.rejections.push_back({sentence, to_string(v.mode), e.what()});
        continue;
      }
      out.examples.push_back(std::move(ex));
      any_valid = true;
    }
    if (!any_valid && original_asset) {
      out.rejections.push_back({sentence, "pairing", "no_valid_variants"});
    }
  }
  return out;
}

/// Sound pairs: mixture pairs rendered to the store with their templated
/// discriminative targets.
inline std::vector<TrainExample> synth_sound_pairs(
    const std::vector<SoundClip>& clips, const std::filesystem::path& source_root,
    AssetStore& store, const std::string& instruction, int count,
    std::uint64_t seed, double snr_db = 0.0) {
  std::vector<std::pair<std::string, std::string>> single;
  std::vector<const SoundClip*> sources;
  for (const auto& c : clips) {
    if (c.events.size() == 1) {
      single.emplace_back(c.asset.id, c.events.front());
      sources.push_back(&c);
    }
  }
  auto load = [&](std::size_t i) {
    return resample(read_wav(source_root / sources[i]->asset.path),
                    kPipelineSampleRate);
  };
  auto pairs = build_mixture_pairs(single, load, count, seed, snr_db);

  std::vector<TrainExample> out;
  for (const auto& pair : pairs) {
    TrainExample ex;
    ex.family = TrainFamily::sound_pair;
    ex.id = sha256_hex("sound_pair|" + to_string(pair.combo.pattern) + "|" +
                       pair.source_ids)
                .substr(0, 16);
    ex.audios = {store.add_waveform(pair.left), store.add_waveform(pair.right)};
    ex.instruction = instruction;
    ex.target = render_pair_response(pair.combo);
    out.push_back(std::move(ex));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single-audio families (joint-training stabilizers)

inline std::vector<TrainExample> make_asr_examples(
    const std::vector<Utterance>& d, const std::filesystem::path& source_root,
    AssetStore& store, const std::string& instruction) {
  std::vector<TrainExample> out;
  for (const auto& u : d) {
    TrainExample ex;
    ex.family = TrainFamily::asr;
    ex.id = sha256_hex("asr|" + u.asset.id).substr(0, 16);
    ex.audios = {store.add_waveform(
        resample(read_wav(source_root / u.asset.path), kPipelineSampleRate))};
    ex.instruction = instruction;
    ex.target = u.transcript;
    out.push_back(std::move(ex));
  }
  return out;
}

inline std::vector<TrainExample> make_classification_examples(
    const std::vector<SoundClip>& d, const std::filesystem::path& source_root,
    AssetStore& store, const std::string& instruction) {
  std::vector<TrainExample> out;
  for (const auto& c : d) {
    TrainExample ex;
    ex.family = TrainFamily::classification;
    ex.id = sha256_hex("classification|" + c.asset.id).substr(0, 16);
    ex.audios = {store.add_waveform(
        resample(read_wav(source_root / c.asset.path), kPipelineSampleRate))};
    ex.instruction = instruction;
    ex.target = join_tokens(c.events, ", ");
    out.push_back(std::move(ex));
  }
  return out;
}

inline std::vector<TrainExample> make_caption_examples(
    const std::vector<SoundClip>& d, const std::filesystem::path& source_root,
    AssetStore& store, const std::string& instruction) {
  std::vector<TrainExample> out;
  for (const auto& c : d) {
    if (!c.caption) continue;
    TrainExample ex;
    ex.family = TrainFamily::caption;
    ex.id = sha256_hex("caption|" + c.asset.id).substr(0, 16);
    ex.audios = {store.add_waveform(
        resample(read_wav(source_root / c.asset.path), kPipelineSampleRate))};
    ex.instruction = instruction;
    ex.target = *c.caption;
    out.push_back(std::move(ex));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Final mix

/// Per-family quotas. Defaults scale from the published training mix:
/// 24K speech pairs, 26.9K sound pairs, 28.5K ASR, 20.7K classification,
/// 5K caption = 105.1K total.
struct TrainQuotas {
  int speech_pair = 24000;
  int sound_pair = 26900;
  int asr = 28500;
  int classification = 20700;
  int caption = 5000;

  int total() const {
    return speech_pair + sound_pair + asr + classification + caption;
  }
  int for_family(TrainFamily f) const {
    switch (f) {
      case TrainFamily::speech_pair: return speech_pair;
      case TrainFamily::sound_pair: return sound_pair;
      case TrainFamily::asr: return asr;
      case TrainFamily::classification: return classification;
      case TrainFamily::caption: return caption;
    }
    throw DataError("bad TrainFamily");
  }
};

struct TrainMix {
  std::vector<TrainExample> examples;
  std::map<std::string, int> family_counts;
  std::vector<std::string> shortfalls;  // families whose supply missed quota
};

/// Truncates each family to its quota (supply order preserved), reports
/// shortfalls, then interleaves deterministically under the seed.
inline TrainMix assemble_training_mix(const std::vector<TrainExample>& supply,
                                      const TrainQuotas& quotas,
                                      std::uint64_t seed) {
  std::map<TrainFamily, std::vector<TrainExample>> by_family;
  for (const auto& ex : supply) by_family[ex.family].push_back(ex);

  TrainMix mix;
  for (TrainFamily f :
       {TrainFamily::speech_pair, TrainFamily::sound_pair, TrainFamily::asr,
        TrainFamily::classification, TrainFamily::caption}) {
    auto& group = by_family[f];
    int quota = quotas.for_family(f);
    if (int(group.size()) > quota) group.resize(quota);
    if (int(group.size()) < quota) {
      mix.shortfalls.push_back(to_string(f) + ": " +
                               std::to_string(group.size()) + " of " +
                               std::to_string(quota));
    }
    mix.family_counts[to_string(f)] = int(group.size());
    for (auto& ex : group) mix.examples.push_back(std::move(ex));
  }
  Rng rng(seed);
  rng.shuffle(mix.examples);
  return mix;
}

}  // namespace mabench
