#pragma once

// Manifest data model for every dataset the pipeline reads or writes:
// utterance corpora, sound corpora, pair-sample benchmark shards,
// train-example shards and annotation files.
//
// Manifests are line-delimited JSON, UTF-8, one record per line, canonical
// field order (alphabetical), fixed float precision. Loading is fail-closed:
// one malformed line rejects the whole file, with the line number in the
// error. Loading and validation are read-only and safe to run concurrently.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mabench/canonical_json.hpp"
#include "mabench/error.hpp"
#include "mabench/sha256.hpp"
#include "mabench/text.hpp"

namespace mabench {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Domain types

struct AudioAsset {
  std::string id;
  std::string path;  // relative to the manifest's audio root
  int sample_rate = 0;
  int channels = 0;
  double duration = 0.0;  // seconds
  std::string sha256;     // hex digest of the file content
};

struct WordSpan {
  std::string token;
  double start = 0.0;
  double end = 0.0;
};

struct Utterance {
  AudioAsset asset;
  std::string transcript;
  std::vector<WordSpan> words;
  std::optional<std::string> speaker;
  std::optional<std::vector<std::string>> intent;  // action-object-location tuple
  std::optional<std::string> keyword;
  std::optional<std::string> dialogue;  // dialogue grouping id
  std::optional<int> turn;              // position within the dialogue
};

struct SoundClip {
  AudioAsset asset;
  std::vector<std::string> events;  // non-empty
  std::optional<std::string> caption;
};

enum class GroundTruthKind { binary, choice, references };

struct GroundTruth {
  GroundTruthKind kind = GroundTruthKind::binary;
  std::string label;               // "Yes"/"No" or "Audio1"/"Audio2"
  std::vector<std::string> texts;  // judge references for open-ended tasks

  static GroundTruth binary(std::string l) {
    return {GroundTruthKind::binary, std::move(l), {}};
  }
  static GroundTruth choice(std::string l) {
    return {GroundTruthKind::choice, std::move(l), {}};
  }
  static GroundTruth references(std::vector<std::string> t) {
    return {GroundTruthKind::references, {}, std::move(t)};
  }
};

struct PairSample {
  std::string id;
  std::string task;
  AudioAsset audio1;
  AudioAsset audio2;
  std::string instruction;
  GroundTruth ground_truth;
  std::map<std::string, std::string> meta;
};

enum class TrainFamily { speech_pair, sound_pair, asr, classification, caption };

struct TrainExample {
  std::string id;
  std::vector<AudioAsset> audios;  // 2 for *_pair families, 1 otherwise
  std::string instruction;
  std::string target;
  TrainFamily family = TrainFamily::asr;
};

/// sample id -> annotator id -> binary label ("Yes"/"No")
using AnnotationSet = std::map<std::string, std::map<std::string, std::string>>;

// ---------------------------------------------------------------------------
// Enum names

inline std::string to_string(TrainFamily f) {
  switch (f) {
    case TrainFamily::speech_pair: return "speech_pair";
    case TrainFamily::sound_pair: return "sound_pair";
    case TrainFamily::asr: return "asr";
    case TrainFamily::classification: return "classification";
    case TrainFamily::caption: return "caption";
  }
  throw DataError("bad TrainFamily");
}

inline TrainFamily train_family_from_string(const std::string& s) {
  if (s == "speech_pair") return TrainFamily::speech_pair;
  if (s == "sound_pair") return TrainFamily::sound_pair;
  if (s == "asr") return TrainFamily::asr;
  if (s == "classification") return TrainFamily::classification;
  if (s == "caption") return TrainFamily::caption;
  throw DataError("unknown train family: " + s);
}

inline std::string to_string(GroundTruthKind k) {
  switch (k) {
    case GroundTruthKind::binary: return "binary";
    case GroundTruthKind::choice: return "choice";
    case GroundTruthKind::references: return "references";
  }
  throw DataError("bad GroundTruthKind");
}

// ---------------------------------------------------------------------------
// JSON conversion

namespace manifest_detail {

inline const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T require_as(const json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
std::optional<T> optional_as(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace manifest_detail

inline json to_json(const AudioAsset& a) {
  return json{{"channels", a.channels}, {"duration", a.duration},
              {"id", a.id},             {"path", a.path},
              {"sample_rate", a.sample_rate}, {"sha256", a.sha256}};
}

inline AudioAsset audio_asset_from_json(const json& j) {
  using namespace manifest_detail;
  AudioAsset a;
  a.id = require_as<std::string>(j, "id");
  a.path = require_as<std::string>(j, "path");
  a.sample_rate = require_as<int>(j, "sample_rate");
  a.channels = require_as<int>(j, "channels");
  a.duration = require_as<double>(j, "duration");
  a.sha256 = require_as<std::string>(j, "sha256");
  if (a.sample_rate <= 0) throw DataError("sample_rate must be positive");
  if (a.channels < 1) throw DataError("channels must be >= 1");
  if (a.duration < 0) throw DataError("duration must be non-negative");
  if (a.sha256.size() != 64 ||
      a.sha256.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw DataError("sha256 must be a 64-char lowercase hex digest");
  }
  return a;
}

inline json to_json(const Utterance& u) {
  json j{{"asset", to_json(u.asset)}, {"transcript", u.transcript}};
  json words = json::array();
  for (const auto& w : u.words) {
    words.push_back(json{{"end", w.end}, {"start", w.start}, {"token", w.token}});
  }
  j["words"] = std::move(words);
  if (u.speaker) j["speaker"] = *u.speaker;
  if (u.intent) j["intent"] = *u.intent;
  if (u.keyword) j["keyword"] = *u.keyword;
  if (u.dialogue) j["dialogue"] = *u.dialogue;
  if (u.turn) j["turn"] = *u.turn;
  return j;
}

inline Utterance utterance_from_json(const json& j) {
  using namespace manifest_detail;
  Utterance u;
  u.asset = audio_asset_from_json(require(j, "asset"));
  u.transcript = require_as<std::string>(j, "transcript");
  const json& words = require(j, "words");
  if (!words.is_array()) throw DataError("field 'words' has the wrong type");
  double prev_end = 0.0;
  for (const auto& wj : words) {
    WordSpan w;
    w.token = require_as<std::string>(wj, "token");
    w.start = require_as<double>(wj, "start");
    w.end = require_as<double>(wj, "end");
    if (!(w.end > w.start)) {
      throw DataError("word span must satisfy end > start (token '" + w.token + "')");
    }
    if (w.start < prev_end - 1e-9) {
      throw DataError("word spans must be non-overlapping and increasing (token '" +
                      w.token + "')");
    }
    if (w.start < 0 || w.end > u.asset.duration + 1e-6) {
      throw DataError("word span outside [0, duration] (token '" + w.token + "')");
    }
    prev_end = w.end;
    u.words.push_back(std::move(w));
  }
  u.speaker = optional_as<std::string>(j, "speaker");
  u.intent = optional_as<std::vector<std::string>>(j, "intent");
  u.keyword = optional_as<std::string>(j, "keyword");
  u.dialogue = optional_as<std::string>(j, "dialogue");
  u.turn = optional_as<int>(j, "turn");
  return u;
}

inline json to_json(const SoundClip& c) {
  json j{{"asset", to_json(c.asset)}, {"events", c.events}};
  if (c.caption) j["caption"] = *c.caption;
  return j;
}

inline SoundClip sound_clip_from_json(const json& j) {
  using namespace manifest_detail;
  SoundClip c;
  c.asset = audio_asset_from_json(require(j, "asset"));
  c.events = require_as<std::vector<std::string>>(j, "events");
  if (c.events.empty()) throw DataError("events must be non-empty");
  c.caption = optional_as<std::string>(j, "caption");
  return c;
}

inline json to_json(const GroundTruth& g) {
  json j{{"kind", to_string(g.kind)}};
  if (g.kind == GroundTruthKind::references) {
    j["texts"] = g.texts;
  } else {
    j["label"] = g.label;
  }
  return j;
}

inline GroundTruth ground_truth_from_json(const json& j) {
  using namespace manifest_detail;
  GroundTruth g;
  std::string kind = require_as<std::string>(j, "kind");
  if (kind == "binary" || kind == "choice") {
    g.kind = kind == "binary" ? GroundTruthKind::binary : GroundTruthKind::choice;
    g.label = require_as<std::string>(j, "label");
    if (g.kind == GroundTruthKind::binary && g.label != "Yes" && g.label != "No") {
      throw DataError("binary ground truth label must be Yes or No");
    }
    if (g.kind == GroundTruthKind::choice && g.label != "Audio1" && g.label != "Audio2") {
      throw DataError("choice ground truth label must be Audio1 or Audio2");
    }
  } else if (kind == "references") {
    g.kind = GroundTruthKind::references;
    g.texts = require_as<std::vector<std::string>>(j, "texts");
    if (g.texts.empty()) throw DataError("reference texts must be non-empty");
  } else {
    throw DataError("unknown ground truth kind: " + kind);
  }
  return g;
}

inline json to_json(const PairSample& p) {
  json meta = json::object();
  for (const auto& [k, v] : p.meta) meta[k] = v;
  return json{{"audio1", to_json(p.audio1)},
              {"audio2", to_json(p.audio2)},
              {"ground_truth", to_json(p.ground_truth)},
              {"id", p.id},
              {"instruction", p.instruction},
              {"meta", std::move(meta)},
              {"task", p.task}};
}

inline PairSample pair_sample_from_json(const json& j) {
  using namespace manifest_detail;
  PairSample p;
  p.id = require_as<std::string>(j, "id");
  p.task = require_as<std::string>(j, "task");
  p.audio1 = audio_asset_from_json(require(j, "audio1"));
  p.audio2 = audio_asset_from_json(require(j, "audio2"));
  p.instruction = require_as<std::string>(j, "instruction");
  p.ground_truth = ground_truth_from_json(require(j, "ground_truth"));
  if (auto it = j.find("meta"); it != j.end()) {
    for (auto kv = it->begin(); kv != it->end(); ++kv) {
      p.meta[kv.key()] = kv.value().get<std::string>();
    }
  }
  return p;
}

inline json to_json(const TrainExample& t) {
  json audios = json::array();
  for (const auto& a : t.audios) audios.push_back(to_json(a));
  return json{{"audios", std::move(audios)},
              {"family", to_string(t.family)},
              {"id", t.id},
              {"instruction", t.instruction},
              {"target", t.target}};
}

inline TrainExample train_example_from_json(const json& j) {
  using namespace manifest_detail;
  TrainExample t;
  t.id = require_as<std::string>(j, "id");
  t.instruction = require_as<std::string>(j, "instruction");
  t.target = require_as<std::string>(j, "target");
  t.family = train_family_from_string(require_as<std::string>(j, "family"));
  const json& audios = require(j, "audios");
  if (!audios.is_array()) throw DataError("field 'audios' has the wrong type");
  for (const auto& aj : audios) t.audios.push_back(audio_asset_from_json(aj));
  bool pair_family = t.family == TrainFamily::speech_pair ||
                     t.family == TrainFamily::sound_pair;
  if (pair_family && t.audios.size() != 2) {
    throw DataError("pair families require exactly 2 audios");
  }
  if (!pair_family && t.audios.size() != 1) {
    throw DataError("single-audio families require exactly 1 audio");
  }
  return t;
}

// ---------------------------------------------------------------------------
// JSONL load/save

namespace manifest_detail {

template <class T, class ParseFn, class IdFn>
std::vector<T> load_jsonl(const std::filesystem::path& path, ParseFn parse,
                          IdFn id_of) {
  std::ifstream in(path);
  if (!in) throw DataError("manifest not found: " + path.string());
  std::vector<T> records;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": malformed JSON: " + e.what());
    }
    T rec;
    try {
      rec = parse(j);
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    std::string id = id_of(rec);
    if (!ids.insert(id).second) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": duplicate id '" + id + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

template <class T, class ToJsonFn>
void save_jsonl(const std::vector<T>& records, const std::filesystem::path& path,
                ToJsonFn to_json_fn) {
  if (!path.parent_path().empty()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write manifest: " + path.string());
  for (const auto& r : records) {
    out << canonical_dump(to_json_fn(r)) << '\n';
  }
  if (!out) throw DataError("short write: " + path.string());
}

}  // namespace manifest_detail

inline std::vector<Utterance> load_utterance_manifest(
    const std::filesystem::path& path) {
  return manifest_detail::load_jsonl<Utterance>(
      path, [](const json& j) { return utterance_from_json(j); },
      [](const Utterance& u) { return u.asset.id; });
}

inline std::vector<SoundClip> load_sound_manifest(const std::filesystem::path& path) {
  return manifest_detail::load_jsonl<SoundClip>(
      path, [](const json& j) { return sound_clip_from_json(j); },
      [](const SoundClip& c) { return c.asset.id; });
}

inline std::vector<PairSample> load_pair_manifest(const std::filesystem::path& path) {
  return manifest_detail::load_jsonl<PairSample>(
      path, [](const json& j) { return pair_sample_from_json(j); },
      [](const PairSample& p) { return p.id; });
}

inline std::vector<TrainExample> load_train_manifest(
    const std::filesystem::path& path) {
  return manifest_detail::load_jsonl<TrainExample>(
      path, [](const json& j) { return train_example_from_json(j); },
      [](const TrainExample& t) { return t.id; });
}

inline void save_utterance_manifest(const std::vector<Utterance>& records,
                                    const std::filesystem::path& path) {
  manifest_detail::save_jsonl(records, path,
                              [](const Utterance& u) { return to_json(u); });
}

inline void save_sound_manifest(const std::vector<SoundClip>& records,
                                const std::filesystem::path& path) {
  manifest_detail::save_jsonl(records, path,
                              [](const SoundClip& c) { return to_json(c); });
}

inline void save_pair_manifest(const std::vector<PairSample>& records,
                               const std::filesystem::path& path) {
  manifest_detail::save_jsonl(records, path,
                              [](const PairSample& p) { return to_json(p); });
}

inline void save_train_manifest(const std::vector<TrainExample>& records,
                                const std::filesystem::path& path) {
  manifest_detail::save_jsonl(records, path,
                              [](const TrainExample& t) { return to_json(t); });
}

/// Annotation files: one record per sample, exactly three annotators,
/// binary labels.
inline AnnotationSet load_annotations(const std::filesystem::path& path) {
  struct Row {
    std::string sample_id;
    std::map<std::string, std::string> labels;
  };
  auto rows = manifest_detail::load_jsonl<Row>(
      path,
      [](const json& j) {
        using namespace manifest_detail;
        Row r;
        r.sample_id = require_as<std::string>(j, "sample_id");
        const json& ann = require(j, "annotations");
        if (!ann.is_object()) throw DataError("field 'annotations' has the wrong type");
        for (auto it = ann.begin(); it != ann.end(); ++it) {
          std::string label = it.value().get<std::string>();
          if (label != "Yes" && label != "No") {
            throw DataError("annotation labels must be Yes or No");
          }
          r.labels[it.key()] = label;
        }
        if (r.labels.size() != 3) {
          throw DataError("each sample needs exactly 3 annotators");
        }
        return r;
      },
      [](const Row& r) { return r.sample_id; });

  AnnotationSet set;
  std::set<std::string> annotator_ids;
  for (auto& r : rows) {
    for (const auto& [annotator, _] : r.labels) annotator_ids.insert(annotator);
    set[r.sample_id] = std::move(r.labels);
  }
  for (const auto& [sample, labels] : set) {
    if (labels.size() != annotator_ids.size()) {
      throw DataError("annotator ids are not consistent across samples (sample '" +
                      sample + "')");
    }
  }
  return set;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string record_id;
  std::string kind;  // missing_file, checksum_mismatch, transcript_mismatch, ...
  std::string detail;
};

using ValidationReport = std::vector<Violation>;

namespace manifest_detail {

inline void check_asset(const AudioAsset& a, const std::filesystem::path& audio_root,
                        bool verify_checksums, ValidationReport& report) {
  std::filesystem::path full = audio_root / a.path;
  if (!std::filesystem::exists(full)) {
    report.push_back({a.id, "missing_file", full.string()});
    return;
  }
  if (verify_checksums) {
    std::string actual = sha256_file_hex(full);
    if (actual != a.sha256) {
      report.push_back({a.id, "checksum_mismatch",
                        full.string() + ": expected " + a.sha256 + ", got " + actual});
    }
  }
}

}  // namespace manifest_detail

inline ValidationReport validate_utterances(
    const std::vector<Utterance>& records, const std::filesystem::path& audio_root,
    bool verify_checksums = true) {
  ValidationReport report;
  for (const auto& u : records) {
    manifest_detail::check_asset(u.asset, audio_root, verify_checksums, report);
    if (!u.words.empty()) {
      std::vector<std::string> from_words;
      for (const auto& w : u.words) {
        for (auto& t : tokenize(w.token)) from_words.push_back(std::move(t));
      }
      if (from_words != tokenize(u.transcript)) {
        report.push_back({u.asset.id, "transcript_mismatch",
                          "word tokens '" + join_tokens(from_words) +
                              "' vs transcript '" +
                              join_tokens(tokenize(u.transcript)) + "'"});
      }
    }
  }
  return report;
}

inline ValidationReport validate_sound_clips(
    const std::vector<SoundClip>& records, const std::filesystem::path& audio_root,
    bool verify_checksums = true,
    const std::set<std::string>* label_vocabulary = nullptr) {
  ValidationReport report;
  for (const auto& c : records) {
    manifest_detail::check_asset(c.asset, audio_root, verify_checksums, report);
    if (label_vocabulary) {
      for (const auto& e : c.events) {
        if (!label_vocabulary->count(e)) {
          report.push_back({c.asset.id, "unknown_label", e});
        }
      }
    }
  }
  return report;
}

inline ValidationReport validate_pairs(const std::vector<PairSample>& records,
                                       const std::filesystem::path& audio_root,
                                       bool verify_checksums = true) {
  ValidationReport report;
  for (const auto& p : records) {
    manifest_detail::check_asset(p.audio1, audio_root, verify_checksums, report);
    manifest_detail::check_asset(p.audio2, audio_root, verify_checksums, report);
    if (p.audio1.id == p.audio2.id) {
      report.push_back({p.id, "same_audio_ids", p.audio1.id});
    }
  }
  return report;
}

}  // namespace mabench
