#pragma once

// Synthetic fixture corpora: short tone-based WAVs with manifests that
// satisfy every loader invariant (word spans, checksums, labels). Fixtures
// are deterministic for a given seed so golden comparisons stay stable.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mabench/audio.hpp"
#include "mabench/manifest.hpp"
#include "mabench/rng.hpp"
#include "mabench/sha256.hpp"

namespace fixtures {

using namespace mabench;

inline Waveform make_sine(double freq, double seconds, double amplitude = 0.3,
                          int rate = kPipelineSampleRate) {
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(std::size_t(seconds * rate));
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = float(amplitude * std::sin(2.0 * M_PI * freq * i / rate));
  }
  return w;
}

inline double tone_for_token(const std::string& token) {
  std::size_t h = 0;
  for (char c : token) h = h * 131 + std::size_t(c);
  return 220.0 + double(h % 40) * 20.0;
}

inline AudioAsset write_asset(const Waveform& w, const std::filesystem::path& root,
                              const std::string& rel) {
  write_wav(w, root / rel);
  AudioAsset a;
  a.id = std::filesystem::path(rel).stem().string();
  a.path = rel;
  a.sample_rate = w.sample_rate;
  a.channels = 1;
  a.duration = w.duration();
  a.sha256 = sha256_file_hex(root / rel);
  return a;
}

/// Utterance whose audio is per-word tones separated by silence; word spans
/// line up with the rendered audio.
inline Utterance make_utterance(const std::filesystem::path& root,
                                const std::string& id,
                                const std::vector<std::string>& words) {
  const double word_s = 0.12, gap_s = 0.03;
  const int rate = kPipelineSampleRate;
  Waveform w;
  w.sample_rate = rate;
  Utterance u;
  double t = gap_s;
  for (const auto& token : words) {
    WordSpan span;
    span.token = token;
    span.start = t;
    span.end = t + word_s;
    u.words.push_back(span);
    t += word_s + gap_s;
  }
  w.samples.assign(std::size_t(t * rate) + 16, 0.0f);
  for (const auto& span : u.words) {
    double freq = tone_for_token(span.token);
    std::size_t a = std::size_t(span.start * rate);
    std::size_t b = std::size_t(span.end * rate);
    for (std::size_t i = a; i < b && i < w.samples.size(); ++i) {
      w.samples[i] = float(0.3 * std::sin(2.0 * M_PI * freq * (i - a) / rate));
    }
  }
  u.asset = write_asset(w, root, id + ".wav");
  std::string transcript;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) transcript += ' ';
    transcript += words[i];
  }
  u.transcript = transcript;
  return u;
}

inline SoundClip make_clip(const std::filesystem::path& root, const std::string& id,
                           const std::vector<std::string>& events,
                           double freq, double seconds = 0.5) {
  SoundClip c;
  c.asset = write_asset(make_sine(freq, seconds), root, id + ".wav");
  c.events = events;
  return c;
}

// ---------------------------------------------------------------------------
// Corpora

inline const std::vector<std::string>& word_bank() {
  static const std::vector<std::string> bank = {
      "the",   "a",      "old",    "small", "watch",  "piano", "river",
      "dog",   "garden", "train",  "book",  "window", "storm", "wizard",
      "quiet", "runs",   "sings",  "broke", "fell",   "found", "near",
      "market", "bridge", "castle", "lamp",  "violin", "barked"};
  return bank;
}

inline const std::vector<std::string>& noun_bank() {
  static const std::vector<std::string> nouns = {
      "watch", "piano", "river", "dog",    "garden", "train",  "book",
      "window", "storm", "wizard", "market", "bridge", "castle", "lamp",
      "violin"};
  return nouns;
}

/// Speech corpus: n utterances of 4-7 words with intent tuples and keywords.
inline std::vector<Utterance> make_speech_corpus(const std::filesystem::path& root,
                                                 int n, std::uint64_t seed) {
  const auto& bank = word_bank();
  static const std::vector<std::vector<std::string>> intents = {
      {"activate", "lamp", "kitchen"},
      {"deactivate", "lamp", "kitchen"},
      {"increase", "volume", "none"},
      {"decrease", "volume", "none"},
  };
  static const std::vector<std::string> keywords = {"go", "stop", "left", "right",
                                                    "up", "down"};
  Rng rng(seed);
  std::vector<Utterance> out;
  for (int i = 0; i < n; ++i) {
    int len = 4 + int(rng.bounded(4));
    std::vector<std::string> words;
    std::set<std::string> seen;
    while (int(words.size()) < len) {
      const std::string& w = bank[rng.bounded(bank.size())];
      if (seen.insert(w).second) words.push_back(w);
    }
    Utterance u = make_utterance(root, "utt" + std::to_string(i), words);
    u.speaker = "spk" + std::to_string(i % 5);
    u.intent = intents[rng.bounded(intents.size())];
    u.keyword = keywords[rng.bounded(keywords.size())];
    out.push_back(std::move(u));
  }
  return out;
}

/// Dialogue corpus: n two-turn dialogues.
inline std::vector<Utterance> make_dialogue_corpus(const std::filesystem::path& root,
                                                   int n, std::uint64_t seed) {
  const auto& bank = word_bank();
  Rng rng(seed);
  std::vector<Utterance> out;
  for (int i = 0; i < n; ++i) {
    for (int turn = 0; turn < 2; ++turn) {
      int len = 3 + int(rng.bounded(4));
      std::vector<std::string> words;
      std::set<std::string> seen;
      while (int(words.size()) < len) {
        const std::string& w = bank[rng.bounded(bank.size())];
        if (seen.insert(w).second) words.push_back(w);
      }
      Utterance u = make_utterance(
          root, "dlg" + std::to_string(i) + "_t" + std::to_string(turn), words);
      u.dialogue = "dlg" + std::to_string(i);
      u.turn = turn;
      u.speaker = turn == 0 ? "speaker1" : "speaker2";
      out.push_back(std::move(u));
    }
  }
  return out;
}

inline const std::vector<std::string>& event_bank() {
  static const std::vector<std::string> events = {
      "barking", "raining", "clapping", "coughing", "sneezing", "typing",
      "ringing", "chirping"};
  return events;
}

/// Single-event sound corpus with captions; `per_event` clips per label.
inline std::vector<SoundClip> make_sound_corpus(const std::filesystem::path& root,
                                                int per_event, std::uint64_t seed,
                                                int n_events = 6) {
  const auto& events = event_bank();
  Rng rng(seed);
  std::vector<SoundClip> out;
  for (int e = 0; e < n_events; ++e) {
    for (int i = 0; i < per_event; ++i) {
      double freq = 180.0 + 60.0 * e + double(rng.bounded(30));
      std::string id = "snd_" + events[e] + "_" + std::to_string(i);
      SoundClip c = make_clip(root, id, {events[e]}, freq,
                              0.4 + 0.05 * double(rng.bounded(4)));
      c.caption = "the sound of " + events[e] + " number " + std::to_string(i);
      out.push_back(std::move(c));
    }
  }
  return out;
}

/// Multi-label corpus: each clip carries 2 events rendered as summed tones.
inline std::vector<SoundClip> make_multilabel_corpus(
    const std::filesystem::path& root, int n, std::uint64_t seed) {
  const auto& events = event_bank();
  Rng rng(seed);
  std::vector<SoundClip> out;
  for (int i = 0; i < n; ++i) {
    std::size_t e1 = rng.bounded(events.size());
    std::size_t e2 = rng.bounded(events.size());
    if (e2 == e1) e2 = (e1 + 1) % events.size();
    Waveform a = make_sine(200.0 + 50.0 * double(e1), 0.5, 0.2);
    Waveform b = make_sine(200.0 + 50.0 * double(e2), 0.5, 0.2);
    for (std::size_t k = 0; k < a.samples.size(); ++k) a.samples[k] += b.samples[k];
    SoundClip c;
    c.asset = write_asset(a, root, "multi" + std::to_string(i) + ".wav");
    c.events = {events[e1], events[e2]};
    std::sort(c.events.begin(), c.events.end());
    c.events.erase(std::unique(c.events.begin(), c.events.end()), c.events.end());
    out.push_back(std::move(c));
  }
  return out;
}

inline void write_noun_lexicon(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& n : noun_bank()) out << n << '\n';
}

/// Scratch directory under the system temp root, wiped on construction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("mabench_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
