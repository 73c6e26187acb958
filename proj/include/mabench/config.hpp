#pragma once

// Run configuration: one JSON file declares seeds, endpoints, datasets,
// task specs, synthesis quotas and directory layout. Relative paths resolve
// against the config file's directory. Credentials never live in the config,
// only the names of environment variables that hold them.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mabench/error.hpp"
#include "mabench/http_clients.hpp"
#include "mabench/sha256.hpp"
#include "mabench/synthgen.hpp"
#include "mabench/task.hpp"

namespace mabench {

/// Deterministic per-stage seed derivation from the run seed.
inline std::uint64_t derive_seed(std::uint64_t base, const std::string& salt) {
  std::string hex = sha256_hex(std::to_string(base) + "|" + salt).substr(0, 16);
  return std::stoull(hex, nullptr, 16);
}

struct DatasetConfig {
  std::string kind;  // "utterance" | "sound"
  std::filesystem::path manifest;
};

struct SynthConfig {
  std::filesystem::path sentences;  // one sentence per line
  std::string sound_dataset;
  std::string asr_dataset;
  std::string classification_dataset;
  std::string caption_dataset;
  std::optional<std::uint64_t> seed;
  double snr_db = 0.0;
  TrainQuotas quotas;
  int diff_regen_budget = 3;
};

inline std::map<std::string, std::string> default_train_instructions() {
  return {
      {"speech_pair", "Describe the difference between the two speeches."},
      {"sound_pair", "Describe the sound events of the two audios."},
      {"asr", "Transcribe the speech into text."},
      {"classification", "What is the sound event in the audio?"},
      {"caption", "Describe the audio."},
  };
}

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  std::filesystem::path source_root = ".";
  std::filesystem::path noun_lexicon;  // one noun per line
  bool verify_checksums = true;
  std::map<std::string, EndpointConfig> endpoints;  // editor/judge/tts/allm
  std::map<std::string, DatasetConfig> datasets;
  std::vector<TaskSpec> tasks;
  InstructionTemplates templates;
  std::map<std::string, std::string> train_instructions =
      default_train_instructions();
  std::optional<SynthConfig> synth;

  const EndpointConfig& endpoint(const std::string& name) const {
    auto it = endpoints.find(name);
    if (it == endpoints.end()) {
      throw DataError("endpoint '" + name + "' is not declared in the config");
    }
    return it->second;
  }

  const DatasetConfig& dataset(const std::string& name) const {
    auto it = datasets.find(name);
    if (it == datasets.end()) {
      throw DataError("dataset '" + name + "' is not declared in the config");
    }
    return it->second;
  }

  void validate() const {
    for (const auto& spec : tasks) {
      spec.validate();
      const auto& ds = dataset(spec.dataset);
      const TaskInfo& info = task_info(spec.task);
      bool wants_sound = info.domain == TaskDomain::sound;
      if (wants_sound && ds.kind != "sound") {
        throw DataError(spec.task + " needs a sound dataset, got '" + ds.kind + "'");
      }
      if (!wants_sound && ds.kind != "utterance") {
        throw DataError(spec.task + " needs an utterance dataset, got '" +
                        ds.kind + "'");
      }
      if (!spec.noise_dataset.empty()) dataset(spec.noise_dataset);
    }
    if (synth) {
      if (!synth->sound_dataset.empty()) dataset(synth->sound_dataset);
      if (!synth->asr_dataset.empty()) dataset(synth->asr_dataset);
      if (!synth->classification_dataset.empty()) {
        dataset(synth->classification_dataset);
      }
      if (!synth->caption_dataset.empty()) dataset(synth->caption_dataset);
    }
  }
};

namespace config_detail {

inline EndpointConfig endpoint_from_json(const json& j,
                                         const std::filesystem::path& base_dir) {
  EndpointConfig e;
  e.base_url = j.value("base_url", std::string{});
  e.model = j.value("model", std::string{});
  e.voice = j.value("voice", std::string{});
  e.api_key_env = j.value("api_key_env", std::string{});
  e.temperature = j.value("temperature", 0.0);
  e.n_samples = j.value("n_samples", 1);
  e.max_tokens = j.value("max_tokens", 512);
  e.max_attempts = j.value("max_attempts", 3);
  e.backoff_ms = j.value("backoff_ms", 250);
  e.max_in_flight = j.value("max_in_flight", 4);
  e.cache_enabled = j.value("cache", false);
  e.timeout_s = j.value("timeout_s", 120);
  if (j.contains("cache_dir")) {
    e.cache_dir = base_dir / j.at("cache_dir").get<std::string>();
  }
  if (e.base_url.empty()) throw DataError("endpoint is missing base_url");
  return e;
}

inline TaskSpec task_spec_from_json(const json& j, std::uint64_t run_seed) {
  TaskSpec s;
  s.task = j.at("task").get<std::string>();
  s.dataset = j.at("dataset").get<std::string>();
  s.target_count = j.at("target_count").get<int>();
  s.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>()
                              : derive_seed(run_seed, s.task + "|" + s.dataset);
  s.noise_dataset = j.value("noise_dataset", std::string{});
  s.noise_snr_db = j.value("noise_snr_db", 10.0);
  s.mix_snr_db = j.value("mix_snr_db", 0.0);
  s.balance_positions = j.value("balance_positions", true);
  s.recon_pair_ratio = j.value("recon_pair_ratio", 0.5);
  s.editor_retries = j.value("editor_retries", 3);
  s.crossfade_ms = j.value("crossfade_ms", 5.0);
  return s;
}

}  // namespace config_detail

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("config not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("config parse error: " + std::string(e.what()));
  }
  const std::filesystem::path base_dir =
      path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  RunConfig cfg;
  try {
    cfg.seed = j.value("seed", std::uint64_t(0));
    cfg.out_dir = base_dir / j.value("out_dir", std::string("out"));
    cfg.source_root = base_dir / j.value("source_root", std::string("."));
    cfg.verify_checksums = j.value("verify_checksums", true);
    if (j.contains("noun_lexicon")) {
      cfg.noun_lexicon = base_dir / j.at("noun_lexicon").get<std::string>();
    }
    if (j.contains("endpoints")) {
      for (auto it = j["endpoints"].begin(); it != j["endpoints"].end(); ++it) {
        cfg.endpoints[it.key()] =
            config_detail::endpoint_from_json(it.value(), base_dir);
      }
    }
    if (j.contains("datasets")) {
      for (auto it = j["datasets"].begin(); it != j["datasets"].end(); ++it) {
        DatasetConfig ds;
        ds.kind = it.value().at("kind").get<std::string>();
        if (ds.kind != "utterance" && ds.kind != "sound") {
          throw DataError("dataset kind must be utterance or sound");
        }
        ds.manifest = base_dir / it.value().at("manifest").get<std::string>();
        cfg.datasets[it.key()] = std::move(ds);
      }
    }
    if (j.contains("tasks")) {
      for (const auto& tj : j["tasks"]) {
        cfg.tasks.push_back(config_detail::task_spec_from_json(tj, cfg.seed));
      }
    }
    if (j.contains("instruction_templates")) {
      for (auto it = j["instruction_templates"].begin();
           it != j["instruction_templates"].end(); ++it) {
        cfg.templates.set(it.key(), it.value().get<std::string>());
      }
    }
    if (j.contains("train_instructions")) {
      for (auto it = j["train_instructions"].begin();
           it != j["train_instructions"].end(); ++it) {
        cfg.train_instructions[it.key()] = it.value().get<std::string>();
      }
    }
    if (j.contains("synth")) {
      const json& sj = j["synth"];
      SynthConfig s;
      s.sentences = base_dir / sj.at("sentences").get<std::string>();
      s.sound_dataset = sj.value("sound_dataset", std::string{});
      s.asr_dataset = sj.value("asr_dataset", std::string{});
      s.classification_dataset = sj.value("classification_dataset", std::string{});
      s.caption_dataset = sj.value("caption_dataset", std::string{});
      if (sj.contains("seed")) s.seed = sj.at("seed").get<std::uint64_t>();
      s.snr_db = sj.value("snr_db", 0.0);
      s.diff_regen_budget = sj.value("diff_regen_budget", 3);
      if (sj.contains("quotas")) {
        const json& q = sj["quotas"];
        s.quotas.speech_pair = q.value("speech_pair", s.quotas.speech_pair);
        s.quotas.sound_pair = q.value("sound_pair", s.quotas.sound_pair);
        s.quotas.asr = q.value("asr", s.quotas.asr);
        s.quotas.classification = q.value("classification", s.quotas.classification);
        s.quotas.caption = q.value("caption", s.quotas.caption);
      }
      cfg.synth = std::move(s);
    }
  } catch (const json::exception& e) {
    throw DataError("config field error: " + std::string(e.what()));
  }
  cfg.validate();
  return cfg;
}

/// Noun lexicon: one noun per line, normalized on load.
inline std::set<std::string> load_noun_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("noun lexicon not found: " + path.string());
  std::set<std::string> nouns;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& tok : tokenize(line)) nouns.insert(std::move(tok));
  }
  return nouns;
}

/// Sentence corpus: one sentence per line, blank lines skipped.
inline std::vector<std::string> load_sentences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("sentences file not found: " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace mabench
