#pragma once

// Stage orchestration behind the CLI. Stages communicate only through
// on-disk manifests under out_dir:
//
//   benchmark/   pair shards (<task>__<dataset>.jsonl), audio/, stats.json
//   train/       train.jsonl, rejections.jsonl, audio/, train_stats.json
//   eval/        <shard>.responses.jsonl, audit.jsonl
//   judge/       <shard>.verdicts.jsonl
//   score/       scores.json
//   report/      report.json, report.txt
//
// Every stage is resumable: completed samples are detected from the output
// manifests, a rerun of a completed stage is a no-op, and identical inputs
// + seeds produce byte-identical artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mabench/asset_store.hpp"
#include "mabench/benchgen.hpp"
#include "mabench/config.hpp"
#include "mabench/error.hpp"
#include "mabench/http_clients.hpp"
#include "mabench/manifest.hpp"
#include "mabench/report.hpp"
#include "mabench/scoring.hpp"
#include "mabench/synthgen.hpp"

namespace mabench {

struct StageFilter {
  std::string task;  // restrict to one task when non-empty
  int limit = 0;     // cap samples per shard when > 0

  bool allows(const std::string& task_id) const {
    return task.empty() || task == task_id;
  }
};

namespace pipeline_detail {

inline void append_jsonl(const std::filesystem::path& path, const json& row) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append to " + path.string());
  out << canonical_dump(row) << '\n';
}

inline std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::vector<json> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": malformed JSON: " + e.what());
    }
  }
  return rows;
}

inline std::string shard_stem(const TaskSpec& spec) {
  return spec.task + "__" + spec.dataset;
}

}  // namespace pipeline_detail

class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {}

  const RunConfig& config() const { return cfg_; }

  // -------------------------------------------------------------------------
  // build-benchmark

  void build_benchmark(const StageFilter& filter = {}) {
    const std::filesystem::path bench_dir = cfg_.out_dir / "benchmark";
    std::vector<TaskSpec> specs;
    for (const auto& spec : cfg_.tasks) {
      if (filter.allows(spec.task)) specs.push_back(spec);
    }
    if (specs.empty()) throw DataError("no tasks selected");

    bool complete = std::filesystem::exists(bench_dir / "stats.json");
    for (const auto& spec : specs) {
      complete = complete &&
                 std::filesystem::exists(
                     bench_dir / (pipeline_detail::shard_stem(spec) + ".jsonl"));
    }
    if (complete) {
      std::cout << "build-benchmark: already complete, nothing to do\n";
      return;
    }

    AssetStore store(bench_dir);
    BenchContext ctx{cfg_.source_root, &store, &cfg_.templates};
    std::vector<TaskStats> stats;
    for (const auto& spec : specs) {
      BuildOutcome outcome = run_builder(spec, ctx);
      const TaskInfo& info = task_info(spec.task);
      bool equalize = info.category == TaskCategory::closed_form &&
                      (info.answer_space != AnswerSpace::audio_choice ||
                       spec.balance_positions);
      auto samples = balance_and_shuffle(std::move(outcome.samples),
                                         derive_seed(spec.seed, "shuffle"),
                                         equalize);
      if (filter.limit > 0 && int(samples.size()) > filter.limit) {
        samples.resize(filter.limit);
      }
      ValidationReport report =
          validate_pairs(samples, bench_dir, cfg_.verify_checksums);
      if (!report.empty()) {
        throw DataError("generated shard failed validation: " +
                        report.front().kind + " " + report.front().detail);
      }
      const std::string stem = pipeline_detail::shard_stem(spec);
      save_pair_manifest(samples, bench_dir / (stem + ".jsonl"));
      stats.push_back(summarize_shard(samples, spec.task, spec.dataset, outcome));
      std::cout << "built " << stem << ": " << samples.size() << " samples\n";
    }
    write_benchmark_stats(stats, bench_dir / "stats.json");
  }

  // -------------------------------------------------------------------------
  // synth-train

  void synth_train() {
    if (!cfg_.synth) throw DataError("config has no synth section");
    const SynthConfig& sc = *cfg_.synth;
    const std::filesystem::path train_dir = cfg_.out_dir / "train";
    if (std::filesystem::exists(train_dir / "train.jsonl")) {
      std::cout << "synth-train: already complete, nothing to do\n";
      return;
    }

    AssetStore store(train_dir);
    std::vector<TrainExample> supply;
    std::vector<RejectionEntry> rejections;
    const std::uint64_t seed = sc.seed.value_or(derive_seed(cfg_.seed, "synth"));

    if (!sc.sentences.empty()) {
      HttpChatClient editor(cfg_.endpoint("editor"));
      HttpTtsClient tts(cfg_.endpoint("tts"));
      EditorOptions opts{cfg_.endpoint("editor").model,
                         cfg_.endpoint("editor").temperature,
                         cfg_.endpoint("editor").max_tokens};
      auto sentences = load_sentences(sc.sentences);
      auto result = synth_speech_pairs(
          sentences, editor, opts, tts, cfg_.endpoint("tts").voice, store,
          cfg_.train_instructions.at("speech_pair"), sc.diff_regen_budget);
      supply.insert(supply.end(), result.examples.begin(), result.examples.end());
      rejections.insert(rejections.end(), result.rejections.begin(),
                        result.rejections.end());
    }
    if (!sc.sound_dataset.empty()) {
      auto clips = load_sound_manifest(cfg_.dataset(sc.sound_dataset).manifest);
      auto sound_pairs = synth_sound_pairs(
          clips, cfg_.source_root, store, cfg_.train_instructions.at("sound_pair"),
          sc.quotas.sound_pair, derive_seed(seed, "sound_pair"), sc.snr_db);
      supply.insert(supply.end(), sound_pairs.begin(), sound_pairs.end());
    }
    if (!sc.asr_dataset.empty()) {
      auto utts = load_utterance_manifest(cfg_.dataset(sc.asr_dataset).manifest);
      auto asr = make_asr_examples(utts, cfg_.source_root, store,
                                   cfg_.train_instructions.at("asr"));
      supply.insert(supply.end(), asr.begin(), asr.end());
    }
    if (!sc.classification_dataset.empty()) {
      auto clips =
          load_sound_manifest(cfg_.dataset(sc.classification_dataset).manifest);
      auto cls = make_classification_examples(
          clips, cfg_.source_root, store,
          cfg_.train_instructions.at("classification"));
      supply.insert(supply.end(), cls.begin(), cls.end());
    }
    if (!sc.caption_dataset.empty()) {
      auto clips = load_sound_manifest(cfg_.dataset(sc.caption_dataset).manifest);
      auto cap = make_caption_examples(clips, cfg_.source_root, store,
                                       cfg_.train_instructions.at("caption"));
      supply.insert(supply.end(), cap.begin(), cap.end());
    }

    TrainMix mix = assemble_training_mix(supply, sc.quotas, seed);
    save_train_manifest(mix.examples, train_dir / "train.jsonl");
    {
      std::vector<json> rows;
      for (const auto& r : rejections) rows.push_back(to_json(r));
      std::ofstream out(train_dir / "rejections.jsonl",
                        std::ios::binary | std::ios::trunc);
      for (const auto& r : rows) out << canonical_dump(r) << '\n';
    }
    {
      json counts = json::object();
      for (const auto& [family, n] : mix.family_counts) counts[family] = n;
      json stats{{"family_counts", std::move(counts)},
                 {"shortfalls", mix.shortfalls},
                 {"total", int(mix.examples.size())}};
      std::ofstream out(train_dir / "train_stats.json",
                        std::ios::binary | std::ios::trunc);
      out << canonical_dump(stats) << '\n';
    }
    std::cout << "synth-train: " << mix.examples.size() << " examples\n";
  }

  // -------------------------------------------------------------------------
  // evaluate

  void evaluate(const StageFilter& filter = {}) {
    const EndpointConfig& allm_cfg = cfg_.endpoint("allm");
    if (!endpoint_reachable(allm_cfg.base_url)) {
      throw ServiceError("ALLM endpoint unreachable: " + allm_cfg.base_url);
    }
    HttpAllmClient allm(allm_cfg);
    const std::filesystem::path bench_dir = cfg_.out_dir / "benchmark";
    const std::filesystem::path eval_dir = cfg_.out_dir / "eval";
    std::filesystem::create_directories(eval_dir);

    std::string current_sample;
    allm.set_audit_sink([&](const json& entry) {
      json row = entry;
      row["sample_id"] = current_sample;
      pipeline_detail::append_jsonl(eval_dir / "audit.jsonl", row);
    });

    int answered = 0, skipped = 0;
    for (const auto& spec : cfg_.tasks) {
      if (!filter.allows(spec.task)) continue;
      const std::string stem = pipeline_detail::shard_stem(spec);
      auto samples = load_pair_manifest(bench_dir / (stem + ".jsonl"));
      if (filter.limit > 0 && int(samples.size()) > filter.limit) {
        samples.resize(filter.limit);
      }
      const std::filesystem::path responses_path =
          eval_dir / (stem + ".responses.jsonl");
      std::set<std::string> done;
      for (const auto& row : pipeline_detail::read_jsonl(responses_path)) {
        done.insert(row.at("sample_id").get<std::string>());
      }
      for (const auto& p : samples) {
        if (done.count(p.id)) {
          ++skipped;
          continue;
        }
        current_sample = p.id;
        AudioQuery q;
        q.instruction = p.instruction;
        q.audios = {bench_dir / p.audio1.path, bench_dir / p.audio2.path};
        auto reply = allm.respond(q);
        ResponseRecord rec{p.id, reply.value_or(""), !reply.has_value()};
        pipeline_detail::append_jsonl(responses_path, to_json(rec));
        ++answered;
      }
    }
    if (answered == 0) {
      std::cout << "evaluate: already complete (" << skipped << " samples)\n";
    } else {
      std::cout << "evaluate: " << answered << " responses collected\n";
    }
  }

  // -------------------------------------------------------------------------
  // judge

  void judge(const StageFilter& filter = {}) {
    const EndpointConfig& judge_cfg = cfg_.endpoint("judge");
    if (!endpoint_reachable(judge_cfg.base_url)) {
      throw ServiceError("judge endpoint unreachable: " + judge_cfg.base_url);
    }
    HttpChatClient judge_client(judge_cfg);
    JudgeOptions opts{judge_cfg.model, judge_cfg.temperature,
                      judge_cfg.n_samples > 0 ? judge_cfg.n_samples : 3,
                      judge_cfg.max_tokens};
    const std::filesystem::path bench_dir = cfg_.out_dir / "benchmark";
    const std::filesystem::path eval_dir = cfg_.out_dir / "eval";
    const std::filesystem::path judge_dir = cfg_.out_dir / "judge";

    int judged = 0;
    for (const auto& spec : cfg_.tasks) {
      if (!filter.allows(spec.task)) continue;
      if (task_info(spec.task).category != TaskCategory::open_ended) continue;
      const std::string stem = pipeline_detail::shard_stem(spec);
      auto samples = load_pair_manifest(bench_dir / (stem + ".jsonl"));

      std::map<std::string, ResponseRecord> responses;
      for (const auto& row :
           pipeline_detail::read_jsonl(eval_dir / (stem + ".responses.jsonl"))) {
        ResponseRecord rec = response_record_from_json(row);
        responses[rec.sample_id] = rec;
      }
      const std::filesystem::path verdicts_path =
          judge_dir / (stem + ".verdicts.jsonl");
      std::set<std::string> done;
      for (const auto& row : pipeline_detail::read_jsonl(verdicts_path)) {
        done.insert(row.at("sample_id").get<std::string>());
      }
      for (const auto& p : samples) {
        if (done.count(p.id)) continue;
        auto it = responses.find(p.id);
        if (it == responses.end()) continue;  // not evaluated yet
        JudgeVerdict verdict;
        if (it->second.unanswered) {
          // no model output to judge; an unanswered sample scores No
          verdict.sample_id = p.id;
          verdict.raw_responses = {"", "", ""};
          verdict.votes = {"No", "No", "No"};
          verdict.majority = "No";
        } else {
          verdict = judge_open_ended(p, it->second.raw, judge_client, opts);
        }
        pipeline_detail::append_jsonl(verdicts_path, to_json(verdict));
        ++judged;
      }
    }
    if (judged == 0) {
      std::cout << "judge: already complete, nothing to do\n";
    } else {
      std::cout << "judge: " << judged << " verdicts\n";
    }
  }

  // -------------------------------------------------------------------------
  // score

  void score(const StageFilter& filter = {}) {
    const std::filesystem::path bench_dir = cfg_.out_dir / "benchmark";
    const std::filesystem::path eval_dir = cfg_.out_dir / "eval";
    const std::filesystem::path judge_dir = cfg_.out_dir / "judge";

    json rows = json::array();
    for (const auto& spec : cfg_.tasks) {
      if (!filter.allows(spec.task)) continue;
      const TaskInfo& info = task_info(spec.task);
      const std::string stem = pipeline_detail::shard_stem(spec);
      auto shard_path = bench_dir / (stem + ".jsonl");
      auto responses_path = eval_dir / (stem + ".responses.jsonl");
      if (!std::filesystem::exists(shard_path) ||
          !std::filesystem::exists(responses_path)) {
        continue;  // absent rows are surfaced by the report stage
      }
      auto samples = load_pair_manifest(shard_path);
      std::map<std::string, ResponseRecord> responses;
      for (const auto& row : pipeline_detail::read_jsonl(responses_path)) {
        ResponseRecord rec = response_record_from_json(row);
        responses[rec.sample_id] = rec;
      }

      json row{{"samples", 0}, {"source", spec.dataset}, {"task", spec.task}};
      if (info.category == TaskCategory::closed_form) {
        std::vector<Prediction> preds;
        std::map<std::string, std::string> truths;
        for (const auto& p : samples) {
          auto it = responses.find(p.id);
          if (it == responses.end()) {
            throw DataError("missing response for sample " + p.id +
                            "; run evaluate first");
          }
          preds.push_back(
              parse_closed_prediction(p.id, it->second.raw, info.answer_space));
          truths[p.id] = p.ground_truth.label;
        }
        row["samples"] = int(preds.size());
        row["acc"] = accuracy(preds, truths);
        if (info.has_f1) row["f1"] = binary_f1(preds, truths, "Yes");
      } else {
        auto verdict_rows =
            pipeline_detail::read_jsonl(judge_dir / (stem + ".verdicts.jsonl"));
        if (verdict_rows.empty()) continue;  // judged later; report marks absent
        std::map<std::string, JudgeVerdict> verdicts;
        for (const auto& vj : verdict_rows) {
          JudgeVerdict v = judge_verdict_from_json(vj);
          verdicts[v.sample_id] = v;
        }
        int yes = 0, total = 0;
        for (const auto& p : samples) {
          auto it = verdicts.find(p.id);
          if (it == verdicts.end()) {
            throw DataError("missing verdict for sample " + p.id +
                            "; run judge first");
          }
          if (it->second.majority == "Yes") ++yes;
          ++total;
        }
        row["samples"] = total;
        row["acc"] = total > 0 ? 100.0 * yes / total : 0.0;
      }
      rows.push_back(std::move(row));
    }
    std::filesystem::create_directories(cfg_.out_dir / "score");
    std::ofstream out(cfg_.out_dir / "score" / "scores.json",
                      std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write scores.json");
    out << canonical_dump(rows) << '\n';
    std::cout << "score: " << rows.size() << " rows\n";
  }

  // -------------------------------------------------------------------------
  // report

  void report() {
    const std::filesystem::path scores_path =
        cfg_.out_dir / "score" / "scores.json";
    std::ifstream in(scores_path);
    if (!in) throw DataError("scores.json not found; run score first");
    json rows = json::parse(in);

    std::vector<TaskScore> scores;
    for (const auto& row : rows) {
      TaskScore s;
      s.task = row.at("task").get<std::string>();
      s.source = row.at("source").get<std::string>();
      s.samples = row.at("samples").get<int>();
      s.acc = row.at("acc").get<double>();
      if (row.contains("f1")) s.f1 = row.at("f1").get<double>();
      scores.push_back(std::move(s));
    }
    std::vector<std::string> expected;
    for (const auto& spec : cfg_.tasks) {
      expected.push_back(pipeline_detail::shard_stem(spec));
    }
    RunReport run_report = build_report(std::move(scores), expected);
    write_report_files(run_report, cfg_.out_dir / "report");
    std::cout << "report: avg acc "
              << report_detail::fixed1(run_report.avg_acc) << "\n";
  }

 private:
  BuildOutcome run_builder(const TaskSpec& spec, const BenchContext& ctx) {
    const DatasetConfig& ds = cfg_.dataset(spec.dataset);
    if (spec.task == "speech_comparison") {
      auto utts = load_utterance_manifest(ds.manifest);
      HttpChatClient editor(cfg_.endpoint("editor"));
      EditorOptions opts{cfg_.endpoint("editor").model,
                         cfg_.endpoint("editor").temperature,
                         cfg_.endpoint("editor").max_tokens};
      return build_speech_comparison(utts, editor, opts, spec, ctx);
    }
    if (spec.task == "dialogue_generation") {
      return build_dialogue_generation(load_utterance_manifest(ds.manifest), spec,
                                       ctx);
    }
    if (spec.task == "hotword_detection") {
      if (cfg_.noun_lexicon.empty()) {
        throw DataError("hotword_detection requires a noun_lexicon in the config");
      }
      return build_hotword_detection(load_utterance_manifest(ds.manifest),
                                     load_noun_lexicon(cfg_.noun_lexicon), spec,
                                     ctx);
    }
    if (spec.task == "speech_identification") {
      auto noises =
          load_sound_manifest(cfg_.dataset(spec.noise_dataset).manifest);
      return build_speech_identification(load_utterance_manifest(ds.manifest),
                                         noises, spec, ctx);
    }
    if (spec.task == "intent_identification") {
      return build_intent_identification(load_utterance_manifest(ds.manifest),
                                         spec, ctx);
    }
    if (spec.task == "keyword_comparison") {
      return build_keyword_comparison(load_utterance_manifest(ds.manifest), spec,
                                      ctx);
    }
    if (spec.task == "story_generation") {
      return build_story_generation(load_sound_manifest(ds.manifest), spec, ctx);
    }
    if (spec.task == "sound_comparison") {
      return build_sound_comparison(load_sound_manifest(ds.manifest), spec, ctx);
    }
    if (spec.task == "event_detection") {
      return build_event_detection(load_sound_manifest(ds.manifest), spec, ctx);
    }
    if (spec.task == "caption_retrieval") {
      return build_retrieval(load_sound_manifest(ds.manifest),
                             RetrievalMode::caption, spec, ctx);
    }
    if (spec.task == "event_retrieval") {
      return build_retrieval(load_sound_manifest(ds.manifest),
                             RetrievalMode::event, spec, ctx);
    }
    throw DataError("unknown task: " + spec.task);
  }

  RunConfig cfg_;
};

}  // namespace mabench
