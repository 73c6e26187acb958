#pragma once

// Response parsing, the default-answer policy, exact metrics (accuracy,
// binary F1, WER), the majority-vote judge and Fleiss' kappa. All metric
// functions are pure; judge calls go through the shared ChatClient.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mabench/error.hpp"
#include "mabench/manifest.hpp"
#include "mabench/model_client.hpp"
#include "mabench/prompts.hpp"
#include "mabench/task.hpp"
#include "mabench/text.hpp"

namespace mabench {

// ---------------------------------------------------------------------------
// Closed-form parsing and the default-answer policy

struct Prediction {
  std::string sample_id;
  std::string raw;
  std::optional<std::string> parsed;  // final label after the policy
  bool defaulted = false;
};

/// Total function: searches the raw text for an unambiguous label token.
/// Exactly one label family found -> that label; none or both -> the
/// task-context default ("No" for yes/no, "Audio1" for audio choice).
inline Prediction parse_closed_prediction(const std::string& sample_id,
                                          const std::string& raw,
                                          AnswerSpace space) {
  if (space == AnswerSpace::free_text) {
    throw DataError("free-text answers are judged, not parsed");
  }
  const std::vector<std::string> tokens = tokenize(raw);
  Prediction p;
  p.sample_id = sample_id;
  p.raw = raw;

  bool found_a = false, found_b = false;
  if (space == AnswerSpace::yes_no) {
    for (const auto& t : tokens) {
      if (t == "yes") found_a = true;
      if (t == "no") found_b = true;
    }
  } else {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i] == "audio1") found_a = true;
      if (tokens[i] == "audio2") found_b = true;
      if (tokens[i] == "audio" && i + 1 < tokens.size()) {
        if (tokens[i + 1] == "1") found_a = true;
        if (tokens[i + 1] == "2") found_b = true;
      }
    }
  }
  const std::string label_a = space == AnswerSpace::yes_no ? "Yes" : "Audio1";
  const std::string label_b = space == AnswerSpace::yes_no ? "No" : "Audio2";
  if (found_a != found_b) {
    p.parsed = found_a ? label_a : label_b;
    p.defaulted = false;
  } else {
    // none found, or both: fall back to the task-context default
    p.parsed = space == AnswerSpace::yes_no ? "No" : "Audio1";
    p.defaulted = true;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Exact metrics

namespace scoring_detail {

inline void check_alignment(const std::vector<Prediction>& preds,
                            const std::map<std::string, std::string>& truths) {
  if (preds.empty()) throw DataError("no predictions to score");
  if (preds.size() != truths.size()) {
    throw DataError("prediction/truth size mismatch: " +
                    std::to_string(preds.size()) + " vs " +
                    std::to_string(truths.size()));
  }
  for (const auto& p : preds) {
    if (!truths.count(p.sample_id)) {
      throw DataError("prediction for unknown sample id: " + p.sample_id);
    }
  }
}

}  // namespace scoring_detail

/// Percentage of exact label matches.
inline double accuracy(const std::vector<Prediction>& preds,
                       const std::map<std::string, std::string>& truths) {
  scoring_detail::check_alignment(preds, truths);
  std::size_t correct = 0;
  for (const auto& p : preds) {
    if (p.parsed && *p.parsed == truths.at(p.sample_id)) ++correct;
  }
  return 100.0 * double(correct) / double(preds.size());
}

/// Percentage F1 of the positive class; 0.0 when precision or recall has a
/// zero denominator.
inline double binary_f1(const std::vector<Prediction>& preds,
                        const std::map<std::string, std::string>& truths,
                        const std::string& positive = "Yes") {
  scoring_detail::check_alignment(preds, truths);
  long tp = 0, fp = 0, fn = 0;
  for (const auto& p : preds) {
    bool pred_pos = p.parsed && *p.parsed == positive;
    bool true_pos = truths.at(p.sample_id) == positive;
    if (pred_pos && true_pos) ++tp;
    if (pred_pos && !true_pos) ++fp;
    if (!pred_pos && true_pos) ++fn;
  }
  if (tp + fp == 0 || tp + fn == 0) return 0.0;
  double precision = double(tp) / double(tp + fp);
  double recall = double(tp) / double(tp + fn);
  if (precision + recall == 0.0) return 0.0;
  return 100.0 * 2.0 * precision * recall / (precision + recall);
}

/// Word-level Levenshtein distance over normalized tokens, divided by the
/// reference length.
inline double word_error_rate(const std::string& hyp, const std::string& ref) {
  const auto ref_tokens = tokenize(ref);
  if (ref_tokens.empty()) {
    throw DataError("empty reference after normalization");
  }
  const auto hyp_tokens = tokenize(hyp);
  return double(token_levenshtein(hyp_tokens, ref_tokens)) /
         double(ref_tokens.size());
}

// ---------------------------------------------------------------------------
// Majority-vote judge

struct JudgeVerdict {
  std::string sample_id;
  std::vector<std::string> raw_responses;  // 3 raw judge texts
  std::vector<std::string> votes;          // 3 parsed Yes/No (non-parse -> No)
  std::string majority;
};

/// Strict vote parsing: the leading alphabetic token after whitespace must
/// be yes/no (case-insensitive); anything else does not parse.
inline std::optional<std::string> parse_judge_vote(const std::string& raw) {
  std::size_t i = 0;
  while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
  std::string token;
  while (i < raw.size() && std::isalpha(static_cast<unsigned char>(raw[i]))) {
    token.push_back(char(std::tolower(static_cast<unsigned char>(raw[i]))));
    ++i;
  }
  if (token == "yes") return "Yes";
  if (token == "no") return "No";
  return std::nullopt;
}

/// The label held by at least 2 of the 3 votes.
inline std::string majority_vote(const std::vector<std::string>& votes) {
  if (votes.size() != 3) throw DataError("majority vote needs exactly 3 votes");
  int yes = 0;
  for (const auto& v : votes) {
    if (v == "Yes") ++yes;
    else if (v != "No") throw DataError("vote must be Yes or No");
  }
  return yes >= 2 ? "Yes" : "No";
}

struct JudgeOptions {
  std::string model;
  double temperature = 0.7;
  int n_samples = 3;
  int max_tokens = 8;
};

/// Scores one open-ended response: fills the task's judge template, samples
/// the judge n times, parses each reply (a non-parsing reply counts as No)
/// and returns the majority.
inline JudgeVerdict judge_open_ended(const PairSample& sample,
                                     const std::string& response,
                                     ChatClient& judge, const JudgeOptions& opts) {
  if (sample.ground_truth.kind != GroundTruthKind::references ||
      sample.ground_truth.texts.size() < 2) {
    throw DataError("sample lacks judge reference texts: " + sample.id);
  }
  const std::string prompt =
      render_judge_prompt(sample.task, sample.ground_truth.texts[0],
                          sample.ground_truth.texts[1], response);
  ChatRequest req = ChatRequest::user(prompt, opts.model, opts.temperature,
                                      opts.n_samples, opts.max_tokens);
  JudgeVerdict verdict;
  verdict.sample_id = sample.id;
  verdict.raw_responses = judge.complete(req);
  for (const auto& raw : verdict.raw_responses) {
    verdict.votes.push_back(parse_judge_vote(raw).value_or("No"));
  }
  verdict.majority = majority_vote(verdict.votes);
  return verdict;
}

// ---------------------------------------------------------------------------
// Inter-annotator agreement

/// Fleiss' kappa for 3 raters and 2 categories. Every sample must carry
/// exactly 3 labels.
inline double fleiss_kappa(const AnnotationSet& annotations) {
  if (annotations.empty()) throw DataError("no annotations");
  const double n = 3.0;  // raters per sample
  double sum_pi = 0.0;
  long yes_total = 0, label_total = 0;
  for (const auto& [sample, labels] : annotations) {
    if (labels.size() != 3) {
      throw DataError("sample '" + sample + "' does not have exactly 3 labels");
    }
    long yes = 0;
    for (const auto& [_, label] : labels) {
      if (label == "Yes") ++yes;
    }
    long no = 3 - yes;
    yes_total += yes;
    label_total += 3;
    sum_pi += (double(yes * yes + no * no) - n) / (n * (n - 1.0));
  }
  const double p_bar = sum_pi / double(annotations.size());
  const double p_yes = double(yes_total) / double(label_total);
  const double p_e = p_yes * p_yes + (1.0 - p_yes) * (1.0 - p_yes);
  if (p_e >= 1.0) return 1.0;  // degenerate: a single category everywhere
  return (p_bar - p_e) / (1.0 - p_e);
}

// ---------------------------------------------------------------------------
// Prediction / verdict persistence (JSONL rows)

inline json to_json(const Prediction& p) {
  json j{{"defaulted", p.defaulted}, {"raw", p.raw}, {"sample_id", p.sample_id}};
  if (p.parsed) j["parsed"] = *p.parsed;
  return j;
}

/// Raw response rows written by the evaluate stage (parsing happens later,
/// at scoring time, so the raw text is preserved verbatim).
struct ResponseRecord {
  std::string sample_id;
  std::string raw;
  bool unanswered = false;
};

inline json to_json(const ResponseRecord& r) {
  return json{{"raw", r.raw}, {"sample_id", r.sample_id},
              {"unanswered", r.unanswered}};
}

inline ResponseRecord response_record_from_json(const json& j) {
  using namespace manifest_detail;
  ResponseRecord r;
  r.sample_id = require_as<std::string>(j, "sample_id");
  r.raw = require_as<std::string>(j, "raw");
  r.unanswered = require_as<bool>(j, "unanswered");
  return r;
}

inline json to_json(const JudgeVerdict& v) {
  return json{{"majority", v.majority},
              {"raw_responses", v.raw_responses},
              {"sample_id", v.sample_id},
              {"votes", v.votes}};
}

inline JudgeVerdict judge_verdict_from_json(const json& j) {
  using namespace manifest_detail;
  JudgeVerdict v;
  v.sample_id = require_as<std::string>(j, "sample_id");
  v.raw_responses = require_as<std::vector<std::string>>(j, "raw_responses");
  v.votes = require_as<std::vector<std::string>>(j, "votes");
  v.majority = require_as<std::string>(j, "majority");
  return v;
}

}  // namespace mabench
