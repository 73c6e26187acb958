#include "mabench/scoring.hpp"

#include <gtest/gtest.h>

#include "mabench/report.hpp"
#include "mabench/rng.hpp"
#include "support/oracles.hpp"
#include "support/stubs.hpp"

using namespace mabench;

// ---------------------------------------------------------------------------
// parse_closed_prediction

TEST(ParseClosed, UnambiguousYes) {
  Prediction p = parse_closed_prediction("s", "Yes, both audios match.",
                                         AnswerSpace::yes_no);
  EXPECT_EQ(*p.parsed, "Yes");
  EXPECT_FALSE(p.defaulted);
}

TEST(ParseClosed, NoLabelDefaultsToNo) {
  Prediction p =
      parse_closed_prediction("s", "I cannot tell.", AnswerSpace::yes_no);
  EXPECT_EQ(*p.parsed, "No");
  EXPECT_TRUE(p.defaulted);
}

TEST(ParseClosed, BothLabelsDefaultToAudio1) {
  Prediction p = parse_closed_prediction("s", "Audio1 - no wait, Audio2",
                                         AnswerSpace::audio_choice);
  EXPECT_EQ(*p.parsed, "Audio1");
  EXPECT_TRUE(p.defaulted);
}

TEST(ParseClosed, SpacedAudioFormsParse) {
  Prediction p =
      parse_closed_prediction("s", "It is audio 2.", AnswerSpace::audio_choice);
  EXPECT_EQ(*p.parsed, "Audio2");
  EXPECT_FALSE(p.defaulted);
}

TEST(ParseClosed, EmbeddedNoInsideWordsDoesNotCount) {
  Prediction p = parse_closed_prediction("s", "I know nothing about audios",
                                         AnswerSpace::yes_no);
  EXPECT_TRUE(p.defaulted);  // "know"/"nothing" must not match "no"
  EXPECT_EQ(*p.parsed, "No");
}

TEST(ParseClosed, TotalAndDeterministicOverFuzzCorpus) {
  Rng rng(555);
  std::vector<std::string> corpus = {
      "",
      "   ",
      "Yes",
      "no",
      "YES and NO",
      "audio1 audio2",
      "\xe4\xb8\xad\xe6\x96\x87 answer: yes",  // bilingual
      "je ne sais pas",
      "AUDIO 1!",
      "answer\naudio\n2",
  };
  const std::string pieces[] = {"yes", "no", "audio1", "audio 2", "maybe",
                                "the", "sound", "!!", "\xc3\xa9", "1", "2"};
  while (corpus.size() < 200) {
    std::string s;
    for (std::size_t i = 0, n = rng.bounded(8); i < n; ++i) {
      s += pieces[rng.bounded(std::size(pieces))];
      s += rng.coin() ? " " : ", ";
    }
    corpus.push_back(s);
  }
  for (const auto& text : corpus) {
    for (AnswerSpace space : {AnswerSpace::yes_no, AnswerSpace::audio_choice}) {
      Prediction a, b;
      EXPECT_NO_THROW(a = parse_closed_prediction("s", text, space));
      EXPECT_NO_THROW(b = parse_closed_prediction("s", text, space));
      ASSERT_TRUE(a.parsed.has_value());
      EXPECT_EQ(*a.parsed, *b.parsed);
      EXPECT_EQ(a.defaulted, b.defaulted);
    }
  }
}

// ---------------------------------------------------------------------------
// accuracy / F1

namespace {

std::pair<std::vector<Prediction>, std::map<std::string, std::string>>
balanced_constant(const std::string& constant, int n) {
  std::vector<Prediction> preds;
  std::map<std::string, std::string> truths;
  for (int i = 0; i < n; ++i) {
    std::string id = "s" + std::to_string(i);
    Prediction p;
    p.sample_id = id;
    p.raw = constant;
    p.parsed = constant;
    preds.push_back(p);
    truths[id] = (i % 2 == 0) ? "Yes" : "No";
  }
  return {preds, truths};
}

}  // namespace

TEST(Accuracy, Examples) {
  auto [preds, truths] = balanced_constant("Yes", 4);
  for (auto& p : preds) p.parsed = truths[p.sample_id];  // all correct
  EXPECT_DOUBLE_EQ(accuracy(preds, truths), 100.0);

  auto [preds2, truths2] = balanced_constant("Yes", 100);
  EXPECT_DOUBLE_EQ(accuracy(preds2, truths2), 50.0);

  auto [preds3, truths3] = balanced_constant("Yes", 4);
  preds3[1].parsed = "Yes";  // truth No -> wrong; others fixed correct
  preds3[0].parsed = "Yes";
  preds3[2].parsed = "Yes";
  preds3[3].parsed = "No";
  EXPECT_DOUBLE_EQ(accuracy(preds3, truths3), 75.0);
}

TEST(Accuracy, IdMismatchRejected) {
  auto [preds, truths] = balanced_constant("Yes", 4);
  preds[0].sample_id = "unknown";
  EXPECT_THROW(accuracy(preds, truths), DataError);
  EXPECT_THROW(accuracy({}, {}), DataError);
}

TEST(BinaryF1, ConstantYesOnBalancedSetIsTwoThirds) {
  auto [preds, truths] = balanced_constant("Yes", 100);
  EXPECT_NEAR(binary_f1(preds, truths, "Yes"), 200.0 / 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(accuracy(preds, truths), 50.0);
}

TEST(BinaryF1, PerfectAndDegenerate) {
  auto [preds, truths] = balanced_constant("Yes", 10);
  for (auto& p : preds) p.parsed = truths[p.sample_id];
  EXPECT_DOUBLE_EQ(binary_f1(preds, truths, "Yes"), 100.0);

  auto [preds2, truths2] = balanced_constant("No", 10);
  EXPECT_DOUBLE_EQ(binary_f1(preds2, truths2, "Yes"), 0.0);  // zero recall
}

// ---------------------------------------------------------------------------
// WER

TEST(Wer, Examples) {
  EXPECT_DOUBLE_EQ(word_error_rate("the cat sat", "the cat sat"), 0.0);
  EXPECT_NEAR(word_error_rate("the cat sat mat", "the cat sat on the mat"),
              2.0 / 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(word_error_rate("", "hello there"), 1.0);
  EXPECT_THROW(word_error_rate("anything", "!!"), DataError);
  // normalization applies to both sides
  EXPECT_DOUBLE_EQ(word_error_rate("The CAT sat!", "the cat sat"), 0.0);
}

TEST(Wer, MatchesBruteForceOracleOnThousandRandomPairs) {
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  Rng rng(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> hyp, ref;
    for (std::size_t i = 0, n = rng.bounded(9); i < n; ++i) {
      hyp.push_back(vocab[rng.bounded(vocab.size())]);
    }
    for (std::size_t i = 0, n = 1 + rng.bounded(8); i < n; ++i) {
      ref.push_back(vocab[rng.bounded(vocab.size())]);
    }
    double expected = double(oracles::edit_distance_recursive(hyp, ref)) /
                      double(ref.size());
    EXPECT_DOUBLE_EQ(word_error_rate(join_tokens(hyp), join_tokens(ref)), expected);
  }
}

// ---------------------------------------------------------------------------
// Judge

TEST(JudgeVotes, LeadingTokenParsing) {
  EXPECT_EQ(parse_judge_vote("Yes"), "Yes");
  EXPECT_EQ(parse_judge_vote("  no."), "No");
  EXPECT_EQ(parse_judge_vote("YES, clearly"), "Yes");
  EXPECT_FALSE(parse_judge_vote("Yesterday").has_value());
  EXPECT_FALSE(parse_judge_vote("The answer is Yes").has_value());
  EXPECT_FALSE(parse_judge_vote("").has_value());
}

TEST(MajorityVote, PermutationInvariantOverAllTriples) {
  const std::vector<std::vector<std::string>> triples = {
      {"Yes", "Yes", "Yes"}, {"Yes", "Yes", "No"}, {"Yes", "No", "Yes"},
      {"No", "Yes", "Yes"},  {"Yes", "No", "No"},  {"No", "Yes", "No"},
      {"No", "No", "Yes"},   {"No", "No", "No"}};
  for (auto votes : triples) {
    std::string base = majority_vote(votes);
    std::sort(votes.begin(), votes.end());
    do {
      EXPECT_EQ(majority_vote(votes), base);
    } while (std::next_permutation(votes.begin(), votes.end()));
  }
  EXPECT_THROW(majority_vote({"Yes"}), DataError);
  EXPECT_THROW(majority_vote({"Yes", "No", "Maybe"}), DataError);
}

namespace {

PairSample open_sample(const std::string& task, const std::string& ref1,
                       const std::string& ref2) {
  PairSample p;
  p.id = "open1";
  p.task = task;
  p.audio1.id = "a1";
  p.audio2.id = "a2";
  p.instruction = "x";
  p.ground_truth = GroundTruth::references({ref1, ref2});
  return p;
}

}  // namespace

TEST(JudgeOpenEnded, MajorityOfVotes) {
  stubs::FixedVotesChat judge({"Yes", "Yes", "No"});
  auto verdict = judge_open_ended(open_sample("speech_comparison", "a b", "a"),
                                  "the difference is b", judge, {});
  EXPECT_EQ(verdict.majority, "Yes");
  EXPECT_EQ(verdict.votes, (std::vector<std::string>{"Yes", "Yes", "No"}));
}

TEST(JudgeOpenEnded, GarbledVoteCountsAsNo) {
  stubs::FixedVotesChat judge({"hmm, unclear", "No", "No."});
  auto verdict = judge_open_ended(open_sample("story_generation", "barking",
                                              "chirping"),
                                  "a story", judge, {});
  EXPECT_EQ(verdict.votes, (std::vector<std::string>{"No", "No", "No"}));
  EXPECT_EQ(verdict.majority, "No");
}

TEST(JudgeOpenEnded, FillsTemplateWithReferencesAndResponse) {
  stubs::FixedVotesChat judge({"Yes", "Yes", "Yes"});
  auto verdict =
      judge_open_ended(open_sample("story_generation", "barking", "chirping"),
                       "dogs barked and birds chirped", judge, {});
  EXPECT_EQ(verdict.majority, "Yes");
  const std::string& prompt = judge.last_prompt();
  EXPECT_NE(prompt.find("Sound1: barking"), std::string::npos);
  EXPECT_NE(prompt.find("Sound2: chirping"), std::string::npos);
  EXPECT_NE(prompt.find("dogs barked and birds chirped"), std::string::npos);
}

TEST(JudgeOpenEnded, ClosedTaskRejected) {
  stubs::FixedVotesChat judge({"Yes", "Yes", "Yes"});
  PairSample p = open_sample("hotword_detection", "a", "b");
  EXPECT_THROW(judge_open_ended(p, "x", judge, {}), DataError);
}

// ---------------------------------------------------------------------------
// Fleiss' kappa

namespace {

AnnotationSet annotations_from_yes_counts(const std::vector<int>& yes_counts) {
  AnnotationSet set;
  for (std::size_t i = 0; i < yes_counts.size(); ++i) {
    std::map<std::string, std::string> labels;
    for (int r = 0; r < 3; ++r) {
      labels["a" + std::to_string(r)] = r < yes_counts[i] ? "Yes" : "No";
    }
    set["s" + std::to_string(i)] = labels;
  }
  return set;
}

}  // namespace

TEST(FleissKappa, UnanimousAgreementIsOne) {
  EXPECT_DOUBLE_EQ(fleiss_kappa(annotations_from_yes_counts({3, 3, 0, 0, 3})), 1.0);
  EXPECT_DOUBLE_EQ(fleiss_kappa(annotations_from_yes_counts({3, 3, 3})), 1.0);
}

TEST(FleissKappa, HandEvaluatedTwoSampleFixture) {
  // votes (Y,Y,N) and (N,N,Y): the closed-form evaluation gives
  // P1 = P2 = 1/3, Pe = 1/2, kappa = -1/3
  std::vector<int> yes_counts = {2, 1};
  double by_hand = oracles::fleiss_kappa_by_hand(yes_counts);
  EXPECT_NEAR(by_hand, -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(fleiss_kappa(annotations_from_yes_counts(yes_counts)), by_hand,
              1e-12);
}

TEST(FleissKappa, MatchesHandOracleOnRandomSets) {
  Rng rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> yes_counts;
    for (int i = 0; i < 20; ++i) yes_counts.push_back(int(rng.bounded(4)));
    double expected = oracles::fleiss_kappa_by_hand(yes_counts);
    EXPECT_NEAR(fleiss_kappa(annotations_from_yes_counts(yes_counts)), expected,
                1e-12);
  }
}

TEST(FleissKappa, RandomLabelsApproachZero) {
  Rng rng(2718);
  std::vector<int> yes_counts;
  for (int i = 0; i < 10000; ++i) {
    int yes = 0;
    for (int r = 0; r < 3; ++r) yes += rng.coin() ? 1 : 0;
    yes_counts.push_back(yes);
  }
  EXPECT_LT(std::fabs(fleiss_kappa(annotations_from_yes_counts(yes_counts))),
            0.05);
}

TEST(FleissKappa, MissingLabelsRejected) {
  AnnotationSet set;
  set["s1"] = {{"a0", "Yes"}, {"a1", "No"}};
  EXPECT_THROW(fleiss_kappa(set), DataError);
  EXPECT_THROW(fleiss_kappa({}), DataError);
}

// ---------------------------------------------------------------------------
// Report

TEST(Report, MacroAverageAndMissingRows) {
  std::vector<TaskScore> rows = {
      {"hotword_detection", "fixture", 20, 40.0, std::nullopt},
      {"sound_comparison", "fixture", 20, 60.0, 66.7},
  };
  RunReport report = build_report(
      rows, {"hotword_detection__fixture", "sound_comparison__fixture",
             "event_retrieval__fixture"});
  EXPECT_DOUBLE_EQ(report.avg_acc, 50.0);
  ASSERT_EQ(report.missing_rows.size(), 1u);
  EXPECT_EQ(report.missing_rows[0], "event_retrieval__fixture");

  std::string text = report_to_text(report);
  EXPECT_NE(text.find("Avg (Acc)"), std::string::npos);
  EXPECT_NE(text.find("50.0"), std::string::npos);
  EXPECT_NE(text.find("event_retrieval__fixture"), std::string::npos);
}

TEST(Report, DeterministicBytes) {
  std::vector<TaskScore> rows = {
      {"sound_comparison", "fixture", 20, 61.25, 70.5},
      {"hotword_detection", "fixture", 20, 42.0, std::nullopt},
  };
  RunReport a = build_report(rows);
  RunReport b = build_report(rows);
  EXPECT_EQ(canonical_dump(to_json(a)), canonical_dump(to_json(b)));
  EXPECT_EQ(report_to_text(a), report_to_text(b));
  // rows come out sorted regardless of input order
  EXPECT_EQ(a.rows[0].task, "hotword_detection");
}
