#pragma once

// Prompt templates for the text-LLM services.
//
// The judge templates (one per open-ended task) and the four sentence-edit
// templates are fixed verbatim; rendered prompts are covered by golden-file
// tests and must not drift. Paragraphs are joined with a blank line and
// there is no trailing newline. Placeholders use the [[...]] form.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mabench/error.hpp"

namespace mabench {

// ---------------------------------------------------------------------------
// Judge prompts (open-ended scoring)

inline constexpr std::string_view kJudgeSpeechComparison =
    "Given the transcriptions of two speeches.\n\n"
    "Speech 1: [[Speech 1]]\n\n"
    "Speech 2: [[Speech 2]]\n\n"
    "Determine whether the below response correctly captures the difference "
    "between speech 1 and speech 2.\n\n"
    "[[Response]]\n\n"
    "Your answer should be a single \"Yes\" or \"No\". Do not output anything "
    "else.";

inline constexpr std::string_view kJudgeDialogueGeneration =
    "Given the first two utterances from a conversation between speaker 1 and "
    "speaker 2.\n\n"
    "Speaker 1: [[Speech 1]]\n\n"
    "Speaker 2: [[Speech 2]]\n\n"
    "For the question:\n\n"
    "What would be the possible utterance 3 from speaker 1 as a response to "
    "utterance 2 from speaker 2?\n\n"
    "Determine whether the below response correctly answers the question.\n\n"
    "[[Response]]\n\n"
    "Your answer should be a single \"Yes\" or \"No\". Do not output anything "
    "else.";

inline constexpr std::string_view kJudgeStoryGeneration =
    "Given the story:\n\n"
    "[[Response]]\n\n"
    "Determine whether the below two sounds are presented in the story.\n\n"
    "Sound1: [[Speech 1]]\n\n"
    "Sound2: [[Speech 2]]\n\n"
    "Answer \"Yes\" if both sounds are presented in the story. Otherwise, "
    "answer \"No\".\n\n"
    "Your answer should be a single \"Yes\" or \"No\". Do not output anything "
    "else.";

// ---------------------------------------------------------------------------
// Sentence-edit prompts (training-data synthesis)

enum class EditMode { add_word, delete_word, modify_word, change_structure };

inline constexpr EditMode kAllEditModes[] = {
    EditMode::add_word, EditMode::delete_word, EditMode::modify_word,
    EditMode::change_structure};

inline std::string to_string(EditMode m) {
  switch (m) {
    case EditMode::add_word: return "add";
    case EditMode::delete_word: return "delete";
    case EditMode::modify_word: return "modify";
    case EditMode::change_structure: return "structure";
  }
  throw DataError("bad EditMode");
}

inline constexpr std::string_view kEditPromptAdd =
    "Given the below sentence:\n\n"
    "[[Sentence]]\n\n"
    "You need to modify this sentence to a new one by adding several words. "
    "The number of added words should be less than 3.\n\n"
    "Note that adding is the only operation you can do.\n\n"
    "The new sentence needs to be semantically correct without error. Try to "
    "be creative.\n\n"
    "Your output should be the new sentence only without anything else.\n\n"
    "If you cannot generate a new sentence meeting the above criteria (less "
    "than 3 added words and semantically correctness), output a single word "
    "\"None\".";

inline constexpr std::string_view kEditPromptDelete =
    "Given the below sentence:\n\n"
    "[[Sentence]]\n\n"
    "You need to modify this sentence to a new one by deleting several words. "
    "The number of deleted words should be less than 3.\n\n"
    "Note that deletion is the only operation you can do.\n\n"
    "The new sentence needs to be semantically correct without error. Try to "
    "be creative.\n\n"
    "Your output should be the new sentence only without anything else.\n\n"
    "If you cannot generate a new sentence meeting the above criteria (less "
    "than 3 deleted words and semantically correctness), output a single word "
    "\"None\".";

inline constexpr std::string_view kEditPromptModify =
    "Given the below sentence:\n\n"
    "[[Sentence]]\n\n"
    "You need to modify this sentence to a new one. The edit distance between "
    "the generated sentences and the old one needs to be less than 5.\n\n"
    "The new sentence needs to be semantically correct without error. Try to "
    "be creative.\n\n"
    "Your output should be the new sentence only without anything else.\n\n"
    "If it's impossible to have a new sentence meeting the above criteria "
    "(edit distance and semantically correctness), output \"None\".";

inline constexpr std::string_view kEditPromptStructure =
    "Given the below sentence:\n\n"
    "[[Sentence]]\n\n"
    "You need to derive a new sentence by altering the structure of the given "
    "sentence.\n\n"
    "Remember to keep the wording usage unchanged.\n\n"
    "The difference between two sentences need to be less than 5 words.\n\n"
    "The new sentence needs to be semantically correct without error. Try to "
    "be creative.\n\n"
    "Your output should be the new sentence only without anything else.\n\n"
    "If it's impossible to have a new sentence meeting the above criteria "
    "(less than 5 words difference and semantically correctness), output "
    "\"None\".";

// ---------------------------------------------------------------------------
// Auxiliary editor prompts (no fixed external wording; ours to define)

/// Asks the editor to keep an ordered word subset of the sentence.
inline constexpr std::string_view kReconstructSubsetPrompt =
    "Given the below sentence:\n\n"
    "[[Sentence]]\n\n"
    "Create a shorter sentence by deleting some of the words. The remaining "
    "words must keep their original order and the new sentence must be "
    "semantically correct without error.\n\n"
    "Your output should be the new sentence only without anything else.\n\n"
    "If it's impossible, output a single word \"None\".";

/// Asks the editor to describe the difference between two transcriptions.
inline constexpr std::string_view kSpeechDiffPrompt =
    "Below are the transcriptions of two speeches.\n\n"
    "Transcription 1: [[Speech 1]]\n\n"
    "Transcription 2: [[Speech 2]]\n\n"
    "Describe the content difference between the two speeches in one short "
    "sentence.\n\n"
    "Your output should be the description only without anything else.";

// ---------------------------------------------------------------------------
// Rendering

/// Replaces every [[key]] placeholder; rejects unexpanded leftovers.
inline std::string render_template(
    std::string_view tmpl, const std::map<std::string, std::string>& subs) {
  std::string out(tmpl);
  for (const auto& [key, value] : subs) {
    const std::string marker = "[[" + key + "]]";
    std::size_t pos = 0;
    while ((pos = out.find(marker, pos)) != std::string::npos) {
      out.replace(pos, marker.size(), value);
      pos += value.size();
    }
  }
  if (out.find("[[") != std::string::npos) {
    throw DataError("unexpanded placeholder in template: " +
                    out.substr(out.find("[["), 24));
  }
  return out;
}

inline std::string_view edit_prompt_template(EditMode m) {
  switch (m) {
    case EditMode::add_word: return kEditPromptAdd;
    case EditMode::delete_word: return kEditPromptDelete;
    case EditMode::modify_word: return kEditPromptModify;
    case EditMode::change_structure: return kEditPromptStructure;
  }
  throw DataError("bad EditMode");
}

inline std::string render_edit_prompt(EditMode m, const std::string& sentence) {
  return render_template(edit_prompt_template(m), {{"Sentence", sentence}});
}

inline std::string render_reconstruct_prompt(const std::string& sentence) {
  return render_template(kReconstructSubsetPrompt, {{"Sentence", sentence}});
}

inline std::string render_speech_diff_prompt(const std::string& t1,
                                             const std::string& t2) {
  return render_template(kSpeechDiffPrompt, {{"Speech 1", t1}, {"Speech 2", t2}});
}

/// Judge prompt for one of the three open-ended tasks. ref1/ref2 are the
/// task's reference texts, response is the model output under judgment.
inline std::string render_judge_prompt(const std::string& task,
                                       const std::string& ref1,
                                       const std::string& ref2,
                                       const std::string& response) {
  std::string_view tmpl;
  if (task == "speech_comparison") {
    tmpl = kJudgeSpeechComparison;
  } else if (task == "dialogue_generation") {
    tmpl = kJudgeDialogueGeneration;
  } else if (task == "story_generation") {
    tmpl = kJudgeStoryGeneration;
  } else {
    throw DataError("no judge prompt for task: " + task);
  }
  return render_template(
      tmpl, {{"Speech 1", ref1}, {"Speech 2", ref2}, {"Response", response}});
}

}  // namespace mabench
