#pragma once

// The 11 benchmark tasks: six speech tasks, five sound tasks. Each task has
// a fixed category (open-ended vs closed-form), answer space and metric set;
// the instruction wording is a per-task template that configs may override.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mabench/error.hpp"

namespace mabench {

enum class TaskCategory { open_ended, closed_form };
enum class AnswerSpace { yes_no, audio_choice, free_text };
enum class TaskDomain { speech, sound };

struct TaskInfo {
  std::string id;
  TaskDomain domain;
  TaskCategory category;
  AnswerSpace answer_space;
  bool has_f1;  // closed-form tasks scored F1/Acc carry both metrics
};

inline const std::vector<TaskInfo>& task_registry() {
  static const std::vector<TaskInfo> tasks = {
      {"speech_comparison", TaskDomain::speech, TaskCategory::open_ended,
       AnswerSpace::free_text, false},
      {"dialogue_generation", TaskDomain::speech, TaskCategory::open_ended,
       AnswerSpace::free_text, false},
      {"hotword_detection", TaskDomain::speech, TaskCategory::closed_form,
       AnswerSpace::audio_choice, false},
      {"speech_identification", TaskDomain::speech, TaskCategory::closed_form,
       AnswerSpace::yes_no, true},
      {"keyword_comparison", TaskDomain::speech, TaskCategory::closed_form,
       AnswerSpace::yes_no, true},
      {"intent_identification", TaskDomain::speech, TaskCategory::closed_form,
       AnswerSpace::yes_no, true},
      {"story_generation", TaskDomain::sound, TaskCategory::open_ended,
       AnswerSpace::free_text, false},
      {"sound_comparison", TaskDomain::sound, TaskCategory::closed_form,
       AnswerSpace::yes_no, true},
      {"caption_retrieval", TaskDomain::sound, TaskCategory::closed_form,
       AnswerSpace::audio_choice, false},
      {"event_retrieval", TaskDomain::sound, TaskCategory::closed_form,
       AnswerSpace::audio_choice, false},
      {"event_detection", TaskDomain::sound, TaskCategory::closed_form,
       AnswerSpace::audio_choice, false},
  };
  return tasks;
}

inline const TaskInfo& task_info(const std::string& id) {
  for (const auto& t : task_registry()) {
    if (t.id == id) return t;
  }
  throw DataError("unknown task: " + id);
}

/// Metric column as printed in the stats file ("Acc" or "F1/Acc").
inline std::string metric_name(const TaskInfo& t) {
  return t.has_f1 ? "F1/Acc" : "Acc";
}

/// Generation parameters for one task over one source dataset.
struct TaskSpec {
  std::string task;
  std::string dataset;                 // source dataset name (config key)
  int target_count = 0;
  std::uint64_t seed = 0;
  std::string noise_dataset;           // speech_identification only
  double noise_snr_db = 10.0;          // speech-dominant overlay
  double mix_snr_db = 0.0;             // balanced mixing elsewhere
  bool balance_positions = true;       // retrieval position balancing pass
  double recon_pair_ratio = 0.5;       // speech_comparison: share of recon-vs-recon
  int editor_retries = 3;
  double crossfade_ms = 5.0;

  void validate() const {
    const TaskInfo& info = task_info(task);
    if (target_count <= 0) throw DataError("target_count must be positive");
    if (info.category == TaskCategory::open_ended && info.answer_space != AnswerSpace::free_text) {
      throw DataError("open-ended tasks must use the free_text answer space");
    }
    if (task == "speech_identification" && noise_dataset.empty()) {
      throw DataError("speech_identification requires a noise_dataset");
    }
    if (recon_pair_ratio < 0.0 || recon_pair_ratio > 1.0) {
      throw DataError("recon_pair_ratio must lie in [0, 1]");
    }
  }
};

// ---------------------------------------------------------------------------
// Instruction templates

/// Default instruction wording per task. Placeholders: {WORD}, {EVENT},
/// {CAPTION}. Configs may override any entry.
inline std::map<std::string, std::string> default_instruction_templates() {
  return {
      {"speech_comparison",
       "Listen to the two speeches. What is the content difference between "
       "them?"},
      {"dialogue_generation",
       "The two audios are the first two utterances of a conversation. What "
       "would be the next utterance from speaker 1 as a response to speaker "
       "2?"},
      {"hotword_detection",
       "Which audio contains the spoken word '{WORD}'? Answer Audio1 or "
       "Audio2."},
      {"speech_identification",
       "Do the two speeches have the same content? Answer Yes or No."},
      {"keyword_comparison",
       "Do the two speeches contain the same keyword? Answer Yes or No."},
      {"intent_identification",
       "Do the two speeches express the same intent? Answer Yes or No."},
      {"story_generation",
       "Create a brief story that incorporates the sounds from both audios."},
      {"sound_comparison",
       "Do the two audios belong to the same sound event category? Answer Yes "
       "or No."},
      {"caption_retrieval",
       "Which audio aligns more closely with the caption '{CAPTION}'? Answer "
       "Audio1 or Audio2."},
      {"event_retrieval",
       "Which audio contains the sound of {EVENT}? Answer Audio1 or Audio2."},
      {"event_detection",
       "Is the sound of {EVENT} present in Audio1 or Audio2? Answer Audio1 or "
       "Audio2."},
  };
}

class InstructionTemplates {
 public:
  InstructionTemplates() : by_task_(default_instruction_templates()) {}

  void set(const std::string& task, std::string tmpl) {
    by_task_[task] = std::move(tmpl);
  }

  std::string render(const std::string& task,
                     const std::map<std::string, std::string>& subs = {}) const {
    auto it = by_task_.find(task);
    if (it == by_task_.end()) throw DataError("no instruction template for " + task);
    std::string out = it->second;
    for (const auto& [key, value] : subs) {
      const std::string marker = "{" + key + "}";
      std::size_t pos = 0;
      while ((pos = out.find(marker, pos)) != std::string::npos) {
        out.replace(pos, marker.size(), value);
        pos += value.size();
      }
    }
    for (const char* marker : {"{WORD}", "{EVENT}", "{CAPTION}"}) {
      if (out.find(marker) != std::string::npos) {
        throw DataError(std::string("unexpanded placeholder ") + marker +
                        " in instruction for " + task);
      }
    }
    return out;
  }

 private:
  std::map<std::string, std::string> by_task_;
};

}  // namespace mabench
