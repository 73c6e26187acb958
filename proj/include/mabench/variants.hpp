#pragma once

// Constrained sentence variants for speech-pair synthesis: one editor call
// per edit mode, each checked against that mode's word-level constraint.
// The constraints read the edit prompts strictly: "less than 3" added or
// deleted words means at most 2, "less than 5" edit distance means at most
// 4, and the structure change allows a word-multiset difference of at most
// 4 with a required order change.

#include <string>
#include <vector>

#include "mabench/model_client.hpp"
#include "mabench/prompts.hpp"
#include "mabench/text.hpp"

namespace mabench {

struct SentenceVariant {
  std::string original;
  std::string variant;
  EditMode mode = EditMode::add_word;
  bool valid = false;
  std::string rejection_reason;  // empty when valid
};

struct VariantCheck {
  bool valid = false;
  std::string reason;
};

inline VariantCheck validate_variant(const std::string& original,
                                     const std::string& variant, EditMode mode) {
  const std::vector<std::string> a = tokenize(original);
  const std::vector<std::string> b = tokenize(variant);
  if (a.empty() || b.empty()) return {false, "empty_sentence"};
  if (a == b) return {false, "identical"};

  switch (mode) {
    case EditMode::add_word: {
      if (b.size() <= a.size() || !is_subsequence(a, b)) {
        return {false, "not_pure_addition"};
      }
      std::size_t added = b.size() - a.size();
      if (added > 2) return {false, "too_many_added_words"};
      return {true, {}};
    }
    case EditMode::delete_word: {
      if (b.size() >= a.size() || !is_subsequence(b, a)) {
        return {false, "not_pure_deletion"};
      }
      std::size_t deleted = a.size() - b.size();
      if (deleted > 2) return {false, "too_many_deleted_words"};
      return {true, {}};
    }
    case EditMode::modify_word: {
      std::size_t dist = token_levenshtein(a, b);
      if (dist < 1 || dist > 4) return {false, "edit_distance_out_of_range"};
      return {true, {}};
    }
    case EditMode::change_structure: {
      if (multiset_difference_size(a, b) > 4) {
        return {false, "word_difference_too_large"};
      }
      // a != b already holds, so the order (or a small word set) changed
      return {true, {}};
    }
  }
  return {false, "bad_mode"};
}

/// One editor call per edit mode; a literal "None" reply marks the variant
/// invalid with reason editor_declined, everything else goes through
/// validate_variant.
inline std::vector<SentenceVariant> propose_sentence_variants(
    const std::string& sentence, ChatClient& editor, const EditorOptions& opts) {
  if (sentence.empty()) throw DataError("empty sentence");
  std::vector<SentenceVariant> out;
  for (EditMode mode : kAllEditModes) {
    ChatRequest req = ChatRequest::user(render_edit_prompt(mode, sentence),
                                        opts.model, opts.temperature, 1,
                                        opts.max_tokens);
    std::string reply = trim_trailing_whitespace(editor.complete(req).at(0));
    SentenceVariant v;
    v.original = sentence;
    v.variant = reply;
    v.mode = mode;
    if (reply == "None") {
      v.valid = false;
      v.rejection_reason = "editor_declined";
    } else {
      VariantCheck check = validate_variant(sentence, reply, mode);
      v.valid = check.valid;
      v.rejection_reason = check.reason;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace mabench
