#pragma once

// Client interfaces for the three external model services: text-LLM chat
// completion (editor and judge), TTS, and the audio-LLM under test. The
// HTTP implementations live in http_clients.hpp; tests substitute in-process
// fakes. Implementations must be safe for concurrent calls.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mabench/audio.hpp"
#include "mabench/canonical_json.hpp"
#include "mabench/error.hpp"
#include "mabench/sha256.hpp"

namespace mabench {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::string endpoint;  // base URL; implementations may fill a default
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int n_samples = 1;
  int max_tokens = 512;

  static ChatRequest user(std::string prompt, std::string model_id = {},
                          double temp = 0.0, int n = 1, int max_tok = 512) {
    ChatRequest r;
    r.model = std::move(model_id);
    r.messages.push_back({"user", std::move(prompt)});
    r.temperature = temp;
    r.n_samples = n;
    r.max_tokens = max_tok;
    return r;
  }
};

/// Stable cache key: hash of the canonicalized request, so two semantically
/// identical requests always map to the same entry.
inline std::string chat_request_hash(const ChatRequest& r) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : r.messages) {
    messages.push_back({{"content", m.content}, {"role", m.role}});
  }
  nlohmann::json j{{"endpoint", r.endpoint},
                   {"max_tokens", r.max_tokens},
                   {"messages", std::move(messages)},
                   {"model", r.model},
                   {"n_samples", r.n_samples},
                   {"temperature", r.temperature}};
  return sha256_hex(canonical_dump(j));
}

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns exactly n_samples completions or throws ServiceError.
  virtual std::vector<std::string> complete(const ChatRequest& request) = 0;
};

/// Sampling parameters for editor calls issued by the generators.
struct EditorOptions {
  std::string model;
  double temperature = 0.7;
  int max_tokens = 256;
};

class TtsClient {
 public:
  virtual ~TtsClient() = default;
  /// Synthesizes `text` with the given voice; result is resampled to the
  /// pipeline rate and non-empty. Empty text is a DataError.
  virtual Waveform synthesize(const std::string& text, const std::string& voice) = 0;
};

struct AudioQuery {
  std::string endpoint;
  std::string instruction;
  std::vector<std::filesystem::path> audios;  // 1 or 2, transmitted in order

  void validate() const {
    if (audios.empty() || audios.size() > 2) {
      throw DataError("AudioQuery requires 1 or 2 audio files");
    }
    for (const auto& p : audios) {
      if (!std::filesystem::exists(p)) {
        throw DataError("audio file not found: " + p.string());
      }
    }
  }
};

class AllmClient {
 public:
  virtual ~AllmClient() = default;
  /// Raw model text (only trailing whitespace trimmed), or nullopt when the
  /// service failed after retries (sample counts as unanswered downstream).
  virtual std::optional<std::string> respond(const AudioQuery& query) = 0;
};

inline std::string trim_trailing_whitespace(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' ||
                        s.back() == '\r')) {
    s.pop_back();
  }
  return s;
}

}  // namespace mabench
