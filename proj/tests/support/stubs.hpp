#pragma once

// Test doubles: in-process fakes of the client interfaces, plus httplib stub
// servers for exercising the real HTTP paths. The scripted editor rules are
// shared between unit tests and the end-to-end determinism runs, so they are
// pure functions of the prompt text.

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mabench/audio.hpp"
#include "mabench/model_client.hpp"
#include "mabench/text.hpp"
#include "support/fixtures.hpp"

namespace stubs {

using namespace mabench;

// ---------------------------------------------------------------------------
// Scripted editor: deterministic sentence edits keyed off the prompt text.

inline std::string extract_sentence(const std::string& prompt) {
  // prompts lay the subject sentence out as its own paragraph after the
  // opening line
  std::size_t start = prompt.find("\n\n");
  if (start == std::string::npos) return {};
  start += 2;
  std::size_t end = prompt.find("\n\n", start);
  if (end == std::string::npos) end = prompt.size();
  return prompt.substr(start, end - start);
}

inline std::string extract_marked_line(const std::string& prompt,
                                       const std::string& marker) {
  std::size_t pos = prompt.find(marker);
  if (pos == std::string::npos) return {};
  pos += marker.size();
  std::size_t end = prompt.find('\n', pos);
  if (end == std::string::npos) end = prompt.size();
  return prompt.substr(pos, end - pos);
}

inline std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

/// The canned text-LLM: answers edit prompts with rule-based edits,
/// reconstruction prompts with a one-word deletion, diff prompts with the
/// actual differing tokens, and judge prompts with "Yes".
inline std::string scripted_editor_reply(const std::string& prompt) {
  if (prompt.find("by adding several words") != std::string::npos) {
    std::string sentence = extract_sentence(prompt);
    return sentence.empty() ? "None" : sentence + " right now";
  }
  if (prompt.find("by deleting several words") != std::string::npos) {
    auto words = tokenize(extract_sentence(prompt));
    if (words.size() < 2) return "None";
    words.pop_back();
    return join(words);
  }
  if (prompt.find("The edit distance between") != std::string::npos) {
    auto words = tokenize(extract_sentence(prompt));
    if (words.empty()) return "None";
    words[0] = words[0] == "someone" ? "people" : "someone";
    return join(words);
  }
  if (prompt.find("altering the structure") != std::string::npos) {
    auto words = tokenize(extract_sentence(prompt));
    if (words.size() < 2) return "None";
    std::swap(words[0], words[1]);
    return join(words);
  }
  if (prompt.find("Create a shorter sentence") != std::string::npos) {
    auto words = tokenize(extract_sentence(prompt));
    if (words.size() < 2) return "None";
    words.erase(words.begin() + 1);
    return join(words);
  }
  if (prompt.find("Describe the content difference") != std::string::npos) {
    auto t1 = tokenize(extract_marked_line(prompt, "Transcription 1: "));
    auto t2 = tokenize(extract_marked_line(prompt, "Transcription 2: "));
    auto diff = differing_tokens(t1, t2);
    return "The difference involves the words " + join(diff) + ".";
  }
  // judge prompts and anything unrecognized
  return "Yes";
}

// ---------------------------------------------------------------------------
// In-process fakes

class ScriptedChat : public ChatClient {
 public:
  ScriptedChat() : fn_(scripted_editor_reply) {}
  explicit ScriptedChat(std::function<std::string(const std::string&)> fn)
      : fn_(std::move(fn)) {}

  std::vector<std::string> complete(const ChatRequest& request) override {
    ++calls_;
    std::vector<std::string> out;
    for (int i = 0; i < request.n_samples; ++i) {
      out.push_back(fn_(request.messages.back().content));
    }
    return out;
  }

  int calls() const { return calls_; }

 private:
  std::function<std::string(const std::string&)> fn_;
  int calls_ = 0;
};

/// Chat fake that replays a fixed queue of replies (one per call).
class QueuedChat : public ChatClient {
 public:
  explicit QueuedChat(std::vector<std::string> replies)
      : replies_(std::move(replies)) {}

  std::vector<std::string> complete(const ChatRequest& request) override {
    std::vector<std::string> out;
    for (int i = 0; i < request.n_samples; ++i) {
      if (next_ < replies_.size()) {
        out.push_back(replies_[next_++]);
      } else {
        out.push_back(replies_.empty() ? "" : replies_.back());
      }
    }
    return out;
  }

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

/// Chat fake returning a fixed triple per call (vote testing).
class FixedVotesChat : public ChatClient {
 public:
  explicit FixedVotesChat(std::vector<std::string> votes) : votes_(std::move(votes)) {}
  std::vector<std::string> complete(const ChatRequest& request) override {
    last_prompt_ = request.messages.back().content;
    return votes_;
  }
  const std::string& last_prompt() const { return last_prompt_; }

 private:
  std::vector<std::string> votes_;
  std::string last_prompt_;
};

class ToneTts : public TtsClient {
 public:
  Waveform synthesize(const std::string& text, const std::string&) override {
    if (text.empty()) throw DataError("empty text for TTS");
    if (return_empty) return Waveform{};
    return fixtures::make_sine(fixtures::tone_for_token(text), 0.3);
  }
  bool return_empty = false;
};

// ---------------------------------------------------------------------------
// HTTP stub servers

class StubServer {
 public:
  StubServer() : server_(std::make_unique<httplib::Server>()) {}

  ~StubServer() { stop(); }

  httplib::Server& server() { return *server_; }

  void start() {
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }

  void stop() {
    if (thread_.joinable()) {
      server_->stop();
      thread_.join();
    }
  }

  int port() const { return port_; }
  std::string base_url() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

/// Chat-completions stub: replies via `fn`, honoring the requested n.
class ChatStub : public StubServer {
 public:
  explicit ChatStub(
      std::function<std::string(const std::string&)> fn = scripted_editor_reply) {
    server().Post("/v1/chat/completions",
                  [this, fn](const httplib::Request& req, httplib::Response& res) {
                    ++requests_;
                    nlohmann::json body = nlohmann::json::parse(req.body);
                    int n = body.value("n", 1);
                    std::string prompt =
                        body["messages"].back()["content"].get<std::string>();
                    nlohmann::json choices = nlohmann::json::array();
                    for (int i = 0; i < n; ++i) {
                      choices.push_back(
                          {{"message", {{"role", "assistant"},
                                        {"content", fn(prompt)}}}});
                    }
                    res.set_content(nlohmann::json{{"choices", choices}}.dump(),
                                    "application/json");
                  });
    start();
  }

  int requests() const { return requests_; }

 private:
  std::atomic<int> requests_{0};
};

/// TTS stub: deterministic tone per text; configurable output rate.
class TtsStub : public StubServer {
 public:
  explicit TtsStub(int rate = kPipelineSampleRate) {
    server().Post("/synthesize",
                  [rate](const httplib::Request& req, httplib::Response& res) {
                    nlohmann::json body = nlohmann::json::parse(req.body);
                    std::string text = body.at("text").get<std::string>();
                    Waveform w = fixtures::make_sine(
                        fixtures::tone_for_token(text), 0.3, 0.3, rate);
                    res.set_content(wav_encode(w), "audio/wav");
                  });
    start();
  }
};

/// ALLM stub answering a constant string; keeps the parts of the last
/// request so tests can check the instruction and audio payloads.
class AllmStub : public StubServer {
 public:
  explicit AllmStub(std::string reply = "Yes") : reply_(std::move(reply)) {
    server().Post("/respond", [this](const httplib::Request& req,
                                     httplib::Response& res) {
      ++requests_;
      last_parts_.clear();
      for (const auto& [name, data] : req.files) {
        last_parts_[name] = data.content;
      }
      res.set_content(reply_, "text/plain");
    });
    start();
  }

  int requests() const { return requests_; }
  std::map<std::string, std::string> last_parts() const { return last_parts_; }

 private:
  std::string reply_;
  std::atomic<int> requests_{0};
  std::map<std::string, std::string> last_parts_;
};

}  // namespace stubs
