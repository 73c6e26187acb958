#pragma once

// HTTP implementations of the model-service clients.
//
// Wire formats (vendor-neutral, adapters per endpoint):
//   text LLM:  POST {base}/v1/chat/completions with the JSON chat-completion
//              shape {model, messages, temperature, n, max_tokens};
//              responses carry choices[i].message.content.
//   TTS:       POST {base}/synthesize with {"text","voice"}; the response
//              body is a 16-bit PCM WAV, resampled here to the pipeline rate.
//   ALLM:      POST {base}/respond as multipart form data: an "instruction"
//              field plus audio1[/audio2] WAV parts, in query order.
//
// Transient failures (connect errors, 429, 5xx) retry with exponential
// backoff. Chat responses are cached on disk, keyed by the canonical request
// hash, when caching is enabled and temperature == 0. A per-endpoint
// semaphore bounds in-flight requests.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mabench/audio.hpp"
#include "mabench/canonical_json.hpp"
#include "mabench/error.hpp"
#include "mabench/model_client.hpp"

namespace mabench {

struct EndpointConfig {
  std::string base_url;
  std::string model;
  std::string voice;        // TTS only
  std::string api_key_env;  // env var holding the bearer token, if any
  double temperature = 0.0;
  int n_samples = 1;
  int max_tokens = 512;
  int max_attempts = 3;
  int backoff_ms = 250;
  int max_in_flight = 4;
  bool cache_enabled = false;
  std::filesystem::path cache_dir;
  int timeout_s = 120;
};

struct ClientStats {
  std::atomic<long> requests{0};
  std::atomic<long> retries{0};
  std::atomic<long> cache_hits{0};
};

namespace http_detail {

class Semaphore {
 public:
  explicit Semaphore(int count) : count_(count) {}
  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return count_ > 0; });
    --count_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      ++count_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int count_;
};

struct SemaphoreGuard {
  Semaphore& sem;
  explicit SemaphoreGuard(Semaphore& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
};

inline bool retryable_status(int status) {
  return status == 429 || status >= 500;
}

inline void apply_auth(httplib::Client& cli, const std::string& api_key_env) {
  if (api_key_env.empty()) return;
  if (const char* key = std::getenv(api_key_env.c_str())) {
    cli.set_bearer_token_auth(key);
  }
}

/// Runs `send` with retry/backoff; returns the final response.
/// Throws ServiceError when every attempt failed.
inline httplib::Result send_with_retries(
    const EndpointConfig& cfg, ClientStats& stats,
    const std::function<httplib::Result()>& send) {
  int backoff = cfg.backoff_ms;
  for (int attempt = 1;; ++attempt) {
    stats.requests.fetch_add(1);
    httplib::Result res = send();
    if (res && !retryable_status(res->status)) return res;
    if (attempt >= cfg.max_attempts) {
      std::string detail = res ? "HTTP " + std::to_string(res->status)
                               : "transport error";
      throw ServiceError("request to " + cfg.base_url + " failed after " +
                         std::to_string(attempt) + " attempts (" + detail + ")");
    }
    stats.retries.fetch_add(1);
    if (backoff > 0) std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
    backoff *= 2;
  }
}

}  // namespace http_detail

/// True when the endpoint answers HTTP at all (any status counts).
inline bool endpoint_reachable(const std::string& base_url, int timeout_s = 5) {
  httplib::Client cli(base_url);
  cli.set_connection_timeout(timeout_s);
  cli.set_read_timeout(timeout_s);
  auto res = cli.Get("/");
  return bool(res);
}

// ---------------------------------------------------------------------------
// Chat (editor / judge)

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(EndpointConfig cfg)
      : cfg_(std::move(cfg)), semaphore_(cfg_.max_in_flight) {
    if (cfg_.cache_enabled && !cfg_.cache_dir.empty()) {
      std::filesystem::create_directories(cfg_.cache_dir);
    }
  }

  std::vector<std::string> complete(const ChatRequest& request) override {
    ChatRequest req = request;
    if (req.endpoint.empty()) req.endpoint = cfg_.base_url;
    if (req.model.empty()) req.model = cfg_.model;
    if (req.messages.empty()) throw DataError("chat request has no messages");

    const bool cacheable = cfg_.cache_enabled && req.temperature == 0.0;
    const std::string key = chat_request_hash(req);
    if (cacheable) {
      if (auto hit = cache_read(key)) {
        stats_.cache_hits.fetch_add(1);
        return *hit;
      }
    }

    std::vector<std::string> texts;
    while (int(texts.size()) < req.n_samples) {
      int want = req.n_samples - int(texts.size());
      auto batch = fetch(req, want);
      if (batch.empty()) throw ServiceError("chat endpoint returned no choices");
      for (auto& t : batch) {
        texts.push_back(std::move(t));
        if (int(texts.size()) == req.n_samples) break;
      }
    }
    if (cacheable) cache_write(key, req, texts);
    return texts;
  }

  const ClientStats& stats() const { return stats_; }

 private:
  std::vector<std::string> fetch(const ChatRequest& req, int n) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : req.messages) {
      messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    nlohmann::json body{{"model", req.model},
                        {"messages", std::move(messages)},
                        {"temperature", req.temperature},
                        {"n", n},
                        {"max_tokens", req.max_tokens}};

    http_detail::SemaphoreGuard guard(semaphore_);
    httplib::Client cli(req.endpoint);
    cli.set_connection_timeout(cfg_.timeout_s);
    cli.set_read_timeout(cfg_.timeout_s);
    http_detail::apply_auth(cli, cfg_.api_key_env);
    auto res = http_detail::send_with_retries(cfg_, stats_, [&] {
      return cli.Post("/v1/chat/completions", body.dump(), "application/json");
    });
    if (res->status != 200) {
      throw ServiceError("chat endpoint returned HTTP " +
                         std::to_string(res->status));
    }
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(std::string("malformed chat reply: ") + e.what());
    }
    std::vector<std::string> texts;
    if (!reply.contains("choices") || !reply["choices"].is_array()) {
      throw ServiceError("malformed chat reply: missing choices");
    }
    for (const auto& choice : reply["choices"]) {
      try {
        texts.push_back(choice.at("message").at("content").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw ServiceError(std::string("malformed chat choice: ") + e.what());
      }
    }
    return texts;
  }

  std::optional<std::vector<std::string>> cache_read(const std::string& key) {
    if (cfg_.cache_dir.empty()) return std::nullopt;
    std::filesystem::path path = cfg_.cache_dir / (key + ".json");
    std::lock_guard lock(cache_mu_);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
      nlohmann::json j = nlohmann::json::parse(in);
      return j.at("responses").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;  // treat a corrupt entry as a miss
    }
  }

  void cache_write(const std::string& key, const ChatRequest& req,
                   const std::vector<std::string>& texts) {
    if (cfg_.cache_dir.empty()) return;
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : req.messages) {
      messages.push_back({{"content", m.content}, {"role", m.role}});
    }
    nlohmann::json j{{"request",
                      {{"endpoint", req.endpoint},
                       {"max_tokens", req.max_tokens},
                       {"messages", std::move(messages)},
                       {"model", req.model},
                       {"n_samples", req.n_samples},
                       {"temperature", req.temperature}}},
                     {"responses", texts}};
    std::lock_guard lock(cache_mu_);
    std::ofstream out(cfg_.cache_dir / (key + ".json"),
                      std::ios::binary | std::ios::trunc);
    out << canonical_dump(j) << '\n';
  }

  EndpointConfig cfg_;
  ClientStats stats_;
  http_detail::Semaphore semaphore_;
  std::mutex cache_mu_;
};

// ---------------------------------------------------------------------------
// TTS

class HttpTtsClient : public TtsClient {
 public:
  explicit HttpTtsClient(EndpointConfig cfg)
      : cfg_(std::move(cfg)), semaphore_(cfg_.max_in_flight) {}

  Waveform synthesize(const std::string& text, const std::string& voice) override {
    if (text.empty()) throw DataError("empty text for TTS");
    nlohmann::json body{{"text", text},
                        {"voice", voice.empty() ? cfg_.voice : voice}};

    http_detail::SemaphoreGuard guard(semaphore_);
    httplib::Client cli(cfg_.base_url);
    cli.set_connection_timeout(cfg_.timeout_s);
    cli.set_read_timeout(cfg_.timeout_s);
    http_detail::apply_auth(cli, cfg_.api_key_env);
    auto res = http_detail::send_with_retries(cfg_, stats_, [&] {
      return cli.Post("/synthesize", body.dump(), "application/json");
    });
    if (res->status != 200) {
      throw ServiceError("TTS endpoint returned HTTP " + std::to_string(res->status));
    }
    Waveform w;
    try {
      w = wav_decode(res->body);
    } catch (const DataError& e) {
      throw ServiceError(std::string("TTS reply is not valid WAV: ") + e.what());
    }
    if (w.empty()) throw ServiceError("TTS returned empty audio");
    return resample(w, kPipelineSampleRate);
  }

  const ClientStats& stats() const { return stats_; }

 private:
  EndpointConfig cfg_;
  ClientStats stats_;
  http_detail::Semaphore semaphore_;
};

// ---------------------------------------------------------------------------
// ALLM under test

class HttpAllmClient : public AllmClient {
 public:
  explicit HttpAllmClient(EndpointConfig cfg)
      : cfg_(std::move(cfg)), semaphore_(cfg_.max_in_flight) {}

  /// Receives every request/response pair (JSON) for the audit log.
  void set_audit_sink(std::function<void(const nlohmann::json&)> sink) {
    audit_sink_ = std::move(sink);
  }

  std::optional<std::string> respond(const AudioQuery& query) override {
    AudioQuery q = query;
    if (q.endpoint.empty()) q.endpoint = cfg_.base_url;
    q.validate();

    httplib::MultipartFormDataItems items;
    items.push_back({"instruction", q.instruction, "", "text/plain"});
    nlohmann::json audit_audios = nlohmann::json::array();
    for (std::size_t i = 0; i < q.audios.size(); ++i) {
      std::ifstream in(q.audios[i], std::ios::binary);
      std::string bytes((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
      std::string name = "audio" + std::to_string(i + 1);
      items.push_back({name, bytes, q.audios[i].filename().string(), "audio/wav"});
      audit_audios.push_back({{"name", name}, {"sha256", sha256_hex(bytes)}});
    }

    std::optional<std::string> answer;
    try {
      http_detail::SemaphoreGuard guard(semaphore_);
      httplib::Client cli(q.endpoint);
      cli.set_connection_timeout(cfg_.timeout_s);
      cli.set_read_timeout(cfg_.timeout_s);
      http_detail::apply_auth(cli, cfg_.api_key_env);
      auto res = http_detail::send_with_retries(cfg_, stats_, [&] {
        return cli.Post("/respond", items);
      });
      if (res->status == 200) {
        answer = trim_trailing_whitespace(res->body);
      }
    } catch (const ServiceError&) {
      answer = std::nullopt;  // unanswered; downstream default-answer applies
    }

    if (audit_sink_) {
      nlohmann::json entry{{"audios", audit_audios},
                           {"endpoint", q.endpoint},
                           {"instruction", q.instruction},
                           {"response", answer ? nlohmann::json(*answer)
                                               : nlohmann::json()}};
      audit_sink_(entry);
    }
    return answer;
  }

  const ClientStats& stats() const { return stats_; }

 private:
  EndpointConfig cfg_;
  ClientStats stats_;
  http_detail::Semaphore semaphore_;
  std::function<void(const nlohmann::json&)> audit_sink_;
};

}  // namespace mabench
