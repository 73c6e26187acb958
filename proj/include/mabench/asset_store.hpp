#pragma once

// Content-addressed audio store. Every WAV a generator emits (or copies from
// a source corpus) lands under <root>/audio/<hash16>.wav where hash16 is the
// first 16 hex chars of the content SHA-256. Identical content dedupes to a
// single file, and asset ids are derived from the same digest, so shards are
// reproducible byte-for-byte.

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "mabench/audio.hpp"
#include "mabench/error.hpp"
#include "mabench/manifest.hpp"
#include "mabench/sha256.hpp"

namespace mabench {

class AssetStore {
 public:
  explicit AssetStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "audio");
  }

  const std::filesystem::path& root() const { return root_; }

  /// Stores a waveform, returning its asset record.
  AudioAsset add_waveform(const Waveform& w) {
    return add_bytes(wav_encode(w), w);
  }

  /// Copies an existing WAV file into the store (decodes once to fill the
  /// asset metadata and to enforce the PCM16 contract).
  AudioAsset add_file(const std::filesystem::path& src) {
    std::ifstream in(src, std::ios::binary);
    if (!in) throw DataError("cannot open audio file: " + src.string());
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    Waveform w = wav_decode(bytes);
    return add_bytes(bytes, w);
  }

 private:
  AudioAsset add_bytes(const std::string& bytes, const Waveform& decoded) {
    std::string digest = sha256_hex(bytes);
    std::string short_id = digest.substr(0, 16);
    std::string rel = "audio/" + short_id + ".wav";
    std::filesystem::path full = root_ / rel;
    if (!std::filesystem::exists(full)) {
      std::ofstream out(full, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError("cannot write audio file: " + full.string());
      out.write(bytes.data(), std::streamsize(bytes.size()));
      if (!out) throw DataError("short write: " + full.string());
    }
    AudioAsset a;
    a.id = short_id;
    a.path = rel;
    a.sample_rate = decoded.sample_rate;
    a.channels = 1;  // store is mono by construction
    a.duration = decoded.duration();
    a.sha256 = digest;
    return a;
  }

  std::filesystem::path root_;
};

}  // namespace mabench
