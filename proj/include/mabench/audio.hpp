#pragma once

// Deterministic waveform operations: 16-bit PCM WAV I/O, level measurement,
// SNR-targeted mixing, word-segment concatenation, peak normalization and
// windowed-sinc resampling. Everything here is a pure function on value
// data; callers may parallelize per file without coordination.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "mabench/error.hpp"

namespace mabench {

constexpr int kPipelineSampleRate = 16000;

struct Waveform {
  std::vector<float> samples;
  int sample_rate = kPipelineSampleRate;

  double duration() const {
    return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0;
  }
  bool empty() const { return samples.empty(); }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 20.0); }

inline double linear_to_db(double x) { return 20.0 * std::log10(x); }

inline double peak(const Waveform& w) {
  double p = 0.0;
  for (float s : w.samples) p = std::max(p, double(std::fabs(s)));
  return p;
}

inline double rms(const Waveform& w) {
  if (w.empty()) throw DataError("rms of empty waveform");
  double acc = 0.0;
  for (float s : w.samples) acc += double(s) * double(s);
  return std::sqrt(acc / double(w.samples.size()));
}

// ---------------------------------------------------------------------------
// WAV encode/decode (16-bit PCM only)

namespace wav_detail {

inline std::uint32_t read_u32(const char* p) {
  return std::uint32_t(std::uint8_t(p[0])) | std::uint32_t(std::uint8_t(p[1])) << 8 |
         std::uint32_t(std::uint8_t(p[2])) << 16 | std::uint32_t(std::uint8_t(p[3])) << 24;
}

inline std::uint16_t read_u16(const char* p) {
  return std::uint16_t(std::uint8_t(p[0]) | std::uint8_t(p[1]) << 8);
}

inline void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
}

}  // namespace wav_detail

/// Decodes a 16-bit PCM WAV buffer. Stereo is downmixed to mono by channel
/// mean; samples are scaled by 1/32768 into [-1, 1].
inline Waveform wav_decode(std::string_view bytes) {
  using namespace wav_detail;
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    throw DataError("not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  int channels = 0;
  int rate = 0;
  bool have_fmt = false;
  const char* data = nullptr;
  std::size_t data_len = 0;
  bool have_data = false;
  while (pos + 8 <= bytes.size()) {
    std::string_view id = bytes.substr(pos, 4);
    std::uint32_t size = read_u32(bytes.data() + pos + 4);
    pos += 8;
    if (pos + size > bytes.size()) throw DataError("truncated WAV chunk");
    if (id == "fmt ") {
      if (size < 16) throw DataError("malformed fmt chunk");
      std::uint16_t format = read_u16(bytes.data() + pos);
      channels = read_u16(bytes.data() + pos + 2);
      rate = int(read_u32(bytes.data() + pos + 4));
      std::uint16_t bits = read_u16(bytes.data() + pos + 14);
      if (format != 1) throw DataError("unsupported WAV encoding (PCM required)");
      if (bits != 16) throw DataError("unsupported WAV bit depth (16-bit required)");
      if (channels < 1 || channels > 2) throw DataError("WAV must be mono or stereo");
      have_fmt = true;
    } else if (id == "data") {
      data = bytes.data() + pos;
      data_len = size;
      have_data = true;
    }
    pos += size + (size & 1);  // chunks are word-aligned
  }
  if (!have_fmt || !have_data) throw DataError("WAV missing fmt or data chunk");
  const std::size_t frame_bytes = std::size_t(channels) * 2;
  if (data_len % frame_bytes != 0) throw DataError("truncated WAV data chunk");
  const std::size_t frames = data_len / frame_bytes;
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      std::int16_t v;
      std::memcpy(&v, data + i * frame_bytes + std::size_t(c) * 2, 2);
      acc += double(v) / 32768.0;
    }
    w.samples[i] = float(acc / channels);
  }
  return w;
}

/// Encodes to mono 16-bit PCM. Samples must lie in [-1, 1].
inline std::string wav_encode(const Waveform& w) {
  using namespace wav_detail;
  for (float s : w.samples) {
    if (!(std::fabs(s) <= 1.0f)) {
      throw DataError("sample out of range [-1, 1]; normalize before writing");
    }
  }
  const std::uint32_t data_bytes = std::uint32_t(w.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, std::uint32_t(w.sample_rate));
  put_u32(out, std::uint32_t(w.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (float s : w.samples) {
    long q = std::lround(double(s) * 32768.0);
    q = std::clamp(q, -32768l, 32767l);
    put_u16(out, std::uint16_t(std::int16_t(q)));
  }
  return out;
}

inline Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open WAV file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  try {
    return wav_decode(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

inline void write_wav(const Waveform& w, const std::filesystem::path& path) {
  std::string bytes = wav_encode(w);
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write WAV file: " + path.string());
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw DataError("short write: " + path.string());
}

// ---------------------------------------------------------------------------
// Level operations

/// Scales so that max |sample| == 10^(target_dbfs/20). Input must be
/// non-silent; shape is preserved up to one positive scalar.
inline Waveform peak_normalize(const Waveform& w, double target_dbfs) {
  double pk = peak(w);
  if (pk <= 0.0) throw DataError("peak_normalize of silent waveform");
  double gain = db_to_linear(target_dbfs) / pk;
  Waveform out = w;
  for (float& s : out.samples) s = float(double(s) * gain);
  return out;
}

struct MixSpec {
  double snr_db = 0.0;               // signal = first input, noise = second
  double normalize_peak_dbfs = -1.0;  // output headroom target, must be <= 0
};

struct MixResult {
  Waveform audio;
  double noise_gain = 1.0;  // applied to the noise before summation
  double post_gain = 1.0;   // applied to the sum (1.0 when no clipping risk)
};

/// Gain for the noise so that 20*log10(rms(signal)/rms(g*noise)) == snr_db.
inline double snr_noise_gain(double signal_rms, double noise_rms, double snr_db) {
  return signal_rms / (noise_rms * db_to_linear(snr_db));
}

/// Mixes noise into signal at an exact RMS-based SNR. The shorter input is
/// zero-padded at the end; the sum is peak-normalized down to
/// normalize_peak_dbfs only when it would exceed that level.
inline MixResult mix_at_snr(const Waveform& signal, const Waveform& noise,
                            const MixSpec& spec = {}) {
  if (spec.normalize_peak_dbfs > 0.0) {
    throw DataError("normalize_peak_dbfs must be <= 0");
  }
  if (signal.sample_rate != noise.sample_rate) {
    throw DataError("sample-rate mismatch in mix_at_snr; resample first");
  }
  double rs = rms(signal);  // throws on empty
  double rn = rms(noise);
  if (rs <= 0.0 || rn <= 0.0) throw DataError("silent input to mix_at_snr");

  double g = snr_noise_gain(rs, rn, spec.snr_db);
  MixResult result;
  result.noise_gain = g;
  Waveform& out = result.audio;
  out.sample_rate = signal.sample_rate;
  out.samples.resize(std::max(signal.samples.size(), noise.samples.size()), 0.0f);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    double s = i < signal.samples.size() ? signal.samples[i] : 0.0;
    double n = i < noise.samples.size() ? noise.samples[i] : 0.0;
    out.samples[i] = float(s + g * n);
  }
  double pk = peak(out);
  double limit = db_to_linear(spec.normalize_peak_dbfs);
  if (pk > limit) {
    result.post_gain = limit / pk;
    for (float& s : out.samples) s = float(double(s) * result.post_gain);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Word-segment concatenation

/// Concatenates the sample spans listed in `keep` (indices into `spans`,
/// strictly increasing) with a linear crossfade of crossfade_ms between
/// adjacent segments. Spans are (start, end) in seconds.
inline Waveform concat_word_segments(
    const Waveform& source, const std::vector<std::pair<double, double>>& spans,
    const std::vector<std::size_t>& keep, double crossfade_ms = 0.0) {
  if (keep.empty()) throw DataError("empty word selection");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= spans.size()) throw DataError("word index out of range");
    if (i > 0 && keep[i] <= keep[i - 1]) {
      throw DataError("word indices must be strictly increasing");
    }
  }
  const int sr = source.sample_rate;
  const std::size_t cf = std::size_t(std::lround(crossfade_ms / 1000.0 * sr));

  Waveform out;
  out.sample_rate = sr;
  for (std::size_t ki = 0; ki < keep.size(); ++ki) {
    const auto& [sec_start, sec_end] = spans[keep[ki]];
    std::size_t a = std::min(source.samples.size(),
                             std::size_t(std::lround(sec_start * sr)));
    std::size_t b = std::min(source.samples.size(),
                             std::size_t(std::lround(sec_end * sr)));
    if (b <= a) throw DataError("degenerate word span");
    const float* seg = source.samples.data() + a;
    std::size_t seg_len = b - a;
    if (ki == 0) {
      out.samples.insert(out.samples.end(), seg, seg + seg_len);
      continue;
    }
    std::size_t n = std::min({cf, out.samples.size(), seg_len});
    std::size_t base = out.samples.size() - n;
    for (std::size_t i = 0; i < n; ++i) {
      double t = double(i + 1) / double(n + 1);
      out.samples[base + i] =
          float(double(out.samples[base + i]) * (1.0 - t) + double(seg[i]) * t);
    }
    out.samples.insert(out.samples.end(), seg + n, seg + seg_len);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resampling

/// Windowed-sinc resampler (Hann window, 16 taps per side). Output length is
/// round(len * target/source).
inline Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) throw DataError("target sample rate must be positive");
  if (w.sample_rate == target_rate || w.empty()) {
    Waveform out = w;
    out.sample_rate = target_rate;
    return out;
  }
  const double ratio = double(target_rate) / double(w.sample_rate);
  const std::size_t out_len = std::size_t(std::llround(double(w.samples.size()) * ratio));
  const double cutoff = std::min(1.0, ratio);  // fraction of source Nyquist
  constexpr int kHalfTaps = 16;
  const double width = kHalfTaps / cutoff;

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len);
  const auto sinc = [](double x) {
    if (x == 0.0) return 1.0;
    double px = M_PI * x;
    return std::sin(px) / px;
  };
  for (std::size_t n = 0; n < out_len; ++n) {
    const double center = double(n) / ratio;
    const long lo = long(std::ceil(center - width));
    const long hi = long(std::floor(center + width));
    double acc = 0.0, wsum = 0.0;
    for (long k = lo; k <= hi; ++k) {
      double x = (double(k) - center) * cutoff;
      double win = 0.5 * (1.0 + std::cos(M_PI * (double(k) - center) / width));
      double coef = sinc(x) * win;
      wsum += coef;
      if (k >= 0 && k < long(w.samples.size())) acc += coef * w.samples[k];
    }
    out.samples[n] = wsum != 0.0 ? float(acc / wsum) : 0.0f;
  }
  return out;
}

}  // namespace mabench
