#include "mabench/audio.hpp"

#include <cstdint>
#include <gtest/gtest.h>

#include "mabench/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace mabench;

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
}

// hand-rolled encoder, independent of the library writer
std::string make_wav_bytes(const std::vector<std::int16_t>& samples, int channels,
                           int rate) {
  std::string out = "RIFF";
  put_u32(out, 36 + std::uint32_t(samples.size() * 2));
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, std::uint16_t(channels));
  put_u32(out, std::uint32_t(rate));
  put_u32(out, std::uint32_t(rate * channels * 2));
  put_u16(out, std::uint16_t(channels * 2));
  put_u16(out, 16);
  out += "data";
  put_u32(out, std::uint32_t(samples.size() * 2));
  for (std::int16_t s : samples) put_u16(out, std::uint16_t(s));
  return out;
}

}  // namespace

TEST(WavDecode, SilenceGivesZeroSamples) {
  std::vector<std::int16_t> pcm(16000, 0);
  Waveform w = wav_decode(make_wav_bytes(pcm, 1, 16000));
  ASSERT_EQ(w.samples.size(), 16000u);
  EXPECT_EQ(w.sample_rate, 16000);
  for (float s : w.samples) EXPECT_EQ(s, 0.0f);
}

TEST(WavDecode, FullScaleSquareWaveScaling) {
  // integer scaling rule: sample = int16 / 32768
  std::vector<std::int16_t> pcm = {32767, -32768, 32767, -32768};
  Waveform w = wav_decode(make_wav_bytes(pcm, 1, 16000));
  ASSERT_EQ(w.samples.size(), 4u);
  EXPECT_FLOAT_EQ(w.samples[0], 32767.0f / 32768.0f);
  EXPECT_FLOAT_EQ(w.samples[1], -1.0f);
}

TEST(WavDecode, StereoOppositeChannelsCancel) {
  std::vector<std::int16_t> pcm;
  for (int i = 0; i < 100; ++i) {
    std::int16_t v = std::int16_t(1000 + 13 * i);
    pcm.push_back(v);
    pcm.push_back(std::int16_t(-v));
  }
  Waveform w = wav_decode(make_wav_bytes(pcm, 2, 16000));
  ASSERT_EQ(w.samples.size(), 100u);
  for (float s : w.samples) EXPECT_NEAR(s, 0.0f, 1e-9f);
}

TEST(WavDecode, RejectsNonPcmAndTruncated) {
  std::string bytes = make_wav_bytes({1, 2, 3}, 1, 16000);
  bytes[20] = 3;  // format code -> IEEE float
  EXPECT_THROW(wav_decode(bytes), DataError);

  std::string truncated = make_wav_bytes({1, 2, 3, 4}, 1, 16000);
  truncated.resize(truncated.size() - 3);
  EXPECT_THROW(wav_decode(truncated), DataError);

  EXPECT_THROW(wav_decode("not a wav"), DataError);
}

TEST(WavRoundTrip, QuantizationBound) {
  fixtures::TempDir dir("wav_rt");
  Rng rng(12);
  Waveform w;
  w.sample_rate = 16000;
  for (int i = 0; i < 5000; ++i) {
    w.samples.push_back(float(rng.uniform() * 2.0 - 1.0));
  }
  write_wav(w, dir.path() / "rt.wav");
  Waveform r = read_wav(dir.path() / "rt.wav");
  ASSERT_EQ(r.samples.size(), w.samples.size());
  double max_err = 0.0;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    max_err = std::max(max_err, std::fabs(double(r.samples[i]) - w.samples[i]));
  }
  EXPECT_LE(max_err, 1.0 / 32768.0);
}

TEST(WavEncode, OutOfRangeSampleRejected) {
  Waveform w;
  w.samples = {0.2f, 1.5f};
  EXPECT_THROW(wav_encode(w), DataError);
}

TEST(WavEncode, EmptyWaveformRoundTrips) {
  fixtures::TempDir dir("wav_empty");
  Waveform w;
  w.sample_rate = 16000;
  write_wav(w, dir.path() / "empty.wav");
  Waveform r = read_wav(dir.path() / "empty.wav");
  EXPECT_TRUE(r.samples.empty());
  EXPECT_EQ(r.sample_rate, 16000);
}

TEST(Rms, ConstantAndZeroAndEmpty) {
  Waveform w;
  w.samples.assign(1000, 0.5f);
  EXPECT_DOUBLE_EQ(rms(w), 0.5);
  w.samples.assign(1000, 0.0f);
  EXPECT_DOUBLE_EQ(rms(w), 0.0);
  w.samples.clear();
  EXPECT_THROW(rms(w), DataError);
}

TEST(Rms, UnitSineWholePeriodsMatchesClosedFormAndOracle) {
  Waveform w = fixtures::make_sine(100.0, 0.5, 1.0);  // 50 whole periods
  double direct = oracles::rms_direct(w.samples);
  EXPECT_NEAR(rms(w), direct, 1e-12);
  EXPECT_NEAR(rms(w), 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(PeakNormalize, Examples) {
  Waveform w = fixtures::make_sine(200.0, 0.25, 0.5);
  Waveform n = peak_normalize(w, -6.02);
  EXPECT_NEAR(peak(n), std::pow(10.0, -6.02 / 20.0), 1e-6);

  Waveform full = peak_normalize(w, 0.0);
  EXPECT_NEAR(peak(full), 1.0, 1e-6);

  // scaling invariance
  Waveform doubled = w;
  for (float& s : doubled.samples) s *= 0.5f;  // any positive scalar
  Waveform a = peak_normalize(w, -3.0);
  Waveform b = peak_normalize(doubled, -3.0);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_NEAR(a.samples[i], b.samples[i], 1e-6);
  }

  Waveform silent;
  silent.samples.assign(100, 0.0f);
  EXPECT_THROW(peak_normalize(silent, -1.0), DataError);
}

TEST(MixAtSnr, GainFormulaExamples) {
  // rms(signal)=0.2, rms(noise)=0.1, snr 0 dB -> gain 2.0
  Waveform signal, noise;
  signal.samples.assign(1000, 0.2f);
  noise.samples.assign(1000, 0.1f);
  MixResult r = mix_at_snr(signal, noise, {0.0, -1.0});
  EXPECT_NEAR(r.noise_gain, 2.0, 1e-9);
  // oracle: scale the noise by the returned gain and measure component RMS
  std::vector<float> scaled = noise.samples;
  for (float& s : scaled) s *= float(r.noise_gain);
  EXPECT_NEAR(oracles::rms_direct(scaled), oracles::rms_direct(signal.samples),
              1e-7);

  // identical waveforms, snr 0 -> gain 1
  MixResult same = mix_at_snr(signal, signal, {0.0, -1.0});
  EXPECT_NEAR(same.noise_gain, 1.0, 1e-12);

  // +20 dB with equal input RMS -> gain 10^(-20/20) = 0.1
  MixResult quiet = mix_at_snr(signal, signal, {20.0, -1.0});
  EXPECT_NEAR(quiet.noise_gain, 0.1, 1e-9);
}

TEST(MixAtSnr, ErrorsAndPadding) {
  Waveform a = fixtures::make_sine(100, 0.2, 0.3);
  Waveform silent;
  silent.sample_rate = a.sample_rate;
  silent.samples.assign(100, 0.0f);
  EXPECT_THROW(mix_at_snr(a, silent, {}), DataError);
  EXPECT_THROW(mix_at_snr(silent, a, {}), DataError);

  Waveform other_rate = a;
  other_rate.sample_rate = 8000;
  EXPECT_THROW(mix_at_snr(a, other_rate, {}), DataError);

  Waveform shorter = fixtures::make_sine(150, 0.1, 0.3);
  MixResult r = mix_at_snr(a, shorter, {});
  EXPECT_EQ(r.audio.samples.size(), a.samples.size());  // zero-padded tail
}

TEST(MixAtSnr, SnrAccuracyProperty) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    Waveform s = fixtures::make_sine(100 + double(rng.bounded(500)),
                                     0.1 + 0.05 * double(rng.bounded(4)),
                                     0.1 + 0.2 * rng.uniform());
    Waveform n = fixtures::make_sine(100 + double(rng.bounded(500)),
                                     0.1 + 0.05 * double(rng.bounded(4)),
                                     0.1 + 0.2 * rng.uniform());
    for (double snr : {-10.0, 0.0, 10.0}) {
      MixResult r = mix_at_snr(s, n, {snr, -1.0});
      std::vector<float> scaled = n.samples;
      for (float& x : scaled) x *= float(r.noise_gain);
      double achieved = 20.0 * std::log10(oracles::rms_direct(s.samples) /
                                          oracles::rms_direct(scaled));
      EXPECT_NEAR(achieved, snr, 0.01);
    }
  }
}

TEST(MixAtSnr, CommutativeAtZeroDbUpToNormalization) {
  Waveform a = fixtures::make_sine(220, 0.2, 0.4);
  Waveform b = fixtures::make_sine(330, 0.2, 0.2);
  Waveform ab = peak_normalize(mix_at_snr(a, b, {0.0, -1.0}).audio, -3.0);
  Waveform ba = peak_normalize(mix_at_snr(b, a, {0.0, -1.0}).audio, -3.0);
  ASSERT_EQ(ab.samples.size(), ba.samples.size());
  for (std::size_t i = 0; i < ab.samples.size(); ++i) {
    EXPECT_NEAR(ab.samples[i], ba.samples[i], 1e-6);
  }
}

TEST(MixAtSnr, NeverExceedsHeadroomTarget) {
  Waveform a = fixtures::make_sine(220, 0.2, 0.9);
  Waveform b = fixtures::make_sine(221, 0.2, 0.9);  // near-coherent sum clips
  MixResult r = mix_at_snr(a, b, {0.0, -1.0});
  EXPECT_LE(peak(r.audio), db_to_linear(-1.0) + 1e-6);
  EXPECT_LT(r.post_gain, 1.0);
}

TEST(ConcatWordSegments, KeepAllRemovesGaps) {
  fixtures::TempDir dir("concat");
  Utterance u = fixtures::make_utterance(dir.path(), "u0", {"one", "two", "three"});
  Waveform w = read_wav(dir.path() / u.asset.path);
  std::vector<std::pair<double, double>> spans;
  for (const auto& ws : u.words) spans.emplace_back(ws.start, ws.end);

  Waveform all = concat_word_segments(w, spans, {0, 1, 2}, 0.0);
  std::vector<float> expected;
  for (const auto& [s, e] : spans) {
    std::size_t a = std::size_t(std::lround(s * w.sample_rate));
    std::size_t b = std::size_t(std::lround(e * w.sample_rate));
    expected.insert(expected.end(), w.samples.begin() + a, w.samples.begin() + b);
  }
  EXPECT_EQ(all.samples, expected);
}

TEST(ConcatWordSegments, EmptyAndBadIndices) {
  fixtures::TempDir dir("concat2");
  Utterance u = fixtures::make_utterance(dir.path(), "u0", {"one", "two"});
  Waveform w = read_wav(dir.path() / u.asset.path);
  std::vector<std::pair<double, double>> spans;
  for (const auto& ws : u.words) spans.emplace_back(ws.start, ws.end);
  EXPECT_THROW(concat_word_segments(w, spans, {}, 0.0), DataError);
  EXPECT_THROW(concat_word_segments(w, spans, {0, 0}, 0.0), DataError);
  EXPECT_THROW(concat_word_segments(w, spans, {1, 0}, 0.0), DataError);
  EXPECT_THROW(concat_word_segments(w, spans, {5}, 0.0), DataError);
}

TEST(ConcatWordSegments, CrossfadeDurationFromFixtureTimestamps) {
  fixtures::TempDir dir("concat3");
  Utterance u = fixtures::make_utterance(dir.path(), "u0", {"one", "two", "three"});
  Waveform w = read_wav(dir.path() / u.asset.path);
  std::vector<std::pair<double, double>> spans;
  for (const auto& ws : u.words) spans.emplace_back(ws.start, ws.end);
  const double crossfade_ms = 20.0;
  // derived expectation: span(0) + span(2) - crossfade, all in samples
  auto samples_in = [&](int i) {
    return std::lround(spans[i].second * w.sample_rate) -
           std::lround(spans[i].first * w.sample_rate);
  };
  long cf = std::lround(crossfade_ms / 1000.0 * w.sample_rate);
  Waveform out = concat_word_segments(w, spans, {0, 2}, crossfade_ms);
  EXPECT_EQ(long(out.samples.size()), samples_in(0) + samples_in(2) - cf);
}

TEST(ConcatWordSegments, ZeroCrossfadeAssociativeOverSplits) {
  fixtures::TempDir dir("concat4");
  Utterance u = fixtures::make_utterance(
      dir.path(), "u0", {"a", "b", "c", "d", "e"});
  Waveform w = read_wav(dir.path() / u.asset.path);
  std::vector<std::pair<double, double>> spans;
  for (const auto& ws : u.words) spans.emplace_back(ws.start, ws.end);

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      if (rng.coin()) keep.push_back(i);
    }
    if (keep.size() < 2) continue;
    std::size_t cut = 1 + rng.bounded(keep.size() - 1);
    std::vector<std::size_t> left(keep.begin(), keep.begin() + cut);
    std::vector<std::size_t> right(keep.begin() + cut, keep.end());

    Waveform whole = concat_word_segments(w, spans, keep, 0.0);
    Waveform a = concat_word_segments(w, spans, left, 0.0);
    Waveform b = concat_word_segments(w, spans, right, 0.0);
    std::vector<float> glued = a.samples;
    glued.insert(glued.end(), b.samples.begin(), b.samples.end());
    EXPECT_EQ(whole.samples, glued);
  }
}

TEST(Resample, DoublingRateDoublesLength) {
  Waveform w = fixtures::make_sine(200.0, 0.5, 0.4, 8000);
  Waveform r = resample(w, 16000);
  EXPECT_EQ(r.sample_rate, 16000);
  EXPECT_NEAR(double(r.samples.size()), 2.0 * double(w.samples.size()), 1.0);
}

TEST(Resample, PreservesDcLevel) {
  Waveform w;
  w.sample_rate = 22050;
  w.samples.assign(4000, 0.25f);
  Waveform r = resample(w, 16000);
  // interior samples hold the DC value
  for (std::size_t i = 100; i + 100 < r.samples.size(); ++i) {
    EXPECT_NEAR(r.samples[i], 0.25f, 1e-3f);
  }
}

TEST(Resample, NoOpAtSameRate) {
  Waveform w = fixtures::make_sine(100.0, 0.1, 0.5);
  Waveform r = resample(w, w.sample_rate);
  EXPECT_EQ(r.samples, w.samples);
}
