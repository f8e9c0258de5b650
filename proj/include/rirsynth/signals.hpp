#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "rirsynth/core.hpp"
#include "rirsynth/errors.hpp"
#include "rirsynth/fft.hpp"
#include "rirsynth/rng.hpp"
#include "rirsynth/synth.hpp"

namespace rirsynth {

struct AudioClip {
  std::vector<double> samples;
  double sample_rate = 0.0;
};

struct RenderedPair {
  std::array<AudioClip, 2> clips;
  double normalization_gain = 1.0;
  std::array<double, 2> prenorm_power{0.0, 0.0};  // noisy, before normalization
  double snr_db = 0.0;
};

// values laid out [channel-feature plane][frame][bin]; per channel three
// planes in order magnitude, sin(phase), cos(phase).
struct FeatureTensor {
  std::vector<double> values;
  std::size_t planes = 0;
  std::size_t frames = 0;
  std::size_t bins = 0;
  int win = 0;
  int hop = 0;
  std::size_t nfft = 0;
  double sample_rate = 0.0;

  double& at(std::size_t plane, std::size_t frame, std::size_t bin) {
    return values[(plane * frames + frame) * bins + bin];
  }
  double at(std::size_t plane, std::size_t frame, std::size_t bin) const {
    return values[(plane * frames + frame) * bins + bin];
  }
};

namespace detail {

inline double mean_power(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

}  // namespace detail

// Renders the two microphone signals of a record: convolution of the clip
// with each RIR, truncated to the requested duration, white Gaussian sensor
// noise at the given SNR relative to that channel's convolved power, then a
// single joint gain putting the pair into [-1, 1] so inter-channel level
// differences survive. Noise is drawn channel 0 first, then channel 1.
inline RenderedPair render_mics(const std::array<Rir, 2>& rirs, const AudioClip& clip,
                                double snr_db, double duration_s, RandomStream& rng) {
  if (!(clip.sample_rate > 0.0)) throw AudioError("clip has no sample rate");
  for (const auto& r : rirs) {
    if (r.sample_rate != clip.sample_rate) {
      throw AudioError("clip and RIR sample rates differ");
    }
  }
  if (!(duration_s > 0.0)) throw InvalidParameterError("duration must be positive");
  const auto length = static_cast<std::size_t>(std::lround(duration_s * clip.sample_rate));
  if (clip.samples.size() < length) {
    throw AudioError("clip is shorter than the requested duration");
  }
  const std::vector<double> dry(clip.samples.begin(),
                                clip.samples.begin() + static_cast<long>(length));
  if (!(detail::mean_power(dry) > 0.0)) throw AudioError("silent clip: SNR is undefined");

  RenderedPair out;
  out.snr_db = snr_db;
  const double noise_factor = std::pow(10.0, -snr_db / 10.0);
  double peak = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<double> y = fft_convolve(dry, rirs[c].samples);
    y.resize(length);
    const double power = detail::mean_power(y);
    const double noise_std = std::sqrt(power * noise_factor);
    for (auto& v : y) v += noise_std * rng.normal();
    out.prenorm_power[c] = detail::mean_power(y);
    for (double v : y) peak = std::max(peak, std::abs(v));
    out.clips[c].samples = std::move(y);
    out.clips[c].sample_rate = clip.sample_rate;
  }
  if (!(peak > 0.0)) throw AudioError("rendered pair is silent, cannot normalize");

  out.normalization_gain = 1.0 / peak;
  for (auto& c : out.clips) {
    for (auto& v : c.samples) v /= peak;
  }
  return out;
}

inline std::vector<double> blackman_window(int n) {
  if (n < 2) throw InvalidParameterError("window needs at least two points");
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    w[static_cast<std::size_t>(i)] =
        0.42 - 0.5 * std::cos(2.0 * kPi * t) + 0.08 * std::cos(4.0 * kPi * t);
  }
  return w;
}

// Blackman-windowed STFT of both channels, decomposed per channel into
// magnitude, sin(phase) and cos(phase) planes. Zero-magnitude bins take
// phase 0, giving (sin, cos) = (0, 1) instead of NaN.
inline FeatureTensor stft_features(const std::array<AudioClip, 2>& pair, double win_ms = 25.0,
                                   double hop_ms = 10.0) {
  if (pair[0].samples.size() != pair[1].samples.size()) {
    throw InvalidParameterError("channel lengths differ");
  }
  if (pair[0].sample_rate != pair[1].sample_rate || !(pair[0].sample_rate > 0.0)) {
    throw AudioError("channel sample rates differ or are unset");
  }
  const double fs = pair[0].sample_rate;
  const int win = static_cast<int>(std::lround(win_ms * 1e-3 * fs));
  const int hop = static_cast<int>(std::lround(hop_ms * 1e-3 * fs));
  if (win < 2 || hop < 1) throw InvalidParameterError("window or hop too small at this rate");
  const std::size_t length = pair[0].samples.size();
  if (length < static_cast<std::size_t>(win)) {
    throw InvalidParameterError("clip is shorter than one analysis window");
  }

  FeatureTensor t;
  t.win = win;
  t.hop = hop;
  t.nfft = next_pow2(static_cast<std::size_t>(win));
  t.bins = t.nfft / 2 + 1;
  t.frames = (length - static_cast<std::size_t>(win)) / static_cast<std::size_t>(hop) + 1;
  t.planes = 6;
  t.sample_rate = fs;
  t.values.assign(t.planes * t.frames * t.bins, 0.0);

  const std::vector<double> window = blackman_window(win);
  std::vector<std::complex<double>> buf(t.nfft);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t f = 0; f < t.frames; ++f) {
      std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
      const std::size_t start = f * static_cast<std::size_t>(hop);
      for (int i = 0; i < win; ++i) {
        buf[static_cast<std::size_t>(i)] =
            pair[c].samples[start + static_cast<std::size_t>(i)] *
            window[static_cast<std::size_t>(i)];
      }
      fft_inplace(buf);
      for (std::size_t b = 0; b < t.bins; ++b) {
        const double re = buf[b].real(), im = buf[b].imag();
        const double mag = std::sqrt(re * re + im * im);
        t.at(3 * c + 0, f, b) = mag;
        t.at(3 * c + 1, f, b) = mag > 0.0 ? im / mag : 0.0;
        t.at(3 * c + 2, f, b) = mag > 0.0 ? re / mag : 1.0;
      }
    }
  }
  return t;
}

}  // namespace rirsynth
