#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rirsynth/errors.hpp"
#include "rirsynth/rng.hpp"
#include "rirsynth/signals.hpp"

using namespace rirsynth;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Rir delta_rir(double gain, double sample_rate, std::size_t len = 64) {
  Rir r;
  r.samples.assign(len, 0.0);
  r.samples[0] = gain;
  r.sample_rate = sample_rate;
  r.n_d = 0;
  return r;
}

AudioClip noise_clip(std::uint64_t seed, std::size_t len, double sample_rate) {
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(len);
  RandomStream rng(seed);
  for (auto& v : clip.samples) v = rng.uniform(-0.5, 0.5);
  return clip;
}

}  // namespace

TEST_CASE("rendering through a unit impulse reproduces the clip") {
  const AudioClip clip = noise_clip(1, 16000, 16000.0);
  const std::array<Rir, 2> rirs{delta_rir(1.0, 16000.0), delta_rir(1.0, 16000.0)};

  RandomStream rng(5);
  // At 300 dB SNR the sensor noise is far below double precision visibility.
  const RenderedPair out = render_mics(rirs, clip, 300.0, 1.0, rng);

  REQUIRE(out.clips[0].samples.size() == 16000);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < 16000; ++i) {
    const double expected = clip.samples[i] * out.normalization_gain;
    CHECK_THAT(out.clips[0].samples[i], WithinAbs(expected, 1e-12));
    max_abs = std::max(max_abs, std::abs(out.clips[0].samples[i]));
  }
  CHECK(max_abs == 1.0);  // the peak sample is normalized exactly
}

TEST_CASE("sensor noise matches the requested SNR") {
  const AudioClip clip = noise_clip(2, 16000, 16000.0);
  const std::array<Rir, 2> rirs{delta_rir(1.0, 16000.0), delta_rir(1.0, 16000.0)};

  RandomStream rng(6);
  const double snr_db = 40.0;
  const RenderedPair out = render_mics(rirs, clip, snr_db, 1.0, rng);

  double clip_power = 0.0;
  for (double v : clip.samples) clip_power += v * v;
  clip_power /= static_cast<double>(clip.samples.size());

  for (std::size_t c = 0; c < 2; ++c) {
    double noise_power = 0.0;
    for (std::size_t i = 0; i < 16000; ++i) {
      const double noise = out.clips[c].samples[i] / out.normalization_gain - clip.samples[i];
      noise_power += noise * noise;
    }
    noise_power /= 16000.0;
    CHECK_THAT(noise_power, WithinRel(clip_power * 1e-4, 0.1));
  }
}

TEST_CASE("joint normalization preserves the inter-channel power ratio") {
  const AudioClip clip = noise_clip(3, 16000, 16000.0);
  const std::array<Rir, 2> rirs{delta_rir(1.0, 16000.0), delta_rir(0.5, 16000.0)};

  RandomStream rng(7);
  const RenderedPair out = render_mics(rirs, clip, 30.0, 1.0, rng);

  auto power = [](const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc / static_cast<double>(x.size());
  };
  const double post_ratio = power(out.clips[0].samples) / power(out.clips[1].samples);
  const double pre_ratio = out.prenorm_power[0] / out.prenorm_power[1];
  CHECK_THAT(post_ratio, WithinRel(pre_ratio, 1e-9));
  CHECK(pre_ratio > 3.0);  // the quieter channel carries roughly a quarter of the power
  CHECK(pre_ratio < 5.0);
}

TEST_CASE("rendering validates clip, rates, and duration") {
  const AudioClip clip = noise_clip(4, 16000, 16000.0);
  const std::array<Rir, 2> rirs{delta_rir(1.0, 16000.0), delta_rir(1.0, 16000.0)};
  RandomStream rng(8);

  AudioClip silent = clip;
  std::fill(silent.samples.begin(), silent.samples.end(), 0.0);
  CHECK_THROWS_AS(render_mics(rirs, silent, 30.0, 1.0, rng), AudioError);

  AudioClip wrong_rate = clip;
  wrong_rate.sample_rate = 8000.0;
  CHECK_THROWS_AS(render_mics(rirs, wrong_rate, 30.0, 1.0, rng), AudioError);

  CHECK_THROWS_AS(render_mics(rirs, clip, 30.0, 0.0, rng), InvalidParameterError);
  CHECK_THROWS_AS(render_mics(rirs, clip, 30.0, 2.0, rng), AudioError);  // clip too short
}

TEST_CASE("noise draws are deterministic per stream") {
  const AudioClip clip = noise_clip(5, 16000, 16000.0);
  const std::array<Rir, 2> rirs{delta_rir(1.0, 16000.0), delta_rir(1.0, 16000.0)};

  RandomStream a(99), b(99);
  const RenderedPair ra = render_mics(rirs, clip, 20.0, 1.0, a);
  const RenderedPair rb = render_mics(rirs, clip, 20.0, 1.0, b);
  CHECK(ra.clips[0].samples == rb.clips[0].samples);
  CHECK(ra.clips[1].samples == rb.clips[1].samples);
}

TEST_CASE("feature tensor dimensions follow the window layout") {
  std::array<AudioClip, 2> pair;
  for (auto& ch : pair) {
    ch.sample_rate = 16000.0;
    ch.samples.assign(16000, 0.01);
  }
  const FeatureTensor t = stft_features(pair);

  CHECK(t.win == 400);   // 25 ms at 16 kHz
  CHECK(t.hop == 160);   // 10 ms
  CHECK(t.nfft == 512);  // next power of two
  CHECK(t.bins == 257);
  CHECK(t.frames == 98);
  CHECK(t.planes == 6);
  CHECK(t.values.size() == 6u * 98u * 257u);
}

TEST_CASE("phase planes stay on the unit circle") {
  std::array<AudioClip, 2> pair;
  RandomStream rng(11);
  for (auto& ch : pair) {
    ch.sample_rate = 16000.0;
    ch.samples.resize(4000);
    for (auto& v : ch.samples) v = rng.uniform(-1.0, 1.0);
  }
  const FeatureTensor t = stft_features(pair);

  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t f = 0; f < t.frames; ++f) {
      for (std::size_t b = 0; b < t.bins; ++b) {
        const double mag = t.at(3 * c, f, b);
        const double s = t.at(3 * c + 1, f, b);
        const double co = t.at(3 * c + 2, f, b);
        if (mag > 0.0) {
          CHECK_THAT(s * s + co * co, WithinAbs(1.0, 1e-6));
        }
      }
    }
  }
}

TEST_CASE("silent input yields zero magnitude and the zero-phase convention") {
  std::array<AudioClip, 2> pair;
  for (auto& ch : pair) {
    ch.sample_rate = 16000.0;
    ch.samples.assign(2000, 0.0);
  }
  const FeatureTensor t = stft_features(pair);
  for (std::size_t p = 0; p < 6; ++p) {
    const bool is_cos = (p % 3) == 2;
    for (std::size_t f = 0; f < t.frames; ++f) {
      for (std::size_t b = 0; b < t.bins; ++b) {
        CHECK(t.at(p, f, b) == (is_cos ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("a pure tone concentrates every frame on its bin") {
  // 1000 Hz sits exactly on bin 32 of a 512-point transform at 16 kHz.
  std::array<AudioClip, 2> pair;
  for (auto& ch : pair) {
    ch.sample_rate = 16000.0;
    ch.samples.resize(16000);
    for (std::size_t n = 0; n < ch.samples.size(); ++n) {
      ch.samples[n] = std::sin(2.0 * kPi * 1000.0 * static_cast<double>(n) / 16000.0);
    }
  }
  const FeatureTensor t = stft_features(pair);

  for (std::size_t f = 0; f < t.frames; ++f) {
    std::size_t argmax = 0;
    for (std::size_t b = 1; b < t.bins; ++b) {
      if (t.at(0, f, b) > t.at(0, f, argmax)) argmax = b;
    }
    CHECK(argmax == 32);
  }
}

TEST_CASE("identical channels produce identical planes") {
  std::array<AudioClip, 2> pair;
  RandomStream rng(13);
  pair[0].sample_rate = 16000.0;
  pair[0].samples.resize(3000);
  for (auto& v : pair[0].samples) v = rng.uniform(-1.0, 1.0);
  pair[1] = pair[0];

  const FeatureTensor t = stft_features(pair);
  for (std::size_t p = 0; p < 3; ++p) {
    for (std::size_t f = 0; f < t.frames; ++f) {
      for (std::size_t b = 0; b < t.bins; ++b) {
        CHECK(t.at(p, f, b) == t.at(p + 3, f, b));
      }
    }
  }
}

TEST_CASE("feature extraction validates its input pair") {
  std::array<AudioClip, 2> pair;
  pair[0].sample_rate = 16000.0;
  pair[0].samples.assign(1000, 0.1);
  pair[1].sample_rate = 16000.0;
  pair[1].samples.assign(999, 0.1);
  CHECK_THROWS_AS(stft_features(pair), InvalidParameterError);

  pair[1].samples.assign(1000, 0.1);
  pair[1].sample_rate = 8000.0;
  CHECK_THROWS_AS(stft_features(pair), AudioError);

  pair[1].sample_rate = 16000.0;
  pair[0].samples.resize(300);  // shorter than one 400-sample window
  pair[1].samples.resize(300);
  CHECK_THROWS_AS(stft_features(pair), InvalidParameterError);
}

TEST_CASE("blackman window is symmetric with the classic coefficients") {
  const auto w = blackman_window(400);
  REQUIRE(w.size() == 400);
  CHECK_THAT(w.front(), WithinAbs(0.0, 1e-12));
  CHECK_THAT(w.back(), WithinAbs(0.0, 1e-12));
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK_THAT(w[i], WithinAbs(w[w.size() - 1 - i], 1e-12));
  }
  // Midpoint of an even-length window: the two central samples straddle 1.
  CHECK(w[199] > 0.99);
  CHECK(w[200] > 0.99);
  CHECK_THROWS_AS(blackman_window(1), InvalidParameterError);
}
