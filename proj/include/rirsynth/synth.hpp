#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rirsynth/core.hpp"
#include "rirsynth/errors.hpp"
#include "rirsynth/ism.hpp"
#include "rirsynth/rng.hpp"
#include "rirsynth/tail.hpp"

namespace rirsynth {

enum class SynthMethod {
  hybrid,         // geometric early part plus scaled stochastic tail
  ism_only,       // geometric part alone
  drr_augmented,  // direct window rescaled after the fact
};

inline const char* synth_method_name(SynthMethod m) {
  switch (m) {
    case SynthMethod::hybrid: return "hybrid";
    case SynthMethod::ism_only: return "ism_only";
    case SynthMethod::drr_augmented: return "drr_augmented";
  }
  return "unknown";
}

inline SynthMethod synth_method_from_name(const std::string& name) {
  if (name == "hybrid") return SynthMethod::hybrid;
  if (name == "ism_only") return SynthMethod::ism_only;
  if (name == "drr_augmented") return SynthMethod::drr_augmented;
  throw InvalidParameterError("unknown synthesis method '" + name + "'");
}

// One microphone's impulse response plus everything needed to audit or
// re-target it. The early and tail parts are kept separately; samples is
// always early + tail_scale * tail.
struct Rir {
  std::vector<double> samples;
  std::vector<double> early;
  std::vector<double> tail;  // unit process variance, envelope and fade baked in
  double sample_rate = 0.0;  // Hz
  int n_d = 0;               // direct-path delay, samples
  double tail_scale = 0.0;
  double target_drr = 0.0;    // eta this response aims at (0 when no target)
  double measured_drr = 0.0;  // eta actually measured on samples
  double alpha = 0.0;         // source directivity factor behind the target
  double critical_distance = 0.0;     // m
  double directional_response = 1.0;  // source pattern gain toward this microphone
  double distance = 0.0;              // source to this microphone, m
  int mic_index = 0;
  bool truncated = false;  // some image arrival fell past the buffer end
  std::uint64_t seed = 0;  // stream seed the tail was drawn from
  SynthMethod method = SynthMethod::hybrid;

  void recombine() {
    samples.assign(early.begin(), early.end());
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] += tail_scale * tail[i];
  }
};

namespace detail {

// DRR of a buffer without the anechoic-input error: no late energy reads as
// an infinite ratio, which is the honest value for metadata.
inline double drr_or_infinity(const std::vector<double>& h, int n_d, int w) {
  const long n = static_cast<long>(h.size());
  const long lo = std::max(0L, static_cast<long>(n_d) - w);
  const long hi = std::min(static_cast<long>(n_d) + w, n - 1);
  double direct = 0.0, late = 0.0;
  for (long i = lo; i <= hi; ++i) direct += h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
  for (long i = hi + 1; i < n; ++i) late += h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
  if (!(late > 0.0)) return std::numeric_limits<double>::infinity();
  return direct / late;
}

}  // namespace detail

// Renders both microphones of a scene. One source directivity factor is
// drawn per scene, then per microphone: geometric early part, high-pass,
// stochastic tail, and the tail scale that meets that microphone's own DRR
// target. Draw order from the stream is fixed: alpha, then the tail of
// mic 0, then the tail of mic 1.
inline std::array<Rir, 2> synthesize(const Scene& scene, const SynthConfig& cfg,
                                     RandomStream& rng) {
  cfg.validate();
  const double alpha = rng.uniform(cfg.alpha_min, cfg.alpha_max);
  const double delta = decay_rate(scene.room.t60);

  std::array<Rir, 2> out;
  for (int m = 0; m < 2; ++m) {
    const Vec3& mic = scene.mics.positions[static_cast<std::size_t>(m)];
    EarlyRir early = render_early(scene.room, scene.source, mic, cfg, cfg.image_order);
    if (cfg.highpass_enabled) early = highpass(std::move(early), cfg);

    const DrrTarget target =
        target_drr(scene.room, scene.source, mic, alpha, cfg.mic_directivity_factor);
    StochasticTail tail = generate_tail(early.n_d, delta, cfg, rng);

    Rir rir;
    rir.sample_rate = cfg.sample_rate;
    rir.n_d = early.n_d;
    rir.target_drr = target.eta;
    rir.alpha = alpha;
    rir.critical_distance = target.d_c;
    rir.directional_response = target.directional_response;
    rir.distance = (mic - scene.source.position).norm();
    rir.mic_index = m;
    rir.truncated = early.truncated;
    rir.seed = tail.rng_seed;
    rir.method = SynthMethod::hybrid;
    rir.tail_scale = cfg.tail_solve == TailSolve::realization
                         ? solve_tail_scale(early, tail, target.eta, cfg.drr_window)
                         : solve_tail_scale_expected(early, delta, cfg, target.eta);
    rir.early = std::move(early.samples);
    rir.tail = std::move(tail.samples);
    rir.recombine();
    rir.measured_drr = detail::drr_or_infinity(rir.samples, rir.n_d, cfg.drr_window);
    out[static_cast<std::size_t>(m)] = std::move(rir);
  }
  return out;
}

// Geometric part alone at an explicit reflection order, no tail and no
// directivity-factor draw. Used as the full-ISM reference at high order.
inline std::array<Rir, 2> synthesize_ism_only(const Scene& scene, const SynthConfig& cfg,
                                              int max_order) {
  cfg.validate();
  std::array<Rir, 2> out;
  for (int m = 0; m < 2; ++m) {
    const Vec3& mic = scene.mics.positions[static_cast<std::size_t>(m)];
    EarlyRir early = render_early(scene.room, scene.source, mic, cfg, max_order);
    if (cfg.highpass_enabled) early = highpass(std::move(early), cfg);

    Rir rir;
    rir.sample_rate = cfg.sample_rate;
    rir.n_d = early.n_d;
    rir.directional_response =
        directivity_gain(scene.source.pattern, angle_between(scene.source, mic).polar);
    rir.distance = (mic - scene.source.position).norm();
    rir.mic_index = m;
    rir.truncated = early.truncated;
    rir.method = SynthMethod::ism_only;
    rir.early = early.samples;
    rir.tail.assign(rir.early.size(), 0.0);
    rir.samples = std::move(early.samples);
    rir.measured_drr = detail::drr_or_infinity(rir.samples, rir.n_d, cfg.drr_window);
    out[static_cast<std::size_t>(m)] = std::move(rir);
  }
  return out;
}

inline std::array<Rir, 2> synthesize_ism_only(const Scene& scene, const SynthConfig& cfg) {
  return synthesize_ism_only(scene, cfg, cfg.image_order);
}

enum class DrrAugmentMode {
  random_scale,  // multiply the direct window by a factor drawn from U(1, 3)
  match_target,  // solve the factor so the DRR meets the geometric target
};

inline const char* drr_augment_mode_name(DrrAugmentMode m) {
  return m == DrrAugmentMode::random_scale ? "random_scale" : "match_target";
}

struct DrrAugmentResult {
  Rir rir;
  double scale_factor = 1.0;  // applied to the direct window
  double target = 0.0;        // DRR the scaled response meets (match_target)
  double alpha = 0.0;         // directivity factor behind that target
};

// Multiplies the samples in the direct window [n_d - w, n_d + w] by a
// factor, keeping the early/tail decomposition consistent. Late samples are
// untouched, so the DRR scales by factor squared.
inline Rir scale_direct_window(Rir rir, double factor, int w) {
  if (w < 0) throw InvalidParameterError("drr window must be non-negative");
  if (!(factor >= 0.0)) throw InvalidParameterError("scale factor must be non-negative");
  const long n = static_cast<long>(rir.samples.size());
  const long lo = std::max(0L, static_cast<long>(rir.n_d) - w);
  const long hi = std::min(static_cast<long>(rir.n_d) + w, n - 1);
  for (long i = lo; i <= hi; ++i) {
    const auto k = static_cast<std::size_t>(i);
    rir.samples[k] *= factor;
    if (k < rir.early.size()) rir.early[k] *= factor;
    if (k < rir.tail.size()) rir.tail[k] *= factor;
  }
  rir.measured_drr = detail::drr_or_infinity(rir.samples, rir.n_d, w);
  return rir;
}

// Post-hoc DRR augmentation: rescales the direct-path window of an existing
// response. random_scale draws the factor from U(1, 3); match_target redraws
// the source directivity factor, recomputes this microphone's geometric DRR
// target and solves the closed-form factor that meets it exactly.
inline DrrAugmentResult drr_augment(const Rir& rir, const Scene& scene, DrrAugmentMode mode,
                                    const SynthConfig& cfg, RandomStream& rng) {
  cfg.validate();
  const int w = cfg.drr_window;
  const long n = static_cast<long>(rir.samples.size());
  if (rir.n_d < 0 || static_cast<long>(rir.n_d) + w + 1 >= n) {
    throw InvalidParameterError("direct window must end before the buffer does");
  }

  DrrAugmentResult res;
  if (mode == DrrAugmentMode::random_scale) {
    res.scale_factor = rng.uniform(1.0, 3.0);
    res.target = rir.target_drr;
    res.alpha = rir.alpha;
  } else {
    res.alpha = rng.uniform(cfg.alpha_min, cfg.alpha_max);
    const double d_c = critical_distance(scene.room, res.alpha, cfg.mic_directivity_factor);
    res.target = rir.directional_response * rir.directional_response * d_c * d_c /
                 (rir.distance * rir.distance);

    const double current = detail::drr_or_infinity(rir.samples, rir.n_d, w);
    if (!std::isfinite(current)) {
      throw InfeasibleDrrError(res.target, current, current);
    }
    if (!(current > 0.0)) {
      if (res.target > 0.0) throw InfeasibleDrrError(res.target, 0.0, 0.0);
      res.scale_factor = 1.0;
    } else {
      res.scale_factor = std::sqrt(res.target / current);
    }
  }

  res.rir = scale_direct_window(rir, res.scale_factor, w);
  res.rir.method = SynthMethod::drr_augmented;
  if (mode == DrrAugmentMode::match_target) {
    res.rir.target_drr = res.target;
    res.rir.alpha = res.alpha;
    res.rir.critical_distance = critical_distance(scene.room, res.alpha, cfg.mic_directivity_factor);
  }
  return res;
}

}  // namespace rirsynth
