#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rirsynth/core.hpp"
#include "rirsynth/ism.hpp"
#include "rirsynth/rng.hpp"

namespace rirsynth {

// Exponentially decaying Gaussian late-field realization. Samples carry the
// decay envelope and the fade-in window but unit process variance; the final
// scale comes from solve_tail_scale.
struct StochasticTail {
  std::vector<double> samples;
  int n_d = 0;
  double delta = 0.0;  // 1/s
  std::uint64_t rng_seed = 0;
};

struct DrrTarget {
  double eta = 0.0;    // target direct-to-reverberant power ratio
  double d_c = 0.0;    // critical distance, m
  double alpha = 1.0;  // source directivity factor
  double beta = 1.0;   // microphone directivity factor
  double directional_response = 1.0;  // source pattern gain toward the microphone
};

// Energy decay rate of the late field for a given reverberation time.
inline double decay_rate(double t60) {
  if (!(t60 > 0.0)) throw InvalidParameterError("t60 must be positive");
  return 3.0 * std::log(10.0) / t60;
}

// Raised-cosine fade-in of the late field after the direct-path delay. Zero
// up to n_d, one past n_d + 2 fs / (kappa delta).
inline double fade_window(double n, double n_d, double delta, double kappa, double fs) {
  if (!(kappa > 0.0)) throw InvalidParameterError("kappa must be positive");
  const double rise = 2.0 * fs / (kappa * delta);
  const double t = n - n_d;
  if (t <= 0.0) return 0.0;
  if (t > rise) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * t / rise));
}

inline StochasticTail generate_tail(int n_d, double delta, const SynthConfig& cfg,
                                    RandomStream& rng) {
  if (n_d < 0 || n_d >= cfg.n_samples) {
    throw InvalidParameterError("direct-path delay must fall inside the buffer");
  }
  if (!(delta > 0.0)) throw InvalidParameterError("delta must be positive");

  StochasticTail tail;
  tail.samples.assign(static_cast<std::size_t>(cfg.n_samples), 0.0);
  tail.n_d = n_d;
  tail.delta = delta;
  tail.rng_seed = rng.seed();

  const double fs = cfg.sample_rate;
  for (int n = n_d + 1; n < cfg.n_samples; ++n) {
    const double g = rng.normal();
    const double env = std::exp(-delta * static_cast<double>(n - n_d) / fs);
    tail.samples[static_cast<std::size_t>(n)] =
        fade_window(n, n_d, delta, cfg.kappa, fs) * g * env;
  }
  return tail;
}

// Distance at which direct and reverberant power are equal, from room volume,
// reverberation time and the directivity factors of source and microphone.
inline double critical_distance(const Room& room, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidParameterError("directivity factors must be positive");
  }
  return 0.1 * std::sqrt(alpha * beta) * std::sqrt(room.volume() / (kPi * room.t60));
}

// Target DRR toward an arbitrary point: the squared pattern gain along the
// source-to-point direction times the squared ratio of critical distance to
// source-point distance.
inline DrrTarget target_drr(const Room& room, const Source& src, const Vec3& point, double alpha,
                            double beta) {
  const double d = (point - src.position).norm();
  if (!(d > 0.0)) throw GeometryError("DRR target undefined at zero distance");
  const AngleDecomposition ang = angle_between(src, point);
  const double response = directivity_gain(src.pattern, ang.polar);
  const double d_c = critical_distance(room, alpha, beta);
  DrrTarget target;
  target.eta = response * response * d_c * d_c / (d * d);
  target.d_c = d_c;
  target.alpha = alpha;
  target.beta = beta;
  target.directional_response = response;
  return target;
}

// Scene-level target, measured toward the microphone-pair center.
inline DrrTarget target_drr(const Scene& scene, double alpha, double beta) {
  return target_drr(scene.room, scene.source, scene.mics.center(), alpha, beta);
}

namespace detail {

struct QuadraticSums {
  double ad = 0.0, bd = 0.0, cd = 0.0;  // direct window: early^2, cross, tail^2
  double al = 0.0, bl = 0.0, cl = 0.0;  // late region
};

inline QuadraticSums drr_quadratic_sums(const std::vector<double>& early,
                                        const std::vector<double>& tail, int n_d, int w) {
  QuadraticSums s;
  const long n = static_cast<long>(early.size());
  const long lo = std::max(0L, static_cast<long>(n_d) - w);
  const long hi = static_cast<long>(n_d) + w;
  for (long i = lo; i <= hi; ++i) {
    const double e = early[static_cast<std::size_t>(i)];
    const double t = tail[static_cast<std::size_t>(i)];
    s.ad += e * e;
    s.bd += e * t;
    s.cd += t * t;
  }
  for (long i = hi + 1; i < n; ++i) {
    const double e = early[static_cast<std::size_t>(i)];
    const double t = tail[static_cast<std::size_t>(i)];
    s.al += e * e;
    s.bl += e * t;
    s.cl += t * t;
  }
  return s;
}

// Smallest non-negative root of a x^2 + b x + c = 0, or -1 if none exists.
inline double smallest_nonnegative_root(double a, double b, double c) {
  constexpr double kZeroSnap = 1e-15;
  if (a == 0.0) {
    if (b == 0.0) return c == 0.0 ? 0.0 : -1.0;
    const double r = -c / b;
    return r >= -kZeroSnap ? std::max(r, 0.0) : -1.0;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return -1.0;
  const double sd = std::sqrt(disc);
  const double q = b >= 0.0 ? -0.5 * (b + sd) : -0.5 * (b - sd);
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (r1 >= -kZeroSnap) return std::max(r1, 0.0);
  if (r2 >= -kZeroSnap) return std::max(r2, 0.0);
  return -1.0;
}

}  // namespace detail

// Solves for the tail scale sigma such that the combined RIR
// early + sigma * tail meets the target DRR exactly for this realization,
// cross terms included. When two non-negative roots exist the smaller one is
// returned so the geometric part is perturbed least.
inline double solve_tail_scale(const std::vector<double>& early, const std::vector<double>& tail,
                               int n_d, double eta, int w) {
  if (early.size() != tail.size()) {
    throw InvalidParameterError("early and tail buffers must have equal length");
  }
  if (w < 0) throw InvalidParameterError("drr window must be non-negative");
  const long n = static_cast<long>(early.size());
  if (n_d < 0 || static_cast<long>(n_d) + w + 1 >= n) {
    throw InvalidParameterError("direct window must end before the buffer does");
  }
  if (!(eta > 0.0)) {
    throw InfeasibleDrrError(eta, 0.0, 0.0);
  }

  const auto s = detail::drr_quadratic_sums(early, tail, n_d, w);
  if (!(s.cl > 0.0)) {
    throw InvalidParameterError("tail has no energy outside the direct window");
  }

  const double a = s.cd - eta * s.cl;
  const double b = 2.0 * (s.bd - eta * s.bl);
  const double c = s.ad - eta * s.al;
  const double sigma = detail::smallest_nonnegative_root(a, b, c);
  if (sigma < 0.0) {
    const double at_zero = s.al > 0.0 ? s.ad / s.al : std::numeric_limits<double>::infinity();
    throw InfeasibleDrrError(eta, at_zero, s.cd / s.cl);
  }
  return sigma;
}

inline double solve_tail_scale(const EarlyRir& early, const StochasticTail& tail, double eta,
                               int w) {
  if (early.n_d != tail.n_d) {
    throw InvalidParameterError("early and tail direct-path delays must agree");
  }
  return solve_tail_scale(early.samples, tail.samples, early.n_d, eta, w);
}

// Expectation variant: cross terms dropped, tail energies replaced by the
// expected envelope power. The measured DRR then only matches the target on
// average over realizations.
inline double solve_tail_scale_expected(const EarlyRir& early, double delta,
                                        const SynthConfig& cfg, double eta) {
  const int w = cfg.drr_window;
  const long n = static_cast<long>(early.samples.size());
  if (static_cast<long>(early.n_d) + w + 1 >= n) {
    throw InvalidParameterError("direct window must end before the buffer does");
  }
  if (!(eta > 0.0)) throw InfeasibleDrrError(eta, 0.0, 0.0);

  const double fs = cfg.sample_rate;
  const long lo = std::max(0L, static_cast<long>(early.n_d) - w);
  const long hi = static_cast<long>(early.n_d) + w;
  double ad = 0.0, al = 0.0, cd = 0.0, cl = 0.0;
  for (long i = 0; i < n; ++i) {
    const double e = early.samples[static_cast<std::size_t>(i)];
    const double psi = fade_window(static_cast<double>(i), early.n_d, delta, cfg.kappa, fs);
    const double env = i > early.n_d
                           ? std::exp(-delta * static_cast<double>(i - early.n_d) / fs)
                           : 0.0;
    const double t2 = psi * psi * env * env;
    if (i >= lo && i <= hi) {
      ad += e * e;
      cd += t2;
    } else if (i > hi) {
      al += e * e;
      cl += t2;
    }
  }
  if (!(cl > 0.0)) throw InvalidParameterError("tail has no expected energy outside the window");

  const double denom = eta * cl - cd;
  const double numer = ad - eta * al;
  if (denom <= 0.0 || numer < 0.0) {
    const double at_zero = al > 0.0 ? ad / al : std::numeric_limits<double>::infinity();
    throw InfeasibleDrrError(eta, at_zero, cd / cl);
  }
  return std::sqrt(numer / denom);
}

}  // namespace rirsynth
