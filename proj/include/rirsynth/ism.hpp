#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

#include "rirsynth/core.hpp"

namespace rirsynth {

struct ImageSource {
  Vec3 position;
  int order = 0;             // number of wall reflections
  double reflection_gain = 1.0;
  double directivity_gain = 1.0;
};

// Early (geometric) part of an RIR for one microphone.
struct EarlyRir {
  std::vector<double> samples;
  int n_d = 0;            // integer-rounded direct-path delay, samples
  bool truncated = false; // an in-order image arrived beyond the buffer
};

// Uniform wall reflection coefficient from the Sabine inversion. Throws if
// the requested t60 is shorter than full absorption allows.
inline double wall_reflection_coefficient(const Room& room) {
  const double absorption = 0.161 * room.volume() / (room.surface_area() * room.t60);
  if (absorption >= 1.0) {
    throw InfeasibleRoomError("t60 unattainable for this room: required absorption >= 1");
  }
  return std::sqrt(1.0 - absorption);
}

namespace detail {

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

}  // namespace detail

// Visits every mirror image of `src` with total reflection count <= max_order.
// The mirrored look direction flips its component on each axis with an odd
// reflection count, so directional sources radiate correctly into each image
// path. The directivity gain is evaluated toward `mic`.
template <typename Fn>
void for_each_image(const Room& room, const Source& src, const Vec3& mic, int max_order, Fn&& fn) {
  const double beta = wall_reflection_coefficient(room);
  const Vec3 look = src.look_vector();
  const double dims[3] = {room.length, room.width, room.height};
  const double spos[3] = {src.position.x, src.position.y, src.position.z};
  const int mb = (max_order + 1) / 2;  // |2m - q| <= max_order bound

  for (int mx = -mb; mx <= mb; ++mx) {
    for (int qx = 0; qx <= 1; ++qx) {
      const int ox = std::abs(2 * mx - qx);
      if (ox > max_order) continue;
      const double px = (1 - 2 * qx) * spos[0] + 2.0 * mx * dims[0];
      for (int my = -mb; my <= mb; ++my) {
        for (int qy = 0; qy <= 1; ++qy) {
          const int oy = std::abs(2 * my - qy);
          if (ox + oy > max_order) continue;
          const double py = (1 - 2 * qy) * spos[1] + 2.0 * my * dims[1];
          for (int mz = -mb; mz <= mb; ++mz) {
            for (int qz = 0; qz <= 1; ++qz) {
              const int oz = std::abs(2 * mz - qz);
              const int order = ox + oy + oz;
              if (order > max_order) continue;
              const double pz = (1 - 2 * qz) * spos[2] + 2.0 * mz * dims[2];

              const Vec3 pos{px, py, pz};
              const Vec3 mlook{look.x * (1 - 2 * qx), look.y * (1 - 2 * qy),
                               look.z * (1 - 2 * qz)};
              const Vec3 g = mic - pos;
              const double r = g.norm();
              const double cos_theta = r > 0.0 ? mlook.dot(g) / r : 1.0;
              ImageSource img;
              img.position = pos;
              img.order = order;
              img.reflection_gain = std::pow(beta, order);
              img.directivity_gain = directivity_gain_cos(src.pattern, cos_theta);
              fn(img);
            }
          }
        }
      }
    }
  }
}

inline std::vector<ImageSource> enumerate_images(const Room& room, const Source& src,
                                                 const Vec3& mic, int max_order) {
  if (max_order < 0) throw InvalidParameterError("image order must be non-negative");
  std::vector<ImageSource> images;
  for_each_image(room, src, mic, max_order, [&](const ImageSource& img) { images.push_back(img); });
  return images;
}

// Renders the early RIR from the image set. Each image contributes an
// 81-tap Hann-windowed sinc impulse centered on its fractional arrival time,
// with amplitude reflection_gain * directivity_gain / (4 pi d).
inline EarlyRir render_early(const Room& room, const Source& src, const Vec3& mic,
                             const SynthConfig& cfg, int order) {
  cfg.validate();
  if (order < 0) throw InvalidParameterError("image order must be non-negative");

  const double fs = cfg.sample_rate;
  const double c = cfg.speed_of_sound;
  const long n_samples = cfg.n_samples;
  constexpr long kHalfTaps = 40;
  constexpr double kHalfWidth = 40.5;  // window reaches zero just past the last tap

  EarlyRir out;
  out.samples.assign(static_cast<std::size_t>(n_samples), 0.0);

  const double d_direct = (mic - src.position).norm();
  if (!(d_direct > 0.0)) throw GeometryError("microphone coincides with the source");
  out.n_d = static_cast<int>(std::lround(d_direct * fs / c));

  for_each_image(room, src, mic, order, [&](const ImageSource& img) {
    const double dist = (mic - img.position).norm();
    const double tau = dist * fs / c;
    const long nc = std::lround(tau);
    if (nc >= n_samples) {
      out.truncated = true;
      return;
    }
    const double amp = img.reflection_gain * img.directivity_gain / (4.0 * kPi * dist);
    const long lo = std::max(0L, nc - kHalfTaps);
    const long hi = std::min(n_samples - 1, nc + kHalfTaps);
    for (long n = lo; n <= hi; ++n) {
      const double t = static_cast<double>(n) - tau;
      const double w = 0.5 * (1.0 + std::cos(kPi * t / kHalfWidth));
      out.samples[static_cast<std::size_t>(n)] += amp * w * detail::sinc(t);
    }
  });
  return out;
}

inline EarlyRir render_early(const Room& room, const Scene& scene, int mic_index,
                             const SynthConfig& cfg) {
  if (mic_index < 0 || mic_index > 1) throw InvalidParameterError("mic_index must be 0 or 1");
  return render_early(room, scene.source, scene.mics.positions[static_cast<std::size_t>(mic_index)],
                      cfg, cfg.image_order);
}

// Second-order recursive high pass removing the low-frequency buildup of the
// image sum. Exact zero at DC.
inline void highpass_inplace(std::vector<double>& x, double fs, double cutoff) {
  const double w = 2.0 * kPi * cutoff / fs;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (auto& v : x) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + v;
    v = y0 + a1 * y1 + r1 * y2;
  }
}

inline EarlyRir highpass(EarlyRir rir, const SynthConfig& cfg) {
  highpass_inplace(rir.samples, cfg.sample_rate, cfg.highpass_cutoff);
  return rir;
}

}  // namespace rirsynth
