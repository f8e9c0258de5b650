#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "rirsynth/errors.hpp"

namespace rirsynth {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

enum class PatternKind {
  omnidirectional,
  subcardioid,
  cardioid,
  supercardioid,
  hypercardioid,
};

// First-order directivity pattern, gain(theta) = a + (1 - a) cos(theta).
struct DirectivityPattern {
  PatternKind kind = PatternKind::omnidirectional;
  double a = 1.0;

  static DirectivityPattern omnidirectional() { return {PatternKind::omnidirectional, 1.0}; }
  static DirectivityPattern subcardioid() { return {PatternKind::subcardioid, 0.7}; }
  static DirectivityPattern cardioid() { return {PatternKind::cardioid, 0.5}; }
  static DirectivityPattern supercardioid() { return {PatternKind::supercardioid, 0.37}; }
  static DirectivityPattern hypercardioid() { return {PatternKind::hypercardioid, 0.25}; }

  static DirectivityPattern from_kind(PatternKind kind) {
    switch (kind) {
      case PatternKind::omnidirectional: return omnidirectional();
      case PatternKind::subcardioid: return subcardioid();
      case PatternKind::cardioid: return cardioid();
      case PatternKind::supercardioid: return supercardioid();
      case PatternKind::hypercardioid: return hypercardioid();
    }
    throw InvalidParameterError("unknown directivity pattern kind");
  }

  static DirectivityPattern from_name(std::string_view name) {
    if (name == "omnidirectional" || name == "omni") return omnidirectional();
    if (name == "subcardioid") return subcardioid();
    if (name == "cardioid") return cardioid();
    if (name == "supercardioid") return supercardioid();
    if (name == "hypercardioid") return hypercardioid();
    throw InvalidParameterError("unknown directivity pattern '" + std::string(name) + "'");
  }

  std::string name() const {
    switch (kind) {
      case PatternKind::omnidirectional: return "omnidirectional";
      case PatternKind::subcardioid: return "subcardioid";
      case PatternKind::cardioid: return "cardioid";
      case PatternKind::supercardioid: return "supercardioid";
      case PatternKind::hypercardioid: return "hypercardioid";
    }
    return "unknown";
  }
};

inline double directivity_gain_cos(const DirectivityPattern& p, double cos_theta) {
  return p.a + (1.0 - p.a) * cos_theta;
}

inline double directivity_gain(const DirectivityPattern& p, double theta) {
  return directivity_gain_cos(p, std::cos(theta));
}

// Shoebox room with a target broadband reverberation time.
struct Room {
  double length = 0.0;  // x extent, m
  double width = 0.0;   // y extent, m
  double height = 0.0;  // z extent, m
  double t60 = 0.0;     // s

  Room() = default;
  Room(double length_, double width_, double height_, double t60_)
      : length(length_), width(width_), height(height_), t60(t60_) {
    if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0)) {
      throw InvalidParameterError("room dimensions must be positive");
    }
    if (!(t60 > 0.0)) {
      throw InvalidParameterError("room t60 must be positive");
    }
  }

  double volume() const { return length * width * height; }
  double surface_area() const {
    return 2.0 * (length * width + length * height + width * height);
  }

  bool contains(const Vec3& p, double margin = 0.0) const {
    return p.x > margin && p.x < length - margin && p.y > margin && p.y < width - margin &&
           p.z > margin && p.z < height - margin;
  }
};

struct Source {
  Vec3 position;
  double look_azimuth = 0.0;    // rad
  double look_elevation = 0.0;  // rad
  DirectivityPattern pattern = DirectivityPattern::cardioid();

  Vec3 look_vector() const {
    const double ce = std::cos(look_elevation);
    return {ce * std::cos(look_azimuth), ce * std::sin(look_azimuth), std::sin(look_elevation)};
  }
};

struct MicPair {
  std::array<Vec3, 2> positions;
  double orientation = 0.0;  // array axis azimuth, rad

  static MicPair from_center(const Vec3& center, double orientation, double spacing) {
    if (!(spacing > 0.0)) throw InvalidParameterError("mic spacing must be positive");
    const Vec3 half{0.5 * spacing * std::cos(orientation), 0.5 * spacing * std::sin(orientation),
                    0.0};
    return MicPair{{center - half, center + half}, orientation};
  }

  Vec3 center() const { return (positions[0] + positions[1]) * 0.5; }
  double spacing() const { return (positions[1] - positions[0]).norm(); }
};

// One source / microphone-pair constellation. `d` is the distance from the
// source to the geometric center of the pair; per-microphone delays are
// always recomputed from the individual positions.
struct Scene {
  Room room;
  Source source;
  MicPair mics;
  double d = 0.0;

  static Scene make(const Room& room, const Source& source, const MicPair& mics) {
    if (!room.contains(source.position)) {
      throw GeometryError("source position is not strictly inside the room");
    }
    for (const auto& m : mics.positions) {
      if (!room.contains(m)) {
        throw GeometryError("microphone position is not strictly inside the room");
      }
    }
    const double d = (mics.center() - source.position).norm();
    if (!(d > 0.0)) throw GeometryError("source coincides with the microphone pair center");
    return Scene{room, source, mics, d};
  }
};

enum class TailSolve {
  realization,  // exact per-realization quadratic, cross terms included
  expectation,  // expected tail energy, cross terms dropped
};

// Global synthesis parameters. Angles are radians everywhere inside the
// library; degrees appear only at CLI/config boundaries.
struct SynthConfig {
  double sample_rate = 16000.0;       // Hz
  int n_samples = 16384;              // RIR length
  int image_order = 3;                // max reflection count for the early part
  double kappa = 1.0;                 // fade-in shape factor
  int drr_window = 40;                // half-width of the direct-path window, samples
  double speed_of_sound = 343.0;      // m/s
  double highpass_cutoff = 100.0;     // Hz
  bool highpass_enabled = true;
  double alpha_min = 2.5;             // source directivity factor draw range
  double alpha_max = 5.5;
  double mic_directivity_factor = 1.0;  // omnidirectional microphones
  TailSolve tail_solve = TailSolve::realization;

  void validate() const {
    if (!(sample_rate > 0.0)) throw InvalidParameterError("sample_rate must be positive");
    if (n_samples <= 0) throw InvalidParameterError("n_samples must be positive");
    if (image_order < 0) throw InvalidParameterError("image_order must be non-negative");
    if (!(kappa > 0.0)) throw InvalidParameterError("kappa must be positive");
    if (drr_window < 0) throw InvalidParameterError("drr_window must be non-negative");
    if (!(speed_of_sound > 0.0)) throw InvalidParameterError("speed_of_sound must be positive");
    if (!(highpass_cutoff > 0.0)) throw InvalidParameterError("highpass_cutoff must be positive");
    if (!(alpha_min > 0.0) || alpha_max < alpha_min) {
      throw InvalidParameterError("alpha range must be positive and non-empty");
    }
    if (!(mic_directivity_factor > 0.0)) {
      throw InvalidParameterError("mic_directivity_factor must be positive");
    }
  }
};

struct AngleDecomposition {
  double azimuth = 0.0;    // rad, relative to the look direction
  double elevation = 0.0;  // rad, relative to the look direction
  double polar = 0.0;      // rad, angle between look direction and target
};

// Decomposes the direction from the source to `target` into azimuth and
// elevation relative to the source look direction. The polar angle satisfies
// cos(polar) = cos(elevation) * cos(azimuth).
inline AngleDecomposition angle_between(const Source& src, const Vec3& target) {
  const Vec3 g = target - src.position;
  const double r = g.norm();
  if (!(r > 0.0)) throw GeometryError("target coincides with the source position");

  const double ca = std::cos(src.look_azimuth);
  const double sa = std::sin(src.look_azimuth);
  const double ce = std::cos(src.look_elevation);
  const double se = std::sin(src.look_elevation);
  const Vec3 ex{ce * ca, ce * sa, se};    // look direction
  const Vec3 ey{-sa, ca, 0.0};            // horizontal left
  const Vec3 ez{-se * ca, -se * sa, ce};  // up in the look frame

  const double gx = std::clamp(g.dot(ex) / r, -1.0, 1.0);
  const double gy = std::clamp(g.dot(ey) / r, -1.0, 1.0);
  const double gz = std::clamp(g.dot(ez) / r, -1.0, 1.0);

  AngleDecomposition out;
  out.azimuth = std::atan2(gy, gx);
  out.elevation = std::asin(gz);
  out.polar = std::acos(gx);
  return out;
}

}  // namespace rirsynth
