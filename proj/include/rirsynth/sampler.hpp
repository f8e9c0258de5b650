#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rirsynth/analysis.hpp"
#include "rirsynth/core.hpp"
#include "rirsynth/errors.hpp"
#include "rirsynth/rng.hpp"
#include "rirsynth/synth.hpp"

namespace rirsynth {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool valid() const { return lo <= hi; }
  double draw(RandomStream& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
  double mid() const { return 0.5 * (lo + hi); }
};

// Independent per-purpose stream tags fed to derive_seed so every record is
// reproducible in isolation, whatever order records are generated in.
namespace stream {
inline constexpr std::uint64_t room = 1;
inline constexpr std::uint64_t scene = 2;
inline constexpr std::uint64_t synth = 3;
inline constexpr std::uint64_t render = 4;
}  // namespace stream

struct SamplerConfig {
  int rooms = 10000;
  int constellations_per_room = 10;
  Interval room_length{5.0, 7.0};   // m
  Interval room_width{5.0, 7.0};    // m
  Interval ceiling{2.4, 3.0};       // m
  Interval t60{0.2, 0.7};           // s
  double mic_spacing = 0.08;        // m
  double d_min = 0.3;               // m
  double d_max = 5.0;               // m
  double wall_margin = 0.5;         // m, source and mics to any wall
  double vertical_margin = 1.0;     // m, source and mics to floor and ceiling
  Interval look_azimuth_deg{-90.0, 90.0};   // source look, relative to line of sight
  Interval look_elevation_deg{-15.0, 15.0};
  DirectivityPattern source_pattern = DirectivityPattern::cardioid();
  std::uint64_t seed = 0;
  int max_distance_redraws = 64;  // full failed DoA sweeps before giving up
  int max_scene_attempts = 32;    // scene redraws when synthesis is infeasible

  void validate() const {
    auto check_interval = [](const Interval& iv, const char* name) {
      if (!iv.valid()) {
        throw ConfigError(name, "interval is empty (min > max)");
      }
    };
    check_interval(room_length, "room_length");
    check_interval(room_width, "room_width");
    check_interval(ceiling, "ceiling");
    check_interval(t60, "t60");
    check_interval(look_azimuth_deg, "look_azimuth_deg");
    check_interval(look_elevation_deg, "look_elevation_deg");
    if (rooms <= 0) throw ConfigError("rooms", "must be positive");
    if (constellations_per_room <= 0) {
      throw ConfigError("constellations_per_room", "must be positive");
    }
    if (!(room_length.lo > 0.0)) throw ConfigError("room_length", "must be positive");
    if (!(room_width.lo > 0.0)) throw ConfigError("room_width", "must be positive");
    if (!(ceiling.lo > 0.0)) throw ConfigError("ceiling", "must be positive");
    if (!(t60.lo > 0.0)) throw ConfigError("t60", "must be positive");
    if (!(mic_spacing > 0.0)) throw ConfigError("mic_spacing", "must be positive");
    if (!(d_min > 0.0)) throw ConfigError("d_min", "must be positive");
    if (!(d_min < d_max)) throw ConfigError("d_max", "must exceed d_min");
    if (wall_margin < 0.0) throw ConfigError("wall_margin", "must be non-negative");
    if (vertical_margin < 0.0) throw ConfigError("vertical_margin", "must be non-negative");
    if (max_distance_redraws <= 0) throw ConfigError("max_distance_redraws", "must be positive");
    if (max_scene_attempts <= 0) throw ConfigError("max_scene_attempts", "must be positive");

    // The mic pair must fit in the margin-shrunk region at any orientation,
    // and the smallest room must still offer distances above d_min.
    if (!(room_length.lo - 2.0 * wall_margin > mic_spacing) ||
        !(room_width.lo - 2.0 * wall_margin > mic_spacing)) {
      throw ConfigError("wall_margin", "margins leave no room for the microphone pair");
    }
    if (!(ceiling.lo - 2.0 * vertical_margin > 0.0)) {
      throw ConfigError("vertical_margin", "margins leave no vertical placement range");
    }
    const double rx = 0.5 * room_length.lo - wall_margin;
    const double ry = 0.5 * room_width.lo - wall_margin;
    if (!(std::sqrt(rx * rx + ry * ry) > d_min)) {
      throw ConfigError("d_min", "exceeds the largest distance the smallest room can offer");
    }
  }
};

struct DatasetRecord {
  int room_index = 0;
  int constellation_index = 0;
  int attempts = 1;  // scene draws consumed before synthesis succeeded
  Scene scene;
  std::array<Rir, 2> rirs;
  double distance = 0.0;  // source to pair center, m
  int class_label = 0;
};

inline Room sample_room(const SamplerConfig& cfg, RandomStream& rng) {
  const double length = cfg.room_length.draw(rng);
  const double width = cfg.room_width.draw(rng);
  const double height = cfg.ceiling.draw(rng);
  const double t60 = cfg.t60.draw(rng);
  return Room(length, width, height, t60);
}

namespace detail {

inline bool inside_margins(const Room& room, const Vec3& p, double wall, double vertical) {
  return p.x > wall && p.x < room.length - wall && p.y > wall && p.y < room.width - wall &&
         p.z > vertical && p.z < room.height - vertical;
}

// Largest distance available from the pair center to any point of the
// margin-shrunk horizontal rectangle the source may occupy.
inline double max_feasible_distance(const Room& room, const Vec3& center, double wall) {
  const std::array<double, 2> xs{wall, room.length - wall};
  const std::array<double, 2> ys{wall, room.width - wall};
  double best = 0.0;
  for (double x : xs) {
    for (double y : ys) {
      best = std::max(best, std::hypot(x - center.x, y - center.y));
    }
  }
  return best;
}

}  // namespace detail

// Places the microphone pair uniformly (position and orientation) inside the
// margin-shrunk region, then the source at a drawn distance and direction of
// arrival in the pair's horizontal plane. When the drawn direction puts the
// source outside the allowed region the angle is swept upward in one-degree
// steps, keeping the distance; if a full sweep fails the distance and angle
// are redrawn. The source look direction is drawn relative to its line of
// sight toward the pair center.
inline Scene sample_constellation(const Room& room, const SamplerConfig& cfg, RandomStream& rng) {
  const double orientation = rng.uniform(0.0, 2.0 * kPi);
  const double hx = std::abs(0.5 * cfg.mic_spacing * std::cos(orientation));
  const double hy = std::abs(0.5 * cfg.mic_spacing * std::sin(orientation));

  const double x_lo = cfg.wall_margin + hx, x_hi = room.length - cfg.wall_margin - hx;
  const double y_lo = cfg.wall_margin + hy, y_hi = room.width - cfg.wall_margin - hy;
  const double z_lo = cfg.vertical_margin, z_hi = room.height - cfg.vertical_margin;
  if (!(x_lo < x_hi) || !(y_lo < y_hi) || !(z_lo < z_hi)) {
    throw SamplerError("room too small for the configured margins and spacing");
  }
  const Vec3 center{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi), rng.uniform(z_lo, z_hi)};
  const MicPair mics = MicPair::from_center(center, orientation, cfg.mic_spacing);

  const double d_hi = std::min(cfg.d_max, detail::max_feasible_distance(room, center, cfg.wall_margin));
  if (!(d_hi >= cfg.d_min)) {
    throw SamplerError("no admissible source distance from this placement");
  }

  Vec3 source_pos;
  bool placed = false;
  double distance = 0.0;
  for (int redraw = 0; redraw < cfg.max_distance_redraws && !placed; ++redraw) {
    distance = d_hi == cfg.d_min ? cfg.d_min : rng.uniform(cfg.d_min, d_hi);
    const double doa = rng.uniform(0.0, 2.0 * kPi);
    for (int step = 0; step < 360; ++step) {
      const double angle = doa + deg2rad(static_cast<double>(step));
      const Vec3 candidate{center.x + distance * std::cos(angle),
                           center.y + distance * std::sin(angle), center.z};
      if (detail::inside_margins(room, candidate, cfg.wall_margin, cfg.vertical_margin)) {
        source_pos = candidate;
        placed = true;
        break;
      }
    }
  }
  if (!placed) {
    throw SamplerError("no feasible source direction after the configured redraws");
  }

  const double az_offset = deg2rad(cfg.look_azimuth_deg.draw(rng));
  const double elevation = deg2rad(cfg.look_elevation_deg.draw(rng));
  const double los = std::atan2(center.y - source_pos.y, center.x - source_pos.x);

  Source source;
  source.position = source_pos;
  source.look_azimuth = los + az_offset;
  source.look_elevation = elevation;
  source.pattern = cfg.source_pattern;
  return Scene::make(room, source, mics);
}

// Builds one dataset record from scratch: the room is derived from the room
// index alone (all constellations of a room share it), the scene and the
// synthesis streams from (room, constellation, attempt). Scenes whose DRR
// target is unreachable are redrawn with the attempt counter bumped, so a
// record never silently disappears and parallel generation order does not
// matter.
inline DatasetRecord generate_record(const SamplerConfig& cfg, const SynthConfig& synth_cfg,
                                     int room_index, int constellation_index) {
  const auto ri = static_cast<std::uint64_t>(room_index);
  const auto ci = static_cast<std::uint64_t>(constellation_index);
  RandomStream room_rng(derive_seed(cfg.seed, {stream::room, ri}));
  const Room room = sample_room(cfg, room_rng);

  std::string last_error;
  for (int attempt = 0; attempt < cfg.max_scene_attempts; ++attempt) {
    const auto a = static_cast<std::uint64_t>(attempt);
    RandomStream scene_rng(derive_seed(cfg.seed, {stream::scene, ri, ci, a}));
    RandomStream synth_rng(derive_seed(cfg.seed, {stream::synth, ri, ci, a}));
    try {
      const Scene scene = sample_constellation(room, cfg, scene_rng);
      DatasetRecord rec{room_index,
                        constellation_index,
                        attempt + 1,
                        scene,
                        synthesize(scene, synth_cfg, synth_rng),
                        scene.d,
                        distance_to_class(scene.d)};
      return rec;
    } catch (const InfeasibleDrrError& e) {
      last_error = e.what();
    } catch (const SamplerError& e) {
      last_error = e.what();
    }
  }
  throw SamplerError("record (" + std::to_string(room_index) + ", " +
                     std::to_string(constellation_index) + ") found no feasible scene in " +
                     std::to_string(cfg.max_scene_attempts) + " attempts; last error: " +
                     last_error);
}

// Serial rooms-by-constellations sweep feeding each record to the sink.
// Returns the number of records produced.
template <typename Sink>
inline long generate_dataset(const SamplerConfig& cfg, const SynthConfig& synth_cfg, Sink&& sink) {
  cfg.validate();
  synth_cfg.validate();
  long count = 0;
  for (int ri = 0; ri < cfg.rooms; ++ri) {
    for (int ci = 0; ci < cfg.constellations_per_room; ++ci) {
      sink(generate_record(cfg, synth_cfg, ri, ci));
      ++count;
    }
  }
  return count;
}

}  // namespace rirsynth
