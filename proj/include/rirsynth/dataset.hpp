#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rirsynth/core.hpp"
#include "rirsynth/errors.hpp"
#include "rirsynth/sampler.hpp"
#include "rirsynth/synth.hpp"

namespace rirsynth {

inline constexpr const char* kVersion = "0.1.0";

// Relative directory of one record inside a dataset root.
inline std::string record_rel_dir(int room_index, int constellation_index) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "room_%05d/const_%02d", room_index, constellation_index);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline std::string file_checksum_hex(const std::string& path) {
  return fnv1a64_hex(read_file_bytes(path));
}

// ---- JSON helpers -------------------------------------------------------
// Config parsing is strict: unknown or mistyped fields fail with the field
// path so typos never silently fall back to defaults.

namespace detail {

inline std::string join_field(const std::string& scope, const std::string& key) {
  return scope.empty() ? key : scope + "." + key;
}

inline void require_object(const nlohmann::json& j, const std::string& scope) {
  if (!j.is_object()) throw ConfigError(scope.empty() ? "<root>" : scope, "must be an object");
}

inline void reject_unknown_keys(const nlohmann::json& obj, const std::string& scope,
                                std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError(join_field(scope, key), "unknown field");
  }
}

inline double get_double(const nlohmann::json& obj, const std::string& scope, const char* key,
                         double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join_field(scope, key), "must be a number");
  return v.get<double>();
}

inline int get_int(const nlohmann::json& obj, const std::string& scope, const char* key,
                   int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join_field(scope, key), "must be an integer");
  return v.get<int>();
}

inline std::uint64_t get_u64(const nlohmann::json& obj, const std::string& scope, const char* key,
                             std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                 !v.is_number_unsigned())) {
    throw ConfigError(join_field(scope, key), "must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline bool get_bool(const nlohmann::json& obj, const std::string& scope, const char* key,
                     bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join_field(scope, key), "must be a boolean");
  return v.get<bool>();
}

inline std::string get_string(const nlohmann::json& obj, const std::string& scope,
                              const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join_field(scope, key), "must be a string");
  return v.get<std::string>();
}

inline Interval get_interval(const nlohmann::json& obj, const std::string& scope, const char* key,
                             Interval fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(join_field(scope, key), "must be a [min, max] number pair");
  }
  return Interval{v[0].get<double>(), v[1].get<double>()};
}

}  // namespace detail

inline nlohmann::json interval_to_json(const Interval& iv) {
  return nlohmann::json::array({iv.lo, iv.hi});
}

inline nlohmann::json vec3_to_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

inline Vec3 vec3_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number()) {
    throw ConfigError(field, "must be an [x, y, z] number triple");
  }
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline SamplerConfig sampler_config_from_json(const nlohmann::json& j,
                                              const std::string& scope = "sampler") {
  detail::require_object(j, scope);
  detail::reject_unknown_keys(
      j, scope,
      {"rooms", "constellations_per_room", "room_length", "room_width", "ceiling", "t60",
       "mic_spacing", "d_min", "d_max", "wall_margin", "vertical_margin", "look_azimuth_deg",
       "look_elevation_deg", "source_pattern", "seed", "max_distance_redraws",
       "max_scene_attempts"});
  SamplerConfig cfg;
  cfg.rooms = detail::get_int(j, scope, "rooms", cfg.rooms);
  cfg.constellations_per_room =
      detail::get_int(j, scope, "constellations_per_room", cfg.constellations_per_room);
  cfg.room_length = detail::get_interval(j, scope, "room_length", cfg.room_length);
  cfg.room_width = detail::get_interval(j, scope, "room_width", cfg.room_width);
  cfg.ceiling = detail::get_interval(j, scope, "ceiling", cfg.ceiling);
  cfg.t60 = detail::get_interval(j, scope, "t60", cfg.t60);
  cfg.mic_spacing = detail::get_double(j, scope, "mic_spacing", cfg.mic_spacing);
  cfg.d_min = detail::get_double(j, scope, "d_min", cfg.d_min);
  cfg.d_max = detail::get_double(j, scope, "d_max", cfg.d_max);
  cfg.wall_margin = detail::get_double(j, scope, "wall_margin", cfg.wall_margin);
  cfg.vertical_margin = detail::get_double(j, scope, "vertical_margin", cfg.vertical_margin);
  cfg.look_azimuth_deg = detail::get_interval(j, scope, "look_azimuth_deg", cfg.look_azimuth_deg);
  cfg.look_elevation_deg =
      detail::get_interval(j, scope, "look_elevation_deg", cfg.look_elevation_deg);
  if (j.contains("source_pattern")) {
    try {
      cfg.source_pattern = DirectivityPattern::from_name(
          detail::get_string(j, scope, "source_pattern", cfg.source_pattern.name()));
    } catch (const InvalidParameterError& e) {
      throw ConfigError(detail::join_field(scope, "source_pattern"), e.what());
    }
  }
  cfg.seed = detail::get_u64(j, scope, "seed", cfg.seed);
  cfg.max_distance_redraws =
      detail::get_int(j, scope, "max_distance_redraws", cfg.max_distance_redraws);
  cfg.max_scene_attempts = detail::get_int(j, scope, "max_scene_attempts", cfg.max_scene_attempts);
  cfg.validate();
  return cfg;
}

inline nlohmann::json sampler_config_to_json(const SamplerConfig& cfg) {
  nlohmann::json j;
  j["rooms"] = cfg.rooms;
  j["constellations_per_room"] = cfg.constellations_per_room;
  j["room_length"] = interval_to_json(cfg.room_length);
  j["room_width"] = interval_to_json(cfg.room_width);
  j["ceiling"] = interval_to_json(cfg.ceiling);
  j["t60"] = interval_to_json(cfg.t60);
  j["mic_spacing"] = cfg.mic_spacing;
  j["d_min"] = cfg.d_min;
  j["d_max"] = cfg.d_max;
  j["wall_margin"] = cfg.wall_margin;
  j["vertical_margin"] = cfg.vertical_margin;
  j["look_azimuth_deg"] = interval_to_json(cfg.look_azimuth_deg);
  j["look_elevation_deg"] = interval_to_json(cfg.look_elevation_deg);
  j["source_pattern"] = cfg.source_pattern.name();
  j["seed"] = cfg.seed;
  j["max_distance_redraws"] = cfg.max_distance_redraws;
  j["max_scene_attempts"] = cfg.max_scene_attempts;
  return j;
}

inline SynthConfig synth_config_from_json(const nlohmann::json& j,
                                          const std::string& scope = "synth") {
  detail::require_object(j, scope);
  detail::reject_unknown_keys(j, scope,
                              {"sample_rate", "n_samples", "image_order", "kappa", "drr_window",
                               "speed_of_sound", "highpass_cutoff", "highpass_enabled", "alpha",
                               "mic_directivity_factor", "tail_solve"});
  SynthConfig cfg;
  cfg.sample_rate = detail::get_double(j, scope, "sample_rate", cfg.sample_rate);
  cfg.n_samples = detail::get_int(j, scope, "n_samples", cfg.n_samples);
  cfg.image_order = detail::get_int(j, scope, "image_order", cfg.image_order);
  cfg.kappa = detail::get_double(j, scope, "kappa", cfg.kappa);
  cfg.drr_window = detail::get_int(j, scope, "drr_window", cfg.drr_window);
  cfg.speed_of_sound = detail::get_double(j, scope, "speed_of_sound", cfg.speed_of_sound);
  cfg.highpass_cutoff = detail::get_double(j, scope, "highpass_cutoff", cfg.highpass_cutoff);
  cfg.highpass_enabled = detail::get_bool(j, scope, "highpass_enabled", cfg.highpass_enabled);
  const Interval alpha = detail::get_interval(j, scope, "alpha", {cfg.alpha_min, cfg.alpha_max});
  cfg.alpha_min = alpha.lo;
  cfg.alpha_max = alpha.hi;
  cfg.mic_directivity_factor =
      detail::get_double(j, scope, "mic_directivity_factor", cfg.mic_directivity_factor);
  const std::string solve = detail::get_string(j, scope, "tail_solve", "realization");
  if (solve == "realization") {
    cfg.tail_solve = TailSolve::realization;
  } else if (solve == "expectation") {
    cfg.tail_solve = TailSolve::expectation;
  } else {
    throw ConfigError(detail::join_field(scope, "tail_solve"),
                      "must be 'realization' or 'expectation'");
  }
  try {
    cfg.validate();
  } catch (const InvalidParameterError& e) {
    throw ConfigError(scope, e.what());
  }
  return cfg;
}

inline nlohmann::json synth_config_to_json(const SynthConfig& cfg) {
  nlohmann::json j;
  j["sample_rate"] = cfg.sample_rate;
  j["n_samples"] = cfg.n_samples;
  j["image_order"] = cfg.image_order;
  j["kappa"] = cfg.kappa;
  j["drr_window"] = cfg.drr_window;
  j["speed_of_sound"] = cfg.speed_of_sound;
  j["highpass_cutoff"] = cfg.highpass_cutoff;
  j["highpass_enabled"] = cfg.highpass_enabled;
  j["alpha"] = nlohmann::json::array({cfg.alpha_min, cfg.alpha_max});
  j["mic_directivity_factor"] = cfg.mic_directivity_factor;
  j["tail_solve"] = cfg.tail_solve == TailSolve::realization ? "realization" : "expectation";
  return j;
}

struct FullConfig {
  SamplerConfig sampler;
  SynthConfig synth;
};

inline FullConfig full_config_from_json(const nlohmann::json& j) {
  detail::require_object(j, "");
  detail::reject_unknown_keys(j, "", {"sampler", "synth"});
  FullConfig cfg;
  if (j.contains("sampler")) cfg.sampler = sampler_config_from_json(j.at("sampler"));
  if (j.contains("synth")) cfg.synth = synth_config_from_json(j.at("synth"));
  cfg.sampler.validate();
  cfg.synth.validate();
  return cfg;
}

inline nlohmann::json full_config_to_json(const FullConfig& cfg) {
  nlohmann::json j;
  j["sampler"] = sampler_config_to_json(cfg.sampler);
  j["synth"] = synth_config_to_json(cfg.synth);
  return j;
}

// ---- record metadata ----------------------------------------------------

inline nlohmann::json room_to_json(const Room& room) {
  nlohmann::json j;
  j["length"] = room.length;
  j["width"] = room.width;
  j["height"] = room.height;
  j["t60"] = room.t60;
  return j;
}

inline nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json j;
  j["room"] = room_to_json(scene.room);
  j["source"] = {{"position", vec3_to_json(scene.source.position)},
                 {"look_azimuth_deg", rad2deg(scene.source.look_azimuth)},
                 {"look_elevation_deg", rad2deg(scene.source.look_elevation)},
                 {"pattern", scene.source.pattern.name()}};
  j["mics"] = {{"positions", nlohmann::json::array({vec3_to_json(scene.mics.positions[0]),
                                                    vec3_to_json(scene.mics.positions[1])})},
               {"orientation_deg", rad2deg(scene.mics.orientation)},
               {"spacing", scene.mics.spacing()}};
  j["distance"] = scene.d;
  return j;
}

inline nlohmann::json rir_meta_to_json(const Rir& rir, const std::string& wav_rel_path) {
  nlohmann::json j;
  j["mic_index"] = rir.mic_index;
  j["wav"] = wav_rel_path;
  j["n_d"] = rir.n_d;
  j["sample_rate"] = rir.sample_rate;
  j["n_samples"] = static_cast<std::uint64_t>(rir.samples.size());
  j["method"] = synth_method_name(rir.method);
  j["target_drr"] = rir.target_drr;
  j["measured_drr"] = rir.measured_drr;  // serialized as null when infinite
  j["alpha"] = rir.alpha;
  j["critical_distance"] = rir.critical_distance;
  j["directional_response"] = rir.directional_response;
  j["distance"] = rir.distance;
  j["tail_scale"] = rir.tail_scale;
  j["seed"] = rir.seed;
  j["truncated"] = rir.truncated;
  return j;
}

inline nlohmann::json record_meta_to_json(const DatasetRecord& rec) {
  const std::string dir = record_rel_dir(rec.room_index, rec.constellation_index);
  nlohmann::json j;
  j["record"] = dir;
  j["room_index"] = rec.room_index;
  j["constellation_index"] = rec.constellation_index;
  j["attempts"] = rec.attempts;
  j["scene"] = scene_to_json(rec.scene);
  j["distance"] = rec.distance;
  j["class_label"] = rec.class_label;
  j["rirs"] = nlohmann::json::array({rir_meta_to_json(rec.rirs[0], dir + "/mic0.wav"),
                                     rir_meta_to_json(rec.rirs[1], dir + "/mic1.wav")});
  return j;
}

}  // namespace rirsynth
