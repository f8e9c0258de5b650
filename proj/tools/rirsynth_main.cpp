#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rirsynth/rirsynth.hpp"

namespace fs = std::filesystem;
using namespace rirsynth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerifyFail = 4;
constexpr int kExitIo = 5;

int default_workers() {
  if (const char* env = std::getenv("RIRSYNTH_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

nlohmann::json parse_json_file(const std::string& path) {
  const std::string text = read_file_bytes(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path, "file is not valid JSON");
  return j;
}

// ---- generate -----------------------------------------------------------

struct GenerateOptions {
  std::string config_path;
  std::string manifest_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int workers = default_workers();
  bool resume = true;
};

struct RecordOutput {
  std::string line;         // metadata JSON, one line
  std::string checksum0;    // mic0.wav
  std::string checksum1;    // mic1.wav
  bool reused = false;
};

FullConfig load_generate_config(const GenerateOptions& opt) {
  if (!opt.config_path.empty() && !opt.manifest_path.empty()) {
    throw ConfigError("config", "give either --config or --from-manifest, not both");
  }
  if (opt.config_path.empty() && opt.manifest_path.empty()) {
    throw ConfigError("config", "one of --config or --from-manifest is required");
  }
  FullConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = full_config_from_json(parse_json_file(opt.config_path));
  } else {
    const nlohmann::json manifest = parse_json_file(opt.manifest_path);
    if (!manifest.contains("config")) {
      throw ConfigError("config", "manifest '" + opt.manifest_path + "' has no config block");
    }
    cfg = full_config_from_json(manifest.at("config"));
    if (manifest.contains("seed")) cfg.sampler.seed = manifest.at("seed").get<std::uint64_t>();
  }
  if (opt.seed) cfg.sampler.seed = *opt.seed;
  return cfg;
}

RecordOutput produce_record(const FullConfig& cfg, const std::string& out_dir, int ri, int ci,
                            bool resume) {
  const std::string rel = record_rel_dir(ri, ci);
  const fs::path dir = fs::path(out_dir) / rel;
  const fs::path wav0 = dir / "mic0.wav";
  const fs::path wav1 = dir / "mic1.wav";
  const fs::path meta = dir / "record.json";

  RecordOutput out;
  if (resume && fs::exists(wav0) && fs::exists(wav1) && fs::exists(meta)) {
    out.line = read_file_bytes(meta.string());
    while (!out.line.empty() && (out.line.back() == '\n' || out.line.back() == '\r')) {
      out.line.pop_back();
    }
    out.reused = true;
  } else {
    const DatasetRecord rec = generate_record(cfg.sampler, cfg.synth, ri, ci);
    fs::create_directories(dir);
    write_wav_float32(wav0.string(), {rec.rirs[0].samples}, cfg.synth.sample_rate);
    write_wav_float32(wav1.string(), {rec.rirs[1].samples}, cfg.synth.sample_rate);
    out.line = record_meta_to_json(rec).dump();
    write_text_file(meta.string(), out.line + "\n");
  }
  out.checksum0 = file_checksum_hex(wav0.string());
  out.checksum1 = file_checksum_hex(wav1.string());
  return out;
}

int run_generate(const GenerateOptions& opt) {
  const FullConfig cfg = load_generate_config(opt);
  const long total = static_cast<long>(cfg.sampler.rooms) * cfg.sampler.constellations_per_room;
  fs::create_directories(opt.out_dir);

  std::vector<RecordOutput> outputs(static_cast<std::size_t>(total));
  std::atomic<long> next{0};
  std::atomic<long> done{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  const auto t0 = std::chrono::steady_clock::now();
  const int workers = std::max(1, opt.workers);
  auto work = [&]() {
    for (;;) {
      if (first_error) return;
      const long i = next.fetch_add(1);
      if (i >= total) return;
      const int ri = static_cast<int>(i / cfg.sampler.constellations_per_room);
      const int ci = static_cast<int>(i % cfg.sampler.constellations_per_room);
      try {
        outputs[static_cast<std::size_t>(i)] =
            produce_record(cfg, opt.out_dir, ri, ci, opt.resume);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      const long d = done.fetch_add(1) + 1;
      if (d % 500 == 0) std::cerr << "generated " << d << "/" << total << " records\n";
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::string metadata;
  nlohmann::json records = nlohmann::json::array();
  long reused = 0;
  for (long i = 0; i < total; ++i) {
    const auto& out = outputs[static_cast<std::size_t>(i)];
    metadata += out.line;
    metadata += '\n';
    const int ri = static_cast<int>(i / cfg.sampler.constellations_per_room);
    const int ci = static_cast<int>(i % cfg.sampler.constellations_per_room);
    records.push_back({{"record", record_rel_dir(ri, ci)},
                       {"mic0", out.checksum0},
                       {"mic1", out.checksum1}});
    if (out.reused) ++reused;
  }
  const fs::path metadata_path = fs::path(opt.out_dir) / "metadata.jsonl";
  write_text_file(metadata_path.string(), metadata);

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = cfg.sampler.seed;
  manifest["config"] = full_config_to_json(cfg);
  manifest["record_count"] = total;
  manifest["records"] = std::move(records);
  manifest["metadata_checksum"] = fnv1a64_hex(metadata);
  write_text_file((fs::path(opt.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");

  const auto t1 = std::chrono::steady_clock::now();
  const double secs = std::chrono::duration<double>(t1 - t0).count();
  std::cout << "wrote " << total << " records (" << 2 * total << " RIRs, " << reused
            << " reused) to " << opt.out_dir << " in " << secs << " s";
  if (secs > 0.0 && reused == 0) {
    std::cout << " (" << static_cast<long>(2.0 * static_cast<double>(total) / secs)
              << " RIRs/s across " << workers << " workers)";
  }
  std::cout << "\n";
  return kExitOk;
}

// ---- synth --------------------------------------------------------------

struct SynthOptions {
  double length = 6.0, width = 5.0, height = 2.8, t60 = 0.5;
  std::vector<double> source{2.0, 3.0, 1.2};
  double look_az_deg = 0.0, look_el_deg = 0.0;
  std::string pattern = "cardioid";
  std::vector<double> mic_center{4.0, 3.0, 1.2};
  double mic_orientation_deg = 0.0;
  double mic_spacing = 0.08;
  std::string method = "hybrid";
  std::string aug_mode = "match_target";
  int order = -1;
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out_path;
};

int run_synth(const SynthOptions& opt) {
  SynthConfig cfg;
  if (!opt.config_path.empty()) {
    const nlohmann::json j = parse_json_file(opt.config_path);
    if (j.contains("synth")) cfg = synth_config_from_json(j.at("synth"));
  }
  const int order = opt.order >= 0 ? opt.order : cfg.image_order;

  const Room room(opt.length, opt.width, opt.height, opt.t60);
  Source source;
  source.position = {opt.source[0], opt.source[1], opt.source[2]};
  source.look_azimuth = deg2rad(opt.look_az_deg);
  source.look_elevation = deg2rad(opt.look_el_deg);
  source.pattern = DirectivityPattern::from_name(opt.pattern);
  const MicPair mics =
      MicPair::from_center({opt.mic_center[0], opt.mic_center[1], opt.mic_center[2]},
                           deg2rad(opt.mic_orientation_deg), opt.mic_spacing);
  const Scene scene = Scene::make(room, source, mics);

  std::array<Rir, 2> rirs;
  if (opt.method == "hybrid" || opt.method == "proposed") {
    // The directivity-factor draw can ask for more DRR than the scene's
    // reflections allow; redraw it like dataset generation does, and only
    // surface the infeasibility once the attempts are spent.
    constexpr int kAttempts = 32;
    for (int attempt = 0;; ++attempt) {
      RandomStream rng(
          derive_seed(opt.seed, {stream::synth, static_cast<std::uint64_t>(attempt)}));
      try {
        rirs = synthesize(scene, cfg, rng);
        break;
      } catch (const InfeasibleDrrError&) {
        if (attempt + 1 == kAttempts) throw;
      }
    }
  } else if (opt.method == "ism") {
    rirs = synthesize_ism_only(scene, cfg, order);
  } else if (opt.method == "drr-aug") {
    RandomStream rng(derive_seed(opt.seed, {stream::synth, 0}));
    rirs = synthesize_ism_only(scene, cfg, order);
    DrrAugmentMode mode;
    if (opt.aug_mode == "random_scale") {
      mode = DrrAugmentMode::random_scale;
    } else if (opt.aug_mode == "match_target") {
      mode = DrrAugmentMode::match_target;
    } else {
      throw ConfigError("aug-mode", "must be random_scale or match_target");
    }
    for (auto& rir : rirs) {
      rir = drr_augment(rir, scene, mode, cfg, rng).rir;
    }
  } else {
    throw ConfigError("method", "must be hybrid (alias proposed), ism, or drr-aug");
  }

  write_wav_float32(opt.out_path, {rirs[0].samples, rirs[1].samples}, cfg.sample_rate);

  nlohmann::json meta;
  meta["scene"] = scene_to_json(scene);
  meta["rirs"] = nlohmann::json::array(
      {rir_meta_to_json(rirs[0], opt.out_path), rir_meta_to_json(rirs[1], opt.out_path)});
  meta["seed"] = opt.seed;
  std::cout << meta.dump(2) << "\n";
  return kExitOk;
}

// ---- verify -------------------------------------------------------------

struct VerifyOptions {
  std::string path;
  double drr_tolerance = 1e-4;  // float32 storage headroom on top of the 1e-6 solve
  bool quiet = false;
};

struct VerifyStats {
  long records = 0;
  long drr_checked = 0;
  long drr_failed = 0;
  long nd_failed = 0;
  long class_failed = 0;
  std::vector<double> t60_rel_errors;
};

void verify_record(const nlohmann::json& rec, const fs::path& root, const VerifyOptions& opt,
                   VerifyStats& stats, std::ostream& log) {
  const std::string id = rec.at("record").get<std::string>();
  const auto& scene = rec.at("scene");
  const Vec3 src = vec3_from_json(scene.at("source").at("position"), "source.position");
  const double room_t60 = scene.at("room").at("t60").get<double>();
  const double distance = rec.at("distance").get<double>();
  const int class_label = rec.at("class_label").get<int>();

  if (class_label != distance_to_class(distance)) {
    ++stats.class_failed;
    log << id << ": class label " << class_label << " does not match distance " << distance
        << "\n";
  }

  int mic_idx = 0;
  for (const auto& rir_meta : rec.at("rirs")) {
    const std::string wav_rel = rir_meta.at("wav").get<std::string>();
    const WavData wav = read_wav((root / wav_rel).string());
    if (wav.channels.empty() || wav.channels[0].empty()) {
      throw AudioError("'" + wav_rel + "' carries no samples");
    }
    const std::vector<double>& h = wav.channels[0];
    const double fs = wav.sample_rate;
    const int n_d = rir_meta.at("n_d").get<int>();
    const Vec3 mic = vec3_from_json(
        scene.at("mics").at("positions").at(static_cast<std::size_t>(mic_idx)),
        "mics.positions");

    const double c = 343.0;
    const int expected_nd = static_cast<int>(std::lround((mic - src).norm() * fs / c));
    if (expected_nd != n_d) {
      ++stats.nd_failed;
      log << id << " mic" << mic_idx << ": stored n_d " << n_d << " but geometry gives "
          << expected_nd << "\n";
    }

    const std::string method = rir_meta.at("method").get<std::string>();
    if (method == "hybrid" || method == "drr_augmented") {
      const double target = rir_meta.at("target_drr").get<double>();
      const double measured = measure_drr(h, n_d, 40);
      ++stats.drr_checked;
      const double rel = std::abs(measured / target - 1.0);
      if (!(rel < opt.drr_tolerance)) {
        ++stats.drr_failed;
        log << id << " mic" << mic_idx << ": measured DRR " << measured << " vs target "
            << target << " (rel err " << rel << ")\n";
      }
    }

    if (mic_idx == 0) {
      try {
        const T60Estimate est = estimate_t60(h, fs);
        stats.t60_rel_errors.push_back(std::abs(est.t60 / room_t60 - 1.0));
      } catch (const AnalysisError&) {
        // Reported as coverage below; a missing decay range is not a hard failure.
      }
    }
    ++mic_idx;
  }
  ++stats.records;
}

int run_verify(const VerifyOptions& opt) {
  const fs::path root(opt.path);
  std::vector<std::string> lines;

  fs::path base = root;
  if (fs::is_directory(root)) {
    const fs::path metadata = root / "metadata.jsonl";
    const fs::path single = root / "record.json";
    fs::path source_file;
    if (fs::exists(metadata)) {
      source_file = metadata;
    } else if (fs::exists(single)) {
      source_file = single;
      base = root.parent_path().parent_path();  // record dirs sit two levels down
    } else {
      throw IoError("no records found under '" + opt.path +
                    "' (expected metadata.jsonl or record.json)");
    }
    std::string text = read_file_bytes(source_file.string());
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string::npos) eol = text.size();
      if (eol > pos) lines.push_back(text.substr(pos, eol - pos));
      pos = eol + 1;
    }
  } else {
    throw IoError("'" + opt.path + "' is not a dataset directory");
  }
  if (lines.empty()) throw IoError("no records found under '" + opt.path + "'");

  VerifyStats stats;
  std::ostream& log = std::cout;
  for (const auto& line : lines) {
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded()) throw IoError("metadata line is not valid JSON");
    verify_record(rec, base, opt, stats, log);
  }

  double t60_median = 0.0;
  if (!stats.t60_rel_errors.empty()) {
    std::vector<double> errs = stats.t60_rel_errors;
    std::nth_element(errs.begin(), errs.begin() + static_cast<long>(errs.size() / 2), errs.end());
    t60_median = errs[errs.size() / 2];
  }

  log << "verified " << stats.records << " records: DRR " << (stats.drr_checked - stats.drr_failed)
      << "/" << stats.drr_checked << " within " << opt.drr_tolerance << ", n_d mismatches "
      << stats.nd_failed << ", class mismatches " << stats.class_failed
      << ", median T60 rel err "
      << (stats.t60_rel_errors.empty() ? std::string("n/a") : std::to_string(t60_median))
      << " (" << stats.t60_rel_errors.size() << " measurable)\n";

  const bool failed = stats.drr_failed > 0 || stats.nd_failed > 0 || stats.class_failed > 0;
  return failed ? kExitVerifyFail : kExitOk;
}

// ---- features -----------------------------------------------------------

struct FeaturesOptions {
  std::string dataset_dir;
  std::string clips_path;
  std::string out_dir;
  double snr_min = 40.0, snr_max = 60.0;
  double duration_s = 1.0;
  std::uint64_t seed = 0;
};

std::vector<std::string> collect_clips(const std::string& path) {
  std::vector<std::string> clips;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".wav") {
        clips.push_back(entry.path().string());
      }
    }
    std::sort(clips.begin(), clips.end());
  } else if (fs::exists(path)) {
    clips.push_back(path);
  }
  if (clips.empty()) throw IoError("no clips found at '" + path + "'");
  return clips;
}

std::string feature_basename(int ri, int ci) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "room_%05d_const_%02d", ri, ci);
  return buf;
}

int run_features(const FeaturesOptions& opt) {
  if (!(opt.snr_min <= opt.snr_max)) throw ConfigError("snr", "min exceeds max");
  const fs::path root(opt.dataset_dir);
  const fs::path metadata = root / "metadata.jsonl";
  if (!fs::exists(metadata)) {
    throw IoError("no records found under '" + opt.dataset_dir + "' (expected metadata.jsonl)");
  }
  const std::vector<std::string> clips = collect_clips(opt.clips_path);
  fs::create_directories(opt.out_dir);

  const std::string text = read_file_bytes(metadata.string());
  std::string labels;
  long produced = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    if (eol == pos) {
      pos = eol + 1;
      continue;
    }
    nlohmann::json rec = nlohmann::json::parse(text.substr(pos, eol - pos), nullptr, false);
    pos = eol + 1;
    if (rec.is_discarded()) throw IoError("metadata line is not valid JSON");

    const int ri = rec.at("room_index").get<int>();
    const int ci = rec.at("constellation_index").get<int>();
    RandomStream rng(derive_seed(opt.seed, {stream::render, static_cast<std::uint64_t>(ri),
                                            static_cast<std::uint64_t>(ci)}));
    const std::string& clip_path = clips[rng.index(clips.size())];
    const double snr_db = rng.uniform(opt.snr_min, opt.snr_max);

    const WavData clip_wav = read_wav(clip_path);
    if (clip_wav.channels.empty()) throw AudioError("'" + clip_path + "' carries no samples");
    AudioClip clip{clip_wav.channels[0], clip_wav.sample_rate};

    std::array<Rir, 2> rirs;
    int mic_idx = 0;
    for (const auto& rir_meta : rec.at("rirs")) {
      const WavData wav = read_wav((root / rir_meta.at("wav").get<std::string>()).string());
      rirs[static_cast<std::size_t>(mic_idx)].samples = wav.channels.at(0);
      rirs[static_cast<std::size_t>(mic_idx)].sample_rate = wav.sample_rate;
      if (clip.sample_rate != wav.sample_rate) {
        throw AudioError("clip rate " + std::to_string(clip.sample_rate) +
                         " Hz does not match dataset rate " + std::to_string(wav.sample_rate) +
                         " Hz");
      }
      ++mic_idx;
    }

    const RenderedPair rendered = render_mics(rirs, clip, snr_db, opt.duration_s, rng);
    const FeatureTensor tensor = stft_features(rendered.clips);

    const std::string stem = feature_basename(ri, ci);
    const fs::path signals_path = fs::path(opt.out_dir) / (stem + ".signals.wav");
    write_wav_float32(signals_path.string(),
                      {rendered.clips[0].samples, rendered.clips[1].samples},
                      clip.sample_rate);

    std::string bin;
    bin.reserve(tensor.values.size() * 4);
    for (double v : tensor.values) {
      detail::put_u32(bin, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    const fs::path bin_path = fs::path(opt.out_dir) / (stem + ".features.bin");
    write_text_file(bin_path.string(), bin);

    nlohmann::json sidecar;
    sidecar["axes"] = {"channel_feature", "frame", "bin"};
    sidecar["shape"] = {tensor.planes, tensor.frames, tensor.bins};
    sidecar["planes"] = {"mic0_magnitude", "mic0_sin_phase", "mic0_cos_phase",
                         "mic1_magnitude", "mic1_sin_phase", "mic1_cos_phase"};
    sidecar["dtype"] = "float32_le";
    sidecar["sample_rate"] = tensor.sample_rate;
    sidecar["win"] = tensor.win;
    sidecar["hop"] = tensor.hop;
    sidecar["nfft"] = tensor.nfft;
    sidecar["snr_db"] = snr_db;
    sidecar["clip"] = clip_path;
    sidecar["checksum"] = fnv1a64_hex(bin);
    write_text_file((fs::path(opt.out_dir) / (stem + ".features.json")).string(),
                    sidecar.dump(2) + "\n");

    nlohmann::json label;
    label["record"] = rec.at("record");
    label["class_label"] = rec.at("class_label");
    label["distance"] = rec.at("distance");
    label["features"] = stem + ".features.bin";
    label["signals"] = stem + ".signals.wav";
    labels += label.dump();
    labels += '\n';
    ++produced;
  }
  if (produced == 0) throw IoError("no records found under '" + opt.dataset_dir + "'");

  write_text_file((fs::path(opt.out_dir) / "labels.jsonl").string(), labels);
  std::cout << "rendered " << produced << " records to " << opt.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Room impulse response synthesis toolkit"};
  app.require_subcommand(1);

  GenerateOptions gen;
  CLI::App* cmd_gen = app.add_subcommand("generate", "Generate a RIR dataset from a config");
  cmd_gen->add_option("--config", gen.config_path, "JSON config file");
  cmd_gen->add_option("--from-manifest", gen.manifest_path, "Reproduce from a manifest.json");
  cmd_gen->add_option("--out", gen.out_dir, "Output directory")->required();
  std::uint64_t gen_seed = 0;
  CLI::Option* gen_seed_opt = cmd_gen->add_option("--seed", gen_seed, "Master seed override");
  cmd_gen->add_option("--workers", gen.workers, "Worker thread count")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_flag("!--no-resume", gen.resume, "Regenerate records even if files exist");

  SynthOptions synth;
  CLI::App* cmd_synth = app.add_subcommand("synth", "Synthesize one scene to a stereo WAV");
  cmd_synth->add_option("--length", synth.length, "Room x extent, m");
  cmd_synth->add_option("--width", synth.width, "Room y extent, m");
  cmd_synth->add_option("--height", synth.height, "Room z extent, m");
  cmd_synth->add_option("--t60", synth.t60, "Reverberation time, s");
  cmd_synth->add_option("--source", synth.source, "Source position x y z")->expected(3);
  cmd_synth->add_option("--look-az", synth.look_az_deg, "Source look azimuth, deg");
  cmd_synth->add_option("--look-el", synth.look_el_deg, "Source look elevation, deg");
  cmd_synth->add_option("--pattern", synth.pattern, "Source directivity pattern");
  cmd_synth->add_option("--mic-center", synth.mic_center, "Pair center x y z")->expected(3);
  cmd_synth->add_option("--mic-orientation", synth.mic_orientation_deg, "Pair axis azimuth, deg");
  cmd_synth->add_option("--mic-spacing", synth.mic_spacing, "Microphone spacing, m");
  cmd_synth->add_option("--method", synth.method, "hybrid (alias proposed), ism, or drr-aug");
  cmd_synth->add_option("--aug-mode", synth.aug_mode, "random_scale or match_target");
  cmd_synth->add_option("--order", synth.order, "Image order for ism/drr-aug");
  cmd_synth->add_option("--seed", synth.seed, "Seed");
  cmd_synth->add_option("--config", synth.config_path, "JSON config file (synth block)");
  cmd_synth->add_option("--out", synth.out_path, "Output WAV path")->required();

  VerifyOptions verify;
  CLI::App* cmd_verify = app.add_subcommand("verify", "Check a dataset against its metadata");
  cmd_verify->add_option("path", verify.path, "Dataset directory")->required();
  cmd_verify->add_option("--drr-tolerance", verify.drr_tolerance, "Relative DRR tolerance");

  FeaturesOptions features;
  CLI::App* cmd_features =
      app.add_subcommand("features", "Render microphone signals and STFT features");
  cmd_features->add_option("--dataset", features.dataset_dir, "Dataset directory")->required();
  cmd_features->add_option("--clips", features.clips_path, "Clip WAV file or directory")
      ->required();
  cmd_features->add_option("--out", features.out_dir, "Output directory")->required();
  cmd_features->add_option("--snr-min", features.snr_min, "Lowest SNR, dB");
  cmd_features->add_option("--snr-max", features.snr_max, "Highest SNR, dB");
  cmd_features->add_option("--duration", features.duration_s, "Rendered length, s");
  cmd_features->add_option("--seed", features.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cmd_gen->parsed()) {
      if (gen_seed_opt->count() > 0) gen.seed = gen_seed;
      return run_generate(gen);
    }
    if (cmd_synth->parsed()) return run_synth(synth);
    if (cmd_verify->parsed()) return run_verify(verify);
    if (cmd_features->parsed()) return run_features(features);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleDrrError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InfeasibleRoomError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const SamplerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const AudioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
