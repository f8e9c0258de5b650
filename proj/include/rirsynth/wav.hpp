#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "rirsynth/errors.hpp"

namespace rirsynth {

struct WavData {
  std::vector<std::vector<double>> channels;
  double sample_rate = 0.0;
};

namespace detail {

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

// Writes an interleaved 32-bit-float WAV file, explicitly little-endian so
// output bytes do not depend on the host.
inline void write_wav_float32(const std::string& path,
                              const std::vector<std::vector<double>>& channels,
                              double sample_rate) {
  if (channels.empty()) throw AudioError("no channels to write");
  const std::size_t frames = channels[0].size();
  for (const auto& ch : channels) {
    if (ch.size() != frames) throw AudioError("channel lengths differ");
  }
  if (!(sample_rate > 0.0)) throw AudioError("sample rate must be positive");

  const auto n_channels = static_cast<std::uint16_t>(channels.size());
  const auto rate = static_cast<std::uint32_t>(sample_rate);
  const std::uint16_t bytes_per_sample = 4;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(frames * channels.size() * bytes_per_sample);
  const std::uint16_t block_align = static_cast<std::uint16_t>(n_channels * bytes_per_sample);

  std::string out;
  out.reserve(58 + data_bytes);
  out += "RIFF";
  detail::put_u32(out, 38 + data_bytes);  // fmt(16+8) + fact(4+8) + data header(8) + data
  out += "WAVE";
  out += "fmt ";
  detail::put_u32(out, 16);
  detail::put_u16(out, 3);  // IEEE float
  detail::put_u16(out, n_channels);
  detail::put_u32(out, rate);
  detail::put_u32(out, rate * block_align);
  detail::put_u16(out, block_align);
  detail::put_u16(out, 32);
  out += "fact";
  detail::put_u32(out, 4);
  detail::put_u32(out, static_cast<std::uint32_t>(frames));
  out += "data";
  detail::put_u32(out, data_bytes);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& ch : channels) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(ch[i]));
      detail::put_u32(out, bits);
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed for '" + path + "'");
}

// Reads a WAV file with 32-bit-float or 16-bit-PCM samples, any channel
// count. Unknown chunks are skipped.
inline WavData read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();

  if (n < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0) {
    throw AudioError("'" + path + "' is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, n_channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_off = 0, data_len = 0;

  std::size_t off = 12;
  while (off + 8 <= n) {
    const std::string id = bytes.substr(off, 4);
    const std::uint32_t len = detail::get_u32(p + off + 4);
    const std::size_t body = off + 8;
    if (body + len > n) throw AudioError("'" + path + "' is truncated");
    if (id == "fmt ") {
      if (len < 16) throw AudioError("'" + path + "' has a malformed fmt chunk");
      format = detail::get_u16(p + body);
      n_channels = detail::get_u16(p + body + 2);
      rate = detail::get_u32(p + body + 4);
      bits = detail::get_u16(p + body + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_off = body;
      data_len = len;
    }
    off = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) throw AudioError("'" + path + "' lacks fmt or data chunk");
  if (n_channels == 0) throw AudioError("'" + path + "' declares zero channels");

  // WAVE_FORMAT_EXTENSIBLE carries the real format in the extension; the
  // first two bytes of the GUID match the plain format tag, but that fmt
  // chunk layout is longer than what is parsed here, so reject it plainly.
  if (format != 3 && format != 1) {
    throw AudioError("'" + path + "' has unsupported format tag " + std::to_string(format));
  }
  if (format == 3 && bits != 32) {
    throw AudioError("'" + path + "' float data must be 32-bit");
  }
  if (format == 1 && bits != 16) {
    throw AudioError("'" + path + "' PCM data must be 16-bit");
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * n_channels;
  const std::size_t frames = data_len / frame_bytes;

  WavData wav;
  wav.sample_rate = static_cast<double>(rate);
  wav.channels.assign(n_channels, std::vector<double>(frames, 0.0));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < n_channels; ++c) {
      const unsigned char* s = p + data_off + i * frame_bytes + c * bytes_per_sample;
      if (format == 3) {
        const float v = std::bit_cast<float>(detail::get_u32(s));
        wav.channels[c][i] = static_cast<double>(v);
      } else {
        const auto v = static_cast<std::int16_t>(detail::get_u16(s));
        wav.channels[c][i] = static_cast<double>(v) / 32768.0;
      }
    }
  }
  return wav;
}

}  // namespace rirsynth
