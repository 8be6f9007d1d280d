#include "hri/audio/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace hri::audio {

namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put32(std::ostream& o, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 24)};
  o.write(b, 4);
}

void put16(std::ostream& o, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
  o.write(b, 2);
}

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("cannot open " + path);
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw WavError(path + ": not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  WavData out;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* h = bytes.data() + pos;
    const std::uint32_t size = le32(h + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) throw WavError(path + ": truncated chunk");
    if (std::memcmp(h, "fmt ", 4) == 0) {
      if (size < 16) throw WavError(path + ": short fmt chunk");
      const unsigned char* f = bytes.data() + body;
      const auto format = le16(f);
      const auto channels = le16(f + 2);
      const auto rate = le32(f + 4);
      const auto bits = le16(f + 14);
      if (format != 1) throw WavError(path + ": only PCM is supported");
      if (channels != 1) throw WavError(path + ": only mono is supported");
      if (bits != 16) throw WavError(path + ": only 16-bit samples are supported");
      if (rate == 0) throw WavError(path + ": zero sample rate");
      out.sample_rate = rate;
      have_fmt = true;
    } else if (std::memcmp(h, "data", 4) == 0) {
      if (!have_fmt) throw WavError(path + ": data before fmt");
      const unsigned char* d = bytes.data() + body;
      out.samples.resize(size / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i] = static_cast<std::int16_t>(le16(d + 2 * i)) / 32768.0;
      }
      return out;
    }
    pos = body + size + (size & 1);
  }
  throw WavError(path + ": no data chunk");
}

void write_wav(const std::string& path, std::span<const double> samples, double sample_rate) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw WavError("cannot write " + path);
  const auto rate = static_cast<std::uint32_t>(std::lround(sample_rate));
  const auto data = static_cast<std::uint32_t>(samples.size() * 2);
  o.write("RIFF", 4);
  put32(o, 36 + data);
  o.write("WAVEfmt ", 8);
  put32(o, 16);
  put16(o, 1);
  put16(o, 1);
  put32(o, rate);
  put32(o, rate * 2);
  put16(o, 2);
  put16(o, 16);
  o.write("data", 4);
  put32(o, data);
  for (double s : samples) {
    const double c = std::clamp(s, -1.0, 32767.0 / 32768.0);
    put16(o, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32768.0))));
  }
  if (!o) throw WavError("write failed: " + path);
}

}  // namespace hri::audio
