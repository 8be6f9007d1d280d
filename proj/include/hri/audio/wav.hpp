#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hri::audio {

class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WavData {
  double sample_rate = 16000.0;
  std::vector<double> samples;  // [-1, 1)
};

/// Mono 16-bit PCM only; unknown chunks are skipped.
WavData read_wav(const std::string& path);
void write_wav(const std::string& path, std::span<const double> samples,
               double sample_rate = 16000.0);

}  // namespace hri::audio
