#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hri::audio {

struct EndpointConfig {
  double amp_threshold = 0.01;  // RMS, full scale = 1
  double silence_seconds = 5.0;
  double frame_seconds = 0.25;
  double sample_rate = 16000.0;

  void validate() const;
  std::size_t frame_samples() const;
  std::size_t silent_frames_needed() const;
};

struct Utterance {
  std::vector<double> samples;  // everything captured, trailing silence included
  bool truncated = false;       // stream ended before the silence span
  bool speech = false;          // some frame reached the threshold
  double duration(double sample_rate) const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Accumulates audio until the trailing silence_seconds consist entirely
/// of frames with RMS below the threshold.
class Endpointer {
 public:
  explicit Endpointer(EndpointConfig cfg = {});

  /// Returns how many samples were taken; stops taking once done.
  std::size_t push(std::span<const double> samples);
  bool done() const { return done_; }
  /// Time from the start of capture, seconds.
  double elapsed() const;

  /// Moves the captured audio out; flags truncation if not done.
  Utterance finish();

 private:
  EndpointConfig cfg_;
  std::size_t frame_;
  std::size_t needed_;
  Utterance utt_;
  std::size_t frame_fill_ = 0;
  double frame_sq_ = 0.0;
  std::size_t silent_run_ = 0;
  bool done_ = false;
};

Utterance endpoint_silence(std::span<const double> stream, const EndpointConfig& cfg = {});

double rms(std::span<const double> samples);

}  // namespace hri::audio
