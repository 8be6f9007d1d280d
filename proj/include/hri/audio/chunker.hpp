#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hri::audio {

struct ChunkConfig {
  double chunk_seconds = 2.0;  // T_c
  double step_seconds = 0.25;  // T_s
  double sample_rate = 16000.0;

  /// Both durations must map to whole sample counts.
  void validate() const;
  double overlap_seconds() const { return chunk_seconds - step_seconds; }
  std::size_t chunk_samples() const;
  std::size_t step_samples() const;
  std::size_t overlap_samples() const { return chunk_samples() - step_samples(); }
};

struct AudioWindow {
  std::vector<double> samples;
  double start_time = 0.0;  // seconds from stream start
  std::size_t index = 0;
  bool padded = false;
};

/// Incremental overlapping-window scheduler. Full windows start at
/// multiples of T_s; finish() adds one zero-padded window only if samples
/// past the last full window would otherwise go unseen.
class Chunker {
 public:
  explicit Chunker(ChunkConfig cfg);

  std::vector<AudioWindow> push(std::span<const double> samples);
  std::vector<AudioWindow> finish();

  const ChunkConfig& config() const { return cfg_; }
  std::size_t samples_seen() const { return consumed_ + buffer_.size(); }

 private:
  ChunkConfig cfg_;
  std::size_t chunk_;
  std::size_t step_;
  std::vector<double> buffer_;  // samples from consumed_ onward
  std::size_t consumed_ = 0;    // absolute index of buffer_[0]
  std::size_t emitted_ = 0;
  bool finished_ = false;
};

std::vector<AudioWindow> chunk_stream(std::span<const double> stream, const ChunkConfig& cfg = {});

}  // namespace hri::audio
