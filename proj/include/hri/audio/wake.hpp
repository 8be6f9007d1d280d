#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hri/audio/chunker.hpp"

namespace hri::audio {

inline constexpr const char* kDefaultWakeLabel = "hey_robot";

struct WakeConfig {
  std::string wake_label = kDefaultWakeLabel;  // l_W
  double threshold = 0.5;                      // θ, exclusive

  void validate() const;
};

struct DetectionResult {
  std::string label;
  double score = 0.0;  // [0, 1]
};

class WakeClassifier {
 public:
  virtual ~WakeClassifier() = default;
  virtual DetectionResult classify(const AudioWindow& window) = 0;
};

/// label == l_W and score > θ. A score exactly at θ does not wake.
bool wake_predicate(const DetectionResult& result, const WakeConfig& cfg);

/// Classifier errors propagate to the caller.
bool detect_wake(const AudioWindow& window, WakeClassifier& classifier, const WakeConfig& cfg);

/// Frequencies and duration of the marker sequence standing in for a
/// spoken wake word.
struct MarkerSpec {
  std::vector<double> tones_hz{1000.0, 1500.0, 2250.0};
  double tone_seconds = 0.15;
  double amplitude = 0.3;

  double duration() const { return tone_seconds * static_cast<double>(tones_hz.size()); }
};

/// The marker as samples, with 5 ms raised-cosine edges on each tone.
std::vector<double> synthesize_marker(const MarkerSpec& spec = {}, double sample_rate = 16000.0);

/// Deterministic stand-in for a keyword model: looks for the marker tones
/// in order as the dominant log-mel band over consecutive frames. Scores
/// 0.9 for the whole sequence, below 0.5 for a partial one.
class MarkerToneClassifier final : public WakeClassifier {
 public:
  explicit MarkerToneClassifier(std::string label = kDefaultWakeLabel, MarkerSpec spec = {},
                                double sample_rate = 16000.0);
  DetectionResult classify(const AudioWindow& window) override;

  static constexpr const char* kBackground = "_background";

 private:
  std::string label_;
  MarkerSpec spec_;
  double sample_rate_;
  std::vector<std::size_t> bands_;  // dominant band of each tone
  std::size_t min_frames_;
};

struct WakeEvent {
  std::size_t window_index = 0;
  double window_start = 0.0;
  double detected_at = 0.0;  // end of the waking window
  DetectionResult result;
};

/// Offline scan: classifies windows in order and returns the first wake.
std::optional<WakeEvent> find_wake(std::span<const double> stream, WakeClassifier& classifier,
                                   const WakeConfig& wake = {}, const ChunkConfig& chunk = {});

}  // namespace hri::audio
