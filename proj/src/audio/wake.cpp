#include "hri/audio/wake.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hri/audio/features.hpp"

namespace hri::audio {

void WakeConfig::validate() const {
  if (wake_label.empty()) throw std::invalid_argument("wake_label must not be empty");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("wake threshold must lie in (0, 1)");
  }
}

bool wake_predicate(const DetectionResult& result, const WakeConfig& cfg) {
  return result.label == cfg.wake_label && result.score > cfg.threshold;
}

bool detect_wake(const AudioWindow& window, WakeClassifier& classifier, const WakeConfig& cfg) {
  return wake_predicate(classifier.classify(window), cfg);
}

std::vector<double> synthesize_marker(const MarkerSpec& spec, double sample_rate) {
  const auto per_tone = static_cast<std::size_t>(std::lround(spec.tone_seconds * sample_rate));
  const auto edge = std::min(per_tone / 2, static_cast<std::size_t>(0.005 * sample_rate));
  std::vector<double> out;
  out.reserve(per_tone * spec.tones_hz.size());
  for (double f : spec.tones_hz) {
    for (std::size_t n = 0; n < per_tone; ++n) {
      double gain = 1.0;
      const std::size_t from_end = per_tone - 1 - n;
      if (n < edge) gain = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(n) / edge);
      if (from_end < edge) {
        gain = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(from_end) / edge);
      }
      out.push_back(spec.amplitude * gain *
                    std::sin(2.0 * std::numbers::pi * f * static_cast<double>(n) / sample_rate));
    }
  }
  return out;
}

namespace {

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Dominant band per frame, or npos for frames with no clear energy.
constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr double kMinLogEnergy = 0.0;

std::vector<std::size_t> dominant_bands(std::span<const double> samples, double sample_rate) {
  std::vector<std::size_t> out;
  for (const auto& f : log_mel_features(samples, sample_rate)) {
    const std::size_t b = argmax(f.log_mel);
    out.push_back(f.log_mel[b] > kMinLogEnergy ? b : kNone);
  }
  return out;
}

bool near_band(std::size_t got, std::size_t want) {
  return got != kNone && (got > want ? got - want : want - got) <= 1;
}

}  // namespace

MarkerToneClassifier::MarkerToneClassifier(std::string label, MarkerSpec spec, double sample_rate)
    : label_(std::move(label)), spec_(std::move(spec)), sample_rate_(sample_rate) {
  if (spec_.tones_hz.empty()) throw std::invalid_argument("marker needs at least one tone");
  const StftConfig stft_cfg;
  for (double f : spec_.tones_hz) {
    MarkerSpec one = spec_;
    one.tones_hz = {f};
    const auto bands = dominant_bands(synthesize_marker(one, sample_rate_), sample_rate_);
    bands_.push_back(bands[bands.size() / 2]);
  }
  // Require most of a tone's frames, leaving room for edge frames that
  // straddle a transition.
  const double frames_per_tone =
      spec_.tone_seconds * sample_rate_ / static_cast<double>(stft_cfg.hop);
  min_frames_ = static_cast<std::size_t>(std::max(1.0, std::floor(0.6 * frames_per_tone)));
}

DetectionResult MarkerToneClassifier::classify(const AudioWindow& window) {
  const auto frames = dominant_bands(window.samples, sample_rate_);
  std::size_t best = 0;
  // Try every start; count how many tones follow in order.
  for (std::size_t start = 0; start < frames.size(); ++start) {
    if (!near_band(frames[start], bands_[0])) continue;
    std::size_t i = start;
    std::size_t matched = 0;
    for (std::size_t tone = 0; tone < bands_.size(); ++tone) {
      std::size_t run = 0;
      // Allow a couple of transition frames before each later tone.
      std::size_t skipped = 0;
      while (tone > 0 && i < frames.size() && !near_band(frames[i], bands_[tone]) && skipped < 3) {
        ++i;
        ++skipped;
      }
      while (i < frames.size() && near_band(frames[i], bands_[tone])) {
        ++run;
        ++i;
      }
      if (run < min_frames_) break;
      ++matched;
    }
    best = std::max(best, matched);
    if (best == bands_.size()) break;
  }
  if (best == bands_.size()) return {label_, 0.9};
  if (best == 0) return {kBackground, 0.9};
  return {label_, 0.45 * static_cast<double>(best) / static_cast<double>(bands_.size())};
}

std::optional<WakeEvent> find_wake(std::span<const double> stream, WakeClassifier& classifier,
                                   const WakeConfig& wake, const ChunkConfig& chunk) {
  wake.validate();
  for (auto& w : chunk_stream(stream, chunk)) {
    auto r = classifier.classify(w);
    if (wake_predicate(r, wake)) {
      return WakeEvent{w.index, w.start_time, w.start_time + chunk.chunk_seconds, std::move(r)};
    }
  }
  return std::nullopt;
}

}  // namespace hri::audio
