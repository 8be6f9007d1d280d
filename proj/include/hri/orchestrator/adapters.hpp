#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hri/orchestrator/clock.hpp"
#include "hri/perception/perception.hpp"

namespace hri::orch {

/// Audio handed to speech-to-text. `spoken_text` is what the simulated
/// speaker said; only mock adapters may look at it.
struct SpeechInput {
  std::vector<double> samples;
  double sample_rate = 16000.0;
  std::string spoken_text;
};

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual std::string transcribe(const SpeechInput& input) = 0;
};

/// Returns raw model output; the pipeline parses it.
class ActionExtractor {
 public:
  virtual ~ActionExtractor() = default;
  virtual std::string extract(std::string_view transcript) = 0;
};

/// Truncated-normal latency, in simulated seconds.
struct LatencyProfile {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;

  double sample(std::mt19937_64& rng) const;
};

/// Lower case, punctuation other than digits/commas/periods/hyphens
/// removed, whitespace collapsed.
std::string normalize_text(std::string_view text);

class MockTranscriber final : public Transcriber {
 public:
  MockTranscriber(Clock& clock, LatencyProfile latency, std::uint64_t seed);
  std::string transcribe(const SpeechInput& input) override;
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

 private:
  Clock& clock_;
  LatencyProfile latency_;
  std::mt19937_64 rng_;
};

/// Rule table standing in for the language model:
///   grab / pick up / take / get the X              -> [pick_up(X)]
///   give me / hand me / hand over / pass me the X  -> [pick_up(X), hand_over(X)]
///   move / put / place the X (to the) left|right of the Y
///                                   -> [move_object_to_{left,right}_of(X, Y)]
///   move / put / place the X above|below the Y     -> [move_object_{above,below}(X, Y)]
///   move / put / place the X at N, M               -> [place_at(X, N, M)]
/// Clauses joined by "then" or "and then" concatenate. Anything else -> [].
std::string mock_extract(std::string_view transcript);

class MockActionExtractor final : public ActionExtractor {
 public:
  MockActionExtractor(Clock& clock, LatencyProfile latency, std::uint64_t seed);
  std::string extract(std::string_view transcript) override;
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

 private:
  Clock& clock_;
  LatencyProfile latency_;
  std::mt19937_64 rng_;
};

/// Charges a latency per query to the clock, then delegates.
class TimedDetector final : public perception::Detector {
 public:
  TimedDetector(perception::Detector& inner, Clock& clock, LatencyProfile latency,
                std::uint64_t seed);
  std::optional<BBox> detect(std::string_view label) override;

 private:
  perception::Detector& inner_;
  Clock& clock_;
  LatencyProfile latency_;
  std::mt19937_64 rng_;
};

// Fault wrappers. Each corrupts one result the way a real model might.

/// Drops the last word (or replaces a single word).
std::string corrupt_transcript(std::string_view transcript);
/// Swaps the first call for a plausible wrong one: pick_up <-> hand_over,
/// left_of <-> right_of, above <-> below, place_at with x and y exchanged.
/// Unparseable or empty input becomes "[]".
std::string corrupt_actions(std::string_view raw);

/// Loses every detection of `label`.
class BlindDetector final : public perception::Detector {
 public:
  BlindDetector(perception::Detector& inner, std::string label)
      : inner_(inner), label_(std::move(label)) {}
  std::optional<BBox> detect(std::string_view label) override {
    if (label == label_) return std::nullopt;
    return inner_.detect(label);
  }

 private:
  perception::Detector& inner_;
  std::string label_;
};

/// Endpoint settings for external services, read from HRI_STT_URL,
/// HRI_AE_URL, HRI_OD_URL and HRI_HTTP_TIMEOUT (seconds).
struct ExternalEndpoints {
  std::string stt_url;
  std::string ae_url;
  std::string od_url;
  double timeout = 30.0;

  static ExternalEndpoints from_env();
  /// Throws std::invalid_argument naming the missing variables.
  void require_all() const;
};

/// POSTs {"sample_rate", "samples"} and expects {"text": "..."}.
class HttpTranscriber final : public Transcriber {
 public:
  HttpTranscriber(std::string url, double timeout);
  std::string transcribe(const SpeechInput& input) override;

 private:
  std::string url_;
  double timeout_;
};

/// POSTs {"transcript"} and expects {"text": "[...]"}.
class HttpActionExtractor final : public ActionExtractor {
 public:
  HttpActionExtractor(std::string url, double timeout);
  std::string extract(std::string_view transcript) override;

 private:
  std::string url_;
  double timeout_;
};

}  // namespace hri::orch
