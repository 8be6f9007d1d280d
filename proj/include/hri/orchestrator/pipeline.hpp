#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hri/audio/chunker.hpp"
#include "hri/audio/endpoint.hpp"
#include "hri/audio/wake.hpp"
#include "hri/fuzzy/system.hpp"
#include "hri/orchestrator/adapters.hpp"
#include "hri/orchestrator/clock.hpp"
#include "hri/orchestrator/metrics.hpp"
#include "hri/orchestrator/script.hpp"
#include "hri/servo/servo.hpp"
#include "hri/sim/executor.hpp"

namespace hri::orch {

/// (type, payload). Runs on the pipeline thread, between simulation steps.
using EventSink = std::function<void(const std::string& type, const nlohmann::json& payload)>;

enum class AdapterKind { Mock, External };

struct PipelineConfig {
  servo::ServoConfig servo;
  sim::ExecutorConfig executor;
  sim::NoiseModel noise;
  audio::ChunkConfig chunk;
  audio::WakeConfig wake;
  audio::EndpointConfig endpoint;

  // Mock latencies, simulated seconds. Detection is charged per label.
  LatencyProfile stt{3.4, 0.75, 2.3, 6.4};
  LatencyProfile ae{3.4, 0.75, 2.3, 6.3};
  LatencyProfile od_query{4.5, 0.6, 3.5, 7.2};
  double handoff_seconds = 0.05;  // dispatch between stages
  double seconds_per_word = 0.35; // synthetic speech length

  /// Real seconds slept per servo step on a non-simulated clock, so live
  /// viewers can follow the motion. 0 runs flat out.
  double step_pace = 0.0;
};

/// Stage inputs for one command. Stages whose input is already supplied
/// are skipped and cost nothing: text skips STT, actions skip STT and AE.
struct CommandInput {
  std::optional<SpeechInput> speech;
  std::optional<std::string> text;
  std::optional<std::vector<grammar::ActionCall>> actions;
};

/// Judging references; absent fields fall back to "stage produced output".
struct Expectations {
  std::optional<std::string> transcript;
  std::optional<std::vector<grammar::ActionCall>> actions;
  const Predicate* final_scene = nullptr;
};

struct CommandOutcome {
  TrialRecord record;
  perception::ObjectPositionMap detections;
  std::vector<sim::ExecutionResult> executions;
};

/// Wake + end-pointing over a recorded stream. Returns the captured audio
/// from the wake decision onward, or nullopt if no wake occurred.
struct Capture {
  audio::WakeEvent wake;
  audio::Utterance utterance;
};
std::optional<Capture> capture_utterance(std::span<const double> stream,
                                         audio::WakeClassifier& classifier,
                                         const PipelineConfig& cfg);

/// Marker, then noise shaped like speech for the utterance's length, then
/// enough silence for end-pointing. The marker ends just before the first
/// window boundary so the wake decision lands before speech begins.
std::vector<double> synthesize_session(const std::string& utterance, const PipelineConfig& cfg,
                                       std::uint64_t seed);

class Pipeline {
 public:
  Pipeline(Clock& clock, const fuzzy::IT2FuzzySystem& controller, PipelineConfig cfg = {},
           AdapterKind kind = AdapterKind::Mock, ExternalEndpoints endpoints = {});

  /// Fresh copy of the trial scene; audio path, all four stages, judged.
  TrialRecord run_trial(const TrialSpec& trial, std::uint64_t seed,
                        std::optional<Stage> fault = std::nullopt, const EventSink& sink = {});

  /// Runs against a caller-owned scene (interactive and gateway sessions).
  CommandOutcome run_command(sim::SceneSim& scene, const CommandInput& input,
                             std::uint64_t seed, const Expectations& expect = {},
                             const EventSink& sink = {});

  const PipelineConfig& config() const { return cfg_; }
  const grammar::CommandRegistry& registry() const { return registry_; }
  Clock& clock() { return clock_; }

 private:
  struct Adapters {
    std::unique_ptr<Transcriber> stt;
    std::unique_ptr<ActionExtractor> ae;
    std::unique_ptr<perception::Detector> od;
  };
  Adapters make_adapters(const sim::SceneSim& scene, std::uint64_t seed) const;

  CommandOutcome run_stages(sim::SceneSim& scene, const CommandInput& input,
                            const Expectations& expect, std::uint64_t seed,
                            std::optional<Stage> fault, const EventSink& sink);

  Clock& clock_;
  const fuzzy::IT2FuzzySystem& controller_;
  PipelineConfig cfg_;
  AdapterKind kind_;
  ExternalEndpoints endpoints_;
  grammar::CommandRegistry registry_ = grammar::CommandRegistry::defaults();
  audio::MarkerToneClassifier wake_classifier_;
};

/// First-failure rates per stage; each selects round(rate·N) trials.
struct FaultRates {
  std::array<double, kStageCount> rate{};

  bool any() const;
  /// "stt=0.05,ra=0.1"; throws std::invalid_argument.
  static FaultRates parse(const std::string& text);
};

/// Disjoint, exact-count assignment of faults to trial indices via a
/// seeded shuffle. Throws if the counts exceed n.
std::vector<std::optional<Stage>> plan_faults(std::size_t n, const FaultRates& rates,
                                              std::uint64_t seed);

/// Per-trial seed from the run seed, the script's seed and the trial id.
std::uint64_t trial_seed(std::uint64_t run_seed, const TrialSpec& trial);

struct BatchResult {
  std::vector<TrialRecord> records;
  AggregateReport report;
};

/// Throws ScriptError("no trials") on an empty script.
BatchResult run_batch(const std::vector<TrialSpec>& trials, Pipeline& pipeline,
                      std::uint64_t seed, const FaultRates& faults = {},
                      const EventSink& sink = {});

}  // namespace hri::orch
