#include "hri/orchestrator/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "hri/perception/bbox.hpp"

namespace hri::orch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Sub-seed streams per trial.
enum : std::uint64_t {
  kSceneStream = 1,
  kDetectorStream,
  kPoseStream,
  kSttStream,
  kAeStream,
  kOdLatencyStream,
  kAudioStream
};

std::size_t word_count(const std::string& s) {
  std::istringstream in(s);
  return static_cast<std::size_t>(std::distance(std::istream_iterator<std::string>(in),
                                                std::istream_iterator<std::string>()));
}

std::vector<std::string> referenced_labels(const std::vector<grammar::ActionCall>& calls,
                                           const grammar::CommandRegistry& registry) {
  std::vector<std::string> out;
  auto add = [&](const std::string& l) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  };
  for (const auto& c : calls) {
    const auto* spec = registry.find(c.method);
    if (!spec) continue;
    for (std::size_t i = 0; i < spec->object_args && i < c.args.size(); ++i) add(c.args[i]);
    if (spec->executor == "hand_over") add("hand");
  }
  return out;
}

nlohmann::json box_json(const BBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

}  // namespace

std::optional<Capture> capture_utterance(std::span<const double> stream,
                                         audio::WakeClassifier& classifier,
                                         const PipelineConfig& cfg) {
  auto wake = audio::find_wake(stream, classifier, cfg.wake, cfg.chunk);
  if (!wake) return std::nullopt;
  const auto from = std::min(
      stream.size(), static_cast<std::size_t>(std::lround(wake->detected_at * cfg.chunk.sample_rate)));
  auto endpoint = cfg.endpoint;
  endpoint.sample_rate = cfg.chunk.sample_rate;
  return Capture{*wake, audio::endpoint_silence(stream.subspan(from), endpoint)};
}

std::vector<double> synthesize_session(const std::string& utterance, const PipelineConfig& cfg,
                                       std::uint64_t seed) {
  const double sr = cfg.chunk.sample_rate;
  auto samples_for = [sr](double seconds) {
    return static_cast<std::size_t>(std::lround(std::max(0.0, seconds) * sr));
  };
  const audio::MarkerSpec marker;
  const double lead = cfg.chunk.chunk_seconds - marker.duration() - 0.05;
  std::vector<double> out(samples_for(lead), 0.0);
  const auto m = audio::synthesize_marker(marker, sr);
  out.insert(out.end(), m.begin(), m.end());
  out.resize(out.size() + samples_for(0.25), 0.0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double speech = std::max<double>(1.0, static_cast<double>(word_count(utterance))) *
                        cfg.seconds_per_word;
  const std::size_t n = samples_for(speech);
  for (std::size_t i = 0; i < n; ++i) {
    // Syllable-rate envelope that never drops below the end-pointing level.
    const double env = 0.4 + 0.6 * std::abs(std::sin(std::numbers::pi * 4.0 * i / sr));
    out.push_back(0.1 * env * u(rng));
  }
  out.resize(out.size() + samples_for(cfg.endpoint.silence_seconds + 1.0), 0.0);
  return out;
}

Pipeline::Pipeline(Clock& clock, const fuzzy::IT2FuzzySystem& controller, PipelineConfig cfg,
                   AdapterKind kind, ExternalEndpoints endpoints)
    : clock_(clock),
      controller_(controller),
      cfg_(std::move(cfg)),
      kind_(kind),
      endpoints_(std::move(endpoints)),
      wake_classifier_(cfg_.wake.wake_label, audio::MarkerSpec{}, cfg_.chunk.sample_rate) {
  cfg_.servo.validate();
  cfg_.noise.validate();
  cfg_.chunk.validate();
  cfg_.wake.validate();
  cfg_.endpoint.validate();
  if (kind_ == AdapterKind::External) endpoints_.require_all();
}

Pipeline::Adapters Pipeline::make_adapters(const sim::SceneSim& scene, std::uint64_t seed) const {
  Adapters a;
  if (kind_ == AdapterKind::Mock) {
    a.stt = std::make_unique<MockTranscriber>(clock_, cfg_.stt, derive(seed, kSttStream));
    a.ae = std::make_unique<MockActionExtractor>(clock_, cfg_.ae, derive(seed, kAeStream));
    a.od = std::make_unique<perception::SimDetector>(scene, cfg_.noise.perception_sigma,
                                                     derive(seed, kDetectorStream));
  } else {
    const auto ms = std::chrono::milliseconds(static_cast<long long>(endpoints_.timeout * 1000));
    a.stt = std::make_unique<HttpTranscriber>(endpoints_.stt_url, endpoints_.timeout);
    a.ae = std::make_unique<HttpActionExtractor>(endpoints_.ae_url, endpoints_.timeout);
    a.od = std::make_unique<perception::HttpDetector>(
        endpoints_.od_url, "sim:" + std::to_string(scene.time()), ms);
  }
  return a;
}

CommandOutcome Pipeline::run_stages(sim::SceneSim& scene, const CommandInput& input,
                                    const Expectations& expect, std::uint64_t seed,
                                    std::optional<Stage> fault, const EventSink& sink) {
  CommandOutcome out;
  auto& rec = out.record;
  rec.injected_fault = fault;
  auto emit = [&](const std::string& type, const nlohmann::json& payload) {
    if (sink) sink(type, payload);
  };
  bool failed = false;
  auto judge = [&](Stage s, bool ok, const std::string& reason) {
    ok = ok && !failed;
    rec.metrics.a(s) = ok ? 100 : 0;
    if (!ok && !failed) {
      failed = true;
      rec.first_failure = s;
      rec.failure_reason = reason;
    }
    emit("stage", {{"stage", stage_key(s)},
                   {"state", ok ? "ok" : "failed"},
                   {"duration", rec.metrics.t(s)}});
  };
  auto begin = [&](Stage s) {
    emit("stage", {{"stage", stage_key(s)}, {"state", "running"}});
    return clock_.now();
  };
  auto skip_rest = [&](Stage from) {
    for (Stage s : kStages) {
      if (static_cast<int>(s) >= static_cast<int>(from)) {
        emit("stage", {{"stage", stage_key(s)}, {"state", "skipped"}});
      }
    }
  };

  Stage current = Stage::STT;
  double t0 = clock_.now();
  try {
    Adapters ad = make_adapters(scene, seed);

    // Speech to text.
    t0 = begin(Stage::STT);
    std::string transcript;
    if (input.text) {
      transcript = *input.text;
    } else if (input.actions) {
      transcript = grammar::to_canonical(*input.actions);
    } else if (input.speech) {
      transcript = ad.stt->transcribe(*input.speech);
    } else {
      throw std::invalid_argument("command has no input");
    }
    if (fault == Stage::STT) transcript = corrupt_transcript(transcript);
    rec.metrics.t(Stage::STT) = clock_.now() - t0;
    rec.transcript = transcript;
    emit("transcript", {{"text", transcript}});
    const bool stt_ok = expect.transcript
                            ? normalize_text(transcript) == normalize_text(*expect.transcript)
                            : !normalize_text(transcript).empty();
    judge(Stage::STT, stt_ok, "transcript mismatch: \"" + transcript + "\"");
    clock_.advance(cfg_.handoff_seconds);

    // Action extraction.
    current = Stage::AE;
    t0 = begin(Stage::AE);
    std::vector<grammar::ActionCall> calls;
    std::string ae_error;
    std::optional<std::size_t> parse_offset;
    std::string raw;
    if (input.actions && !fault) {
      calls = *input.actions;
    } else {
      raw = input.actions ? grammar::to_canonical(*input.actions) : ad.ae->extract(transcript);
      if (fault == Stage::AE) raw = corrupt_actions(raw);
      try {
        calls = grammar::parse_actions(raw);
      } catch (const grammar::ParseError& e) {
        ae_error = e.what();
        parse_offset = e.offset();
      }
    }
    if (ae_error.empty()) {
      try {
        grammar::validate(calls, registry_);
      } catch (const grammar::ValidationError& e) {
        ae_error = e.what();
      }
    }
    if (ae_error.empty() && calls.empty()) ae_error = "no actions extracted";
    rec.metrics.t(Stage::AE) = clock_.now() - t0;
    rec.actions = calls;
    nlohmann::json ae_event = {{"raw", raw}, {"actions", grammar::to_json(calls)}};
    if (!ae_error.empty()) ae_event["error"] = ae_error;
    if (parse_offset) ae_event["offset"] = *parse_offset;
    emit("actions", ae_event);
    judge(Stage::AE, ae_error.empty() && (!expect.actions || calls == *expect.actions),
          ae_error.empty() ? "actions differ from expected: " + grammar::to_canonical(calls)
                           : ae_error);
    if (!ae_error.empty()) {
      skip_rest(Stage::OD);
      return out;
    }
    clock_.advance(cfg_.handoff_seconds);

    // Object detection.
    current = Stage::OD;
    t0 = begin(Stage::OD);
    const auto labels = referenced_labels(calls, registry_);
    perception::Detector* det = ad.od.get();
    std::unique_ptr<perception::Detector> blind;
    std::unique_ptr<perception::Detector> timed;
    if (fault == Stage::OD && !labels.empty()) {
      blind = std::make_unique<BlindDetector>(*det, labels.front());
      det = blind.get();
    }
    if (kind_ == AdapterKind::Mock) {
      timed = std::make_unique<TimedDetector>(*det, clock_, cfg_.od_query,
                                              derive(seed, kOdLatencyStream));
      det = timed.get();
    }
    const auto q = perception::query_objects(labels, *det);
    rec.metrics.t(Stage::OD) = clock_.now() - t0;
    out.detections = q.objects;
    std::string od_reason;
    for (const auto& l : labels) {
      const auto found = q.objects.find(l);
      emit("detection", {{"label", l},
                         {"box", found == q.objects.end() ? nlohmann::json(nullptr)
                                                          : box_json(found->second)}});
      if (!od_reason.empty()) continue;
      const auto truth = scene.state().objects.find(l);
      if (found == q.objects.end()) {
        od_reason = "object not detected: " + l;
      } else if (truth == scene.state().objects.end() || iou(found->second, truth->second) < 0.5) {
        od_reason = "detection of " + l + " misses ground truth";
      }
    }
    judge(Stage::OD, od_reason.empty(), od_reason);
    clock_.advance(cfg_.handoff_seconds);

    // Robot actions.
    current = Stage::RA;
    t0 = begin(Stage::RA);
    const double scene_t0 = scene.time();
    perception::SimPoseProvider poses(scene, cfg_.noise.perception_sigma,
                                      derive(seed, kPoseStream));
    sim::PrimitiveExecutor exec(scene, poses, controller_, cfg_.servo, registry_, cfg_.executor);
    const bool pace = !clock_.simulated() && cfg_.step_pace > 0.0;
    exec.set_trajectory_sink([&](const servo::TrajectoryRecord& r) {
      emit("trajectory", {{"iteration", r.iteration},
                          {"x", r.pose.x},
                          {"y", r.pose.y},
                          {"error", std::hypot(r.error_x, r.error_y)}});
      if (pace) std::this_thread::sleep_for(std::chrono::duration<double>(cfg_.step_pace));
    });
    std::string ra_reason;
    for (const auto& call : calls) {
      if (fault == Stage::RA) scene.arm_grip_fault();
      auto r = exec.execute(call, q.objects);
      emit("execution", {{"call", grammar::to_canonical({call})},
                         {"success", r.success},
                         {"reason", r.reason},
                         {"servo_iterations", r.servo_iterations},
                         {"goal_clipped", r.goal_clipped}});
      emit("pose", {{"x", scene.state().effector.x}, {"y", scene.state().effector.y},
                    {"time", scene.time()}});
      emit("scene", sim::to_json(scene.state()));
      const bool ok = r.success;
      out.executions.push_back(std::move(r));
      if (!ok) {
        ra_reason = call.method + ": " + out.executions.back().reason;
        break;
      }
    }
    if (clock_.simulated()) clock_.advance(scene.time() - scene_t0);
    rec.metrics.t(Stage::RA) = clock_.now() - t0;
    if (ra_reason.empty() && expect.final_scene && !expect.final_scene->holds(scene.state())) {
      ra_reason = "final scene does not satisfy " + expect.final_scene->to_json().dump();
    }
    judge(Stage::RA, ra_reason.empty(), ra_reason);
  } catch (const std::exception& e) {
    rec.errored = true;
    rec.metrics.t(current) = clock_.now() - t0;
    const bool earlier = failed;
    judge(current, false, e.what());
    if (earlier) rec.failure_reason += std::string("; then ") + e.what();
    if (current != Stage::RA) skip_rest(static_cast<Stage>(static_cast<int>(current) + 1));
  }
  return out;
}

CommandOutcome Pipeline::run_command(sim::SceneSim& scene, const CommandInput& input,
                                     std::uint64_t seed, const Expectations& expect,
                                     const EventSink& sink) {
  const double start = clock_.now();
  auto out = run_stages(scene, input, expect, seed, std::nullopt, sink);
  finalize(out.record, clock_.now() - start);
  if (sink) sink("trial", to_json(out.record));
  return out;
}

TrialRecord Pipeline::run_trial(const TrialSpec& trial, std::uint64_t seed,
                                std::optional<Stage> fault, const EventSink& sink) {
  auto initial = trial.scene;
  initial.rng_seed = derive(seed, kSceneStream);
  sim::SceneSim scene(initial, cfg_.noise);

  TrialRecord rec;
  const double start = clock_.now();
  auto fail_before_stages = [&](const std::string& reason, bool errored) {
    rec.first_failure = Stage::STT;
    rec.failure_reason = reason;
    rec.errored = errored;
    rec.injected_fault = fault;
  };
  try {
    const auto stream = synthesize_session(trial.utterance, cfg_, derive(seed, kAudioStream));
    auto cap = capture_utterance(stream, wake_classifier_, cfg_);
    if (!cap) {
      fail_before_stages("wake word not detected", false);
    } else {
      if (sink) {
        sink("wake", {{"label", cap->wake.result.label},
                      {"score", cap->wake.result.score},
                      {"window_start", cap->wake.window_start}});
      }
      // Timing starts at the wake decision; speaking and end-pointing count
      // toward the overhead term.
      clock_.advance(cap->utterance.duration(cfg_.chunk.sample_rate));
      if (!cap->utterance.speech || cap->utterance.truncated) {
        fail_before_stages(cap->utterance.speech ? "utterance cut off" : "no speech captured",
                           false);
      } else {
        CommandInput in;
        in.speech = SpeechInput{std::move(cap->utterance.samples), cfg_.chunk.sample_rate,
                                trial.utterance};
        Expectations ex{trial.expected_transcript, trial.expected_actions,
                        trial.expected_final.get()};
        rec = run_stages(scene, in, ex, seed, fault, sink).record;
      }
    }
  } catch (const std::exception& e) {
    fail_before_stages(e.what(), true);
  }
  rec.id = trial.id;
  rec.utterance = trial.utterance;
  rec.expected_actions = trial.expected_actions;
  finalize(rec, clock_.now() - start);
  if (sink) sink("trial", to_json(rec));
  return rec;
}

bool FaultRates::any() const {
  return std::any_of(rate.begin(), rate.end(), [](double r) { return r > 0.0; });
}

FaultRates FaultRates::parse(const std::string& text) {
  FaultRates f;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("fault '" + item + "' needs stage=rate");
    const auto stage = stage_from_key(item.substr(0, eq));
    if (!stage) throw std::invalid_argument("unknown stage '" + item.substr(0, eq) + "'");
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !(r >= 0.0 && r <= 1.0)) {
      throw std::invalid_argument("fault rate '" + value + "' must be in [0, 1]");
    }
    f.rate[static_cast<std::size_t>(*stage)] = r;
  }
  return f;
}

std::vector<std::optional<Stage>> plan_faults(std::size_t n, const FaultRates& rates,
                                              std::uint64_t seed) {
  std::vector<std::optional<Stage>> plan(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive(seed, 0xfa017));
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t next = 0;
  for (Stage s : kStages) {
    const auto count = static_cast<std::size_t>(
        std::llround(rates.rate[static_cast<std::size_t>(s)] * static_cast<double>(n)));
    if (next + count > n) throw std::invalid_argument("fault rates add up to more than all trials");
    for (std::size_t i = 0; i < count; ++i) plan[order[next++]] = s;
  }
  return plan;
}

std::uint64_t trial_seed(std::uint64_t run_seed, const TrialSpec& trial) {
  return derive(derive(run_seed, trial.seed), fnv1a(trial.id));
}

BatchResult run_batch(const std::vector<TrialSpec>& trials, Pipeline& pipeline,
                      std::uint64_t seed, const FaultRates& faults, const EventSink& sink) {
  if (trials.empty()) throw ScriptError("no trials");
  const auto plan = plan_faults(trials.size(), faults, seed);
  BatchResult out;
  out.records.reserve(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    out.records.push_back(pipeline.run_trial(trials[i], trial_seed(seed, trials[i]), plan[i], sink));
  }
  out.report = aggregate(out.records);
  return out;
}

}  // namespace hri::orch
