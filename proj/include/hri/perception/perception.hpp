#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hri/perception/bbox.hpp"
#include "hri/sim/scene.hpp"

namespace hri::perception {

using ObjectPositionMap = std::map<std::string, BBox, std::less<>>;

inline constexpr std::string_view kDetectionTask = "<OPEN_VOCABULARY_DETECTION>";

/// Prompt sent to an open-vocabulary detector for one label.
std::string detection_prompt(std::string_view label);

/// Open-vocabulary detector: one label per call. Returns nullopt when the
/// object is not in view; throws when the detector itself fails.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::optional<BBox> detect(std::string_view label) = 0;
};

struct QueryResult {
  ObjectPositionMap objects;
  std::map<std::string, std::string, std::less<>> failures;  // label -> reason
  int queries = 0;
};

/// One detect() call per distinct label, merged into a position map. With
/// `concurrent`, labels are queried on separate threads; the detector must
/// then be thread-safe.
QueryResult query_objects(std::span<const std::string> labels, Detector& detector,
                          bool concurrent = false);

/// Detector backed by simulator ground truth. Box corners get Gaussian
/// noise truncated at 3 sigma, seeded per (seed, label, simulated frame) so
/// a label's result never depends on which other labels were queried.
class SimDetector final : public Detector {
 public:
  SimDetector(const sim::SceneSim& scene, double sigma, std::uint64_t seed);
  std::optional<BBox> detect(std::string_view label) override;

  double noise_bound() const { return 3.0 * sigma_; }

 private:
  const sim::SceneSim& scene_;
  double sigma_;
  std::uint64_t seed_;
};

/// Client for an external detection service. POSTs
/// {"frame": <frame_ref>, "prompt": "<OPEN_VOCABULARY_DETECTION> label"} and
/// expects {"label": ..., "box": [x0, y0, x1, y1]} or {"box": null}.
class HttpDetector final : public Detector {
 public:
  HttpDetector(std::string url, std::string frame_ref,
               std::chrono::milliseconds timeout = std::chrono::seconds(30));
  std::optional<BBox> detect(std::string_view label) override;

 private:
  std::string url_;
  std::string frame_ref_;
  std::chrono::milliseconds timeout_;
};

enum class PoseSource { GroundTruthNoisy, ExternalMarker };

struct EffectorPose {
  Point position;
  double timestamp = 0.0;
  PoseSource source = PoseSource::GroundTruthNoisy;
};

class StalePoseError : public std::runtime_error {
 public:
  StalePoseError(double age, double bound);
  double age() const { return age_; }

 private:
  double age_;
};

class PoseProvider {
 public:
  virtual ~PoseProvider() = default;
  virtual EffectorPose latest() = 0;
  /// Current time on the provider's clock, seconds.
  virtual double now() const = 0;
};

inline constexpr double kPoseStalenessBound = 0.5;

/// Most recent pose; throws StalePoseError if older than `staleness_bound`.
EffectorPose effector_pose(PoseProvider& provider,
                           double staleness_bound = kPoseStalenessBound);

/// Simulator pose plus zero-mean Gaussian noise, timestamped on the scene
/// clock. A frozen provider keeps returning its last sample.
class SimPoseProvider final : public PoseProvider {
 public:
  SimPoseProvider(const sim::SceneSim& scene, double sigma, std::uint64_t seed);

  EffectorPose latest() override;
  double now() const override { return scene_.time(); }

  void freeze(bool frozen) { frozen_ = frozen; }

 private:
  const sim::SceneSim& scene_;
  double sigma_;
  std::mt19937_64 rng_;
  bool frozen_ = false;
  std::optional<EffectorPose> last_;
  std::mutex mu_;
};

}  // namespace hri::perception
