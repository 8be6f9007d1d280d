#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>

#include <json.hpp>

#include "hri/perception/bbox.hpp"

namespace hri::sim {

struct FrameSize {
  double width = 1280.0;
  double height = 720.0;

  bool operator==(const FrameSize&) const = default;
};

struct NoiseModel {
  double actuation_sigma = 0.5;
  double perception_sigma = 1.0;

  void validate() const;
};

/// Value snapshot of the planar world.
struct SceneState {
  FrameSize frame;
  std::map<std::string, BBox, std::less<>> objects;
  Point effector{640.0, 360.0};
  std::optional<std::string> held;
  std::uint64_t rng_seed = 0;
  double time = 0.0;  // simulated seconds

  bool operator==(const SceneState&) const = default;

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

nlohmann::json to_json(const SceneState& s);
/// Accepts the scene setup layout: {"frame": [w, h], "effector": [x, y],
/// "seed": n, "objects": [{"label": "apple", "box": [x0, y0, x1, y1]}, ...]}.
SceneState scene_from_json(const nlohmann::json& j);
SceneState load_scene(const std::string& path);

/// Owner of a mutable scene. All mutation goes through here so that a
/// seed fully determines every trajectory.
class SceneSim {
 public:
  explicit SceneSim(SceneState initial, NoiseModel noise = {}, double control_period = 0.1);

  const SceneState& state() const { return state_; }
  const NoiseModel& noise() const { return noise_; }
  double time() const { return state_.time; }
  double control_period() const { return control_period_; }

  /// Translates the effector by (dx, dy) plus actuation noise, clamped so
  /// the effector and any held box stay inside the frame. A held box moves
  /// rigidly with the effector. Advances time by one control period.
  const SceneState& apply_move(double dx, double dy);

  void wait(double seconds);

  enum class AttachResult { Attached, Occupied, UnknownObject, NothingUnderEffector };

  /// Suction attach of `label`; the effector must lie inside its box. An
  /// armed grip fault is consumed here: the call reports Attached but the
  /// object stays put.
  AttachResult attach(const std::string& label);
  void release();

  void arm_grip_fault() { grip_fault_ = true; }

  /// Offset from effector to held box center, fixed at attach time.
  std::optional<Point> held_offset() const;

 private:
  SceneState state_;
  NoiseModel noise_;
  double control_period_;
  std::mt19937_64 rng_;
  bool grip_fault_ = false;
};

enum class Relation { LeftOf, RightOf, Above, Below };

struct SpatialGoal {
  Point center;
  bool clipped = false;
};

/// Center at which `moving` should be placed to satisfy the relation
/// against `reference`, separated by `margin` pixels; clamped so the
/// moving box fits inside the frame.
SpatialGoal resolve_spatial_goal(Relation relation, const BBox& reference, const BBox& moving,
                                 double margin, FrameSize frame = {});

}  // namespace hri::sim
