#pragma once

#include <optional>
#include <string>

#include "hri/fuzzy/system.hpp"
#include "hri/grammar/actions.hpp"
#include "hri/perception/perception.hpp"
#include "hri/servo/servo.hpp"
#include "hri/sim/scene.hpp"

namespace hri::sim {

struct ExecutorConfig {
  double margin = 10.0;          // px between boxes for spatial relations
  double suction_seconds = 0.5;  // simulated time per attach or release
};

struct ExecutionResult {
  bool success = false;
  std::string reason;  // empty on success
  int servo_iterations = 0;
  bool goal_clipped = false;
};

/// Runs registry primitives against a simulated scene. Targets come from
/// the object position map; the scene is ground truth only for physics.
class PrimitiveExecutor {
 public:
  PrimitiveExecutor(SceneSim& scene, perception::PoseProvider& poses,
                    const fuzzy::IT2FuzzySystem& controller, servo::ServoConfig servo_cfg,
                    grammar::CommandRegistry registry = grammar::CommandRegistry::defaults(),
                    ExecutorConfig cfg = {});

  ExecutionResult execute(const grammar::ActionCall& call,
                          const perception::ObjectPositionMap& objects);

  void set_trajectory_sink(servo::TrajectorySink sink) { sink_ = std::move(sink); }

 private:
  struct Servoed {
    bool converged;
    Point measured;
  };

  Servoed move_effector(Point target, ExecutionResult& result);
  bool pick(const std::string& label, const perception::ObjectPositionMap& objects,
            ExecutionResult& result);
  /// Carries the held object so its center lands on `center`, then releases.
  bool carry_to(Point center, ExecutionResult& result);

  SceneSim& scene_;
  perception::PoseProvider& poses_;
  const fuzzy::IT2FuzzySystem& controller_;
  servo::ServoConfig servo_cfg_;
  grammar::CommandRegistry registry_;
  ExecutorConfig cfg_;
  servo::TrajectorySink sink_;
  std::optional<Point> grip_offset_;  // estimated object-center minus effector
};

inline constexpr const char* kReasonNotDetected = "object not detected";
inline constexpr const char* kReasonOccupied = "gripper occupied";

}  // namespace hri::sim
