#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "hri/fuzzy/system.hpp"
#include "hri/perception/perception.hpp"
#include "hri/sim/scene.hpp"

namespace hri::servo {

struct ServoConfig {
  double dead_zone = 5.0;   // px
  double gain_near = 0.3;
  double gain_far = 1.0;
  double gain_knee = 60.0;  // px
  int max_iters = 200;
  double step_clamp = 25.0; // px per step

  void validate() const;
};

struct Step {
  double dx = 0.0;
  double dy = 0.0;
};

/// Distance-dependent gain: gain_near at zero error rising linearly to
/// gain_far at gain_knee, flat beyond.
double step_gain(double distance, const ServoConfig& cfg);

/// One corrective step for an effector-minus-target error. Each axis runs
/// through the single-input controller on its own; the shared gain uses
/// the Euclidean error. Inside the dead zone the step is exactly zero.
Step compute_step(double error_x, double error_y, const fuzzy::IT2FuzzySystem& controller,
                  const ServoConfig& cfg);

struct TrajectoryRecord {
  int iteration = 0;
  Point pose;       // measured
  double error_x = 0.0;
  double error_y = 0.0;
  Step step;
};

struct ServoOutcome {
  bool converged = false;
  int iterations = 0;             // control cycles spent
  std::vector<Point> trajectory;  // measured poses, first entry = start
  double final_error = 0.0;       // measured, px
  std::vector<TrajectoryRecord> records;
};

using TrajectorySink = std::function<void(const TrajectoryRecord&)>;

/// Closed loop: read pose, step, move, until the measured error is within
/// the dead zone or max_iters cycles have run. A stale pose costs one
/// cycle with no motion.
ServoOutcome servo_to(Point target, sim::SceneSim& scene, perception::PoseProvider& poses,
                      const fuzzy::IT2FuzzySystem& controller, const ServoConfig& cfg,
                      const TrajectorySink& sink = {});

/// One JSON object per line: iteration, pose, error, step.
void write_trajectory_jsonl(std::ostream& out, const std::vector<TrajectoryRecord>& records);

}  // namespace hri::servo
