#include "hri/servo/servo.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

namespace hri::servo {

void ServoConfig::validate() const {
  if (!(dead_zone >= 0.0)) throw std::invalid_argument("servo: dead_zone must be >= 0");
  if (!(gain_near > 0.0) || !(gain_far > 0.0)) {
    throw std::invalid_argument("servo: gains must be positive");
  }
  if (gain_near > gain_far) throw std::invalid_argument("servo: gain_near must be <= gain_far");
  if (!(gain_knee > 0.0)) throw std::invalid_argument("servo: gain_knee must be positive");
  if (!(dead_zone < gain_knee)) throw std::invalid_argument("servo: dead_zone must be < gain_knee");
  if (max_iters <= 0) throw std::invalid_argument("servo: max_iters must be positive");
  if (!(step_clamp > 0.0)) throw std::invalid_argument("servo: step_clamp must be positive");
}

double step_gain(double distance, const ServoConfig& cfg) {
  return cfg.gain_near + (cfg.gain_far - cfg.gain_near) * std::min(1.0, distance / cfg.gain_knee);
}

Step compute_step(double error_x, double error_y, const fuzzy::IT2FuzzySystem& controller,
                  const ServoConfig& cfg) {
  if (!std::isfinite(error_x) || !std::isfinite(error_y)) {
    throw std::invalid_argument("compute_step: non-finite error");
  }
  const double distance = std::hypot(error_x, error_y);
  if (distance <= cfg.dead_zone) return {0.0, 0.0};
  const double g = step_gain(distance, cfg);
  // The antisymmetric controller maps zero error to zero correction; keep
  // that exact instead of relying on cancellation in the weighted sums.
  auto axis = [&](double e) {
    if (e == 0.0) return 0.0;
    return std::clamp(g * fuzzy::evaluate_scalar(e, controller), -cfg.step_clamp, cfg.step_clamp);
  };
  return {axis(error_x), axis(error_y)};
}

ServoOutcome servo_to(Point target, sim::SceneSim& scene, perception::PoseProvider& poses,
                      const fuzzy::IT2FuzzySystem& controller, const ServoConfig& cfg,
                      const TrajectorySink& sink) {
  cfg.validate();
  const auto& frame = scene.state().frame;
  if (target.x < 0.0 || target.y < 0.0 || target.x > frame.width || target.y > frame.height) {
    throw std::invalid_argument("servo_to: target outside the frame");
  }

  ServoOutcome out;
  while (true) {
    perception::EffectorPose pose;
    try {
      pose = perception::effector_pose(poses);
    } catch (const perception::StalePoseError&) {
      if (out.iterations >= cfg.max_iters) break;
      scene.wait(scene.control_period());
      ++out.iterations;
      continue;
    }
    const double ex = pose.position.x - target.x;
    const double ey = pose.position.y - target.y;
    out.trajectory.push_back(pose.position);
    out.final_error = std::hypot(ex, ey);
    if (out.final_error <= cfg.dead_zone) {
      out.converged = true;
      if (sink) sink({out.iterations, pose.position, ex, ey, {}});
      break;
    }
    if (out.iterations >= cfg.max_iters) break;
    const Step step = compute_step(ex, ey, controller, cfg);
    TrajectoryRecord rec{out.iterations, pose.position, ex, ey, step};
    out.records.push_back(rec);
    if (sink) sink(rec);
    scene.apply_move(step.dx, step.dy);
    ++out.iterations;
  }
  return out;
}

void write_trajectory_jsonl(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  for (const auto& r : records) {
    out << nlohmann::json{{"iteration", r.iteration},
                          {"pose", {r.pose.x, r.pose.y}},
                          {"error", {r.error_x, r.error_y}},
                          {"step", {r.step.dx, r.step.dy}}}
               .dump()
        << '\n';
  }
}

}  // namespace hri::servo
