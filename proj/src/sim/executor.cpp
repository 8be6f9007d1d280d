#include "hri/sim/executor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace hri::sim {

namespace {

std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

ExecutionResult fail(ExecutionResult r, std::string reason) {
  r.success = false;
  r.reason = std::move(reason);
  return r;
}

}  // namespace

PrimitiveExecutor::PrimitiveExecutor(SceneSim& scene, perception::PoseProvider& poses,
                                     const fuzzy::IT2FuzzySystem& controller,
                                     servo::ServoConfig servo_cfg,
                                     grammar::CommandRegistry registry, ExecutorConfig cfg)
    : scene_(scene),
      poses_(poses),
      controller_(controller),
      servo_cfg_(servo_cfg),
      registry_(std::move(registry)),
      cfg_(cfg) {
  servo_cfg_.validate();
}

PrimitiveExecutor::Servoed PrimitiveExecutor::move_effector(Point target,
                                                            ExecutionResult& result) {
  const auto& f = scene_.state().frame;
  target.x = std::clamp(target.x, 0.0, f.width);
  target.y = std::clamp(target.y, 0.0, f.height);
  const auto out = servo::servo_to(target, scene_, poses_, controller_, servo_cfg_, sink_);
  result.servo_iterations += out.iterations;
  return {out.converged, out.trajectory.back()};
}

bool PrimitiveExecutor::pick(const std::string& label,
                             const perception::ObjectPositionMap& objects,
                             ExecutionResult& result) {
  const auto& held = scene_.state().held;
  if (held) {
    if (*held == label) return true;
    result.reason = kReasonOccupied;
    return false;
  }
  const Point center = bbox_center(objects.at(label));
  const auto s = move_effector(center, result);
  if (!s.converged) {
    result.reason = "servo did not converge";
    return false;
  }
  const auto attach = scene_.attach(label);
  scene_.wait(cfg_.suction_seconds);
  switch (attach) {
    case SceneSim::AttachResult::Attached:
      grip_offset_ = Point{center.x - s.measured.x, center.y - s.measured.y};
      return true;
    case SceneSim::AttachResult::Occupied: result.reason = kReasonOccupied; return false;
    case SceneSim::AttachResult::UnknownObject: result.reason = kReasonNotDetected; return false;
    case SceneSim::AttachResult::NothingUnderEffector:
      result.reason = "nothing under effector";
      return false;
  }
  return false;
}

bool PrimitiveExecutor::carry_to(Point center, ExecutionResult& result) {
  const Point offset = grip_offset_.value_or(Point{});
  const auto s = move_effector({center.x - offset.x, center.y - offset.y}, result);
  scene_.release();
  grip_offset_.reset();
  scene_.wait(cfg_.suction_seconds);
  if (!s.converged) {
    result.reason = "servo did not converge";
    return false;
  }
  return true;
}

ExecutionResult PrimitiveExecutor::execute(const grammar::ActionCall& call,
                                           const perception::ObjectPositionMap& objects) {
  ExecutionResult r;
  const auto* spec = registry_.find(call.method);
  if (!spec) return fail(r, "unknown method '" + call.method + "'");
  if (spec->arity != call.args.size()) return fail(r, "arity mismatch for " + call.method);
  for (std::size_t i = 0; i < spec->object_args; ++i) {
    if (!objects.count(call.args[i])) return fail(r, kReasonNotDetected);
  }
  if (!scene_.state().held) grip_offset_.reset();

  const std::string& tag = spec->executor;
  const std::string& subject = call.args.empty() ? std::string() : call.args[0];

  if (tag == "pick_up") {
    if (!pick(subject, objects, r)) return fail(r, r.reason);
  } else if (tag == "hand_over") {
    if (!objects.count("hand")) return fail(r, kReasonNotDetected);
    if (!pick(subject, objects, r)) return fail(r, r.reason);
    if (!carry_to(bbox_center(objects.at("hand")), r)) return fail(r, r.reason);
  } else if (tag == "left_of" || tag == "right_of" || tag == "above" || tag == "below") {
    const Relation rel = tag == "left_of"    ? Relation::LeftOf
                         : tag == "right_of" ? Relation::RightOf
                         : tag == "above"    ? Relation::Above
                                             : Relation::Below;
    const auto goal = resolve_spatial_goal(rel, objects.at(call.args[1]), objects.at(subject),
                                           cfg_.margin, scene_.state().frame);
    r.goal_clipped = goal.clipped;
    if (!pick(subject, objects, r)) return fail(r, r.reason);
    if (!carry_to(goal.center, r)) return fail(r, r.reason);
  } else if (tag == "place_at") {
    const auto x = to_number(call.args[1]);
    const auto y = to_number(call.args[2]);
    if (!x || !y) return fail(r, "invalid coordinate");
    const auto& f = scene_.state().frame;
    const auto& box = objects.at(subject);
    const double hw = std::min(box.width() / 2.0, f.width / 2.0);
    const double hh = std::min(box.height() / 2.0, f.height / 2.0);
    const Point goal{std::clamp(*x, hw, f.width - hw), std::clamp(*y, hh, f.height - hh)};
    r.goal_clipped = !(goal == Point{*x, *y});
    if (!pick(subject, objects, r)) return fail(r, r.reason);
    if (!carry_to(goal, r)) return fail(r, r.reason);
  } else {
    return fail(r, "no executor for '" + tag + "'");
  }
  r.success = true;
  return r;
}

}  // namespace hri::sim
