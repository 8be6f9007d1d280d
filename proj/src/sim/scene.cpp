#include "hri/sim/scene.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hri::sim {

using nlohmann::json;

void NoiseModel::validate() const {
  if (!(actuation_sigma >= 0.0) || !(perception_sigma >= 0.0)) {
    throw std::invalid_argument("noise sigmas must be nonnegative");
  }
}

void SceneState::validate() const {
  if (!(frame.width > 0.0) || !(frame.height > 0.0)) {
    throw std::invalid_argument("scene: frame must have positive size");
  }
  for (const auto& [label, box] : objects) {
    if (label.empty()) throw std::invalid_argument("scene: empty object label");
    if (!box.valid()) throw std::invalid_argument("scene: degenerate box for '" + label + "'");
    if (!box.within(frame.width, frame.height)) {
      throw std::invalid_argument("scene: box for '" + label + "' leaves the frame");
    }
  }
  if (effector.x < 0.0 || effector.y < 0.0 || effector.x > frame.width ||
      effector.y > frame.height) {
    throw std::invalid_argument("scene: effector outside the frame");
  }
  if (held && !objects.count(*held)) {
    throw std::invalid_argument("scene: held object '" + *held + "' does not exist");
  }
}

json to_json(const SceneState& s) {
  json objects = json::array();
  for (const auto& [label, b] : s.objects) {
    objects.push_back({{"label", label}, {"box", {b.x_min, b.y_min, b.x_max, b.y_max}}});
  }
  return {{"frame", {s.frame.width, s.frame.height}},
          {"effector", {s.effector.x, s.effector.y}},
          {"held", s.held ? json(*s.held) : json(nullptr)},
          {"seed", s.rng_seed},
          {"time", s.time},
          {"objects", objects}};
}

SceneState scene_from_json(const json& j) {
  SceneState s;
  try {
    if (j.contains("frame")) {
      s.frame = {j.at("frame").at(0).get<double>(), j.at("frame").at(1).get<double>()};
    }
    if (j.contains("effector")) {
      s.effector = {j.at("effector").at(0).get<double>(), j.at("effector").at(1).get<double>()};
    }
    s.rng_seed = j.value("seed", std::uint64_t{0});
    for (const auto& o : j.value("objects", json::array())) {
      const auto& b = o.at("box");
      const auto label = o.at("label").get<std::string>();
      if (s.objects.count(label)) throw std::invalid_argument("scene: duplicate label " + label);
      s.objects[label] = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                          b.at(3).get<double>()};
    }
    if (j.contains("held") && !j.at("held").is_null()) s.held = j.at("held").get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scene: ") + e.what());
  }
  s.validate();
  return s;
}

SceneState load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return scene_from_json(j);
}

SceneSim::SceneSim(SceneState initial, NoiseModel noise, double control_period)
    : state_(std::move(initial)), noise_(noise), control_period_(control_period),
      rng_(state_.rng_seed) {
  state_.validate();
  noise_.validate();
  if (!(control_period_ > 0.0)) throw std::invalid_argument("control period must be positive");
}

const SceneState& SceneSim::apply_move(double dx, double dy) {
  if (!std::isfinite(dx) || !std::isfinite(dy)) {
    throw std::invalid_argument("apply_move: non-finite step");
  }
  if (noise_.actuation_sigma > 0.0) {
    std::normal_distribution<double> n(0.0, noise_.actuation_sigma);
    dx += n(rng_);
    dy += n(rng_);
  }
  const auto& f = state_.frame;
  auto& e = state_.effector;
  double lo_x = -e.x, hi_x = f.width - e.x;
  double lo_y = -e.y, hi_y = f.height - e.y;
  BBox* held = nullptr;
  if (state_.held) {
    held = &state_.objects.at(*state_.held);
    lo_x = std::max(lo_x, -held->x_min);
    hi_x = std::min(hi_x, f.width - held->x_max);
    lo_y = std::max(lo_y, -held->y_min);
    hi_y = std::min(hi_y, f.height - held->y_max);
  }
  dx = std::clamp(dx, std::min(lo_x, 0.0), std::max(hi_x, 0.0));
  dy = std::clamp(dy, std::min(lo_y, 0.0), std::max(hi_y, 0.0));
  e.x += dx;
  e.y += dy;
  if (held) *held = held->translated(dx, dy);
  state_.time += control_period_;
  return state_;
}

void SceneSim::wait(double seconds) {
  if (seconds > 0.0) state_.time += seconds;
}

SceneSim::AttachResult SceneSim::attach(const std::string& label) {
  if (state_.held) return AttachResult::Occupied;
  const auto it = state_.objects.find(label);
  if (it == state_.objects.end()) return AttachResult::UnknownObject;
  const auto& b = it->second;
  const auto& e = state_.effector;
  if (e.x < b.x_min || e.x > b.x_max || e.y < b.y_min || e.y > b.y_max) {
    return AttachResult::NothingUnderEffector;
  }
  if (grip_fault_) {
    grip_fault_ = false;
    return AttachResult::Attached;
  }
  state_.held = label;
  return AttachResult::Attached;
}

void SceneSim::release() { state_.held.reset(); }

std::optional<Point> SceneSim::held_offset() const {
  if (!state_.held) return std::nullopt;
  const auto c = bbox_center(state_.objects.at(*state_.held));
  return Point{c.x - state_.effector.x, c.y - state_.effector.y};
}

SpatialGoal resolve_spatial_goal(Relation relation, const BBox& reference, const BBox& moving,
                                 double margin, FrameSize frame) {
  if (!reference.valid() || !moving.valid()) {
    throw std::invalid_argument("resolve_spatial_goal: degenerate box");
  }
  const Point ref = bbox_center(reference);
  const double hw = moving.width() / 2.0;
  const double hh = moving.height() / 2.0;
  Point goal = ref;
  switch (relation) {
    case Relation::LeftOf: goal.x = reference.x_min - margin - hw; break;
    case Relation::RightOf: goal.x = reference.x_max + margin + hw; break;
    case Relation::Above: goal.y = reference.y_min - margin - hh; break;
    case Relation::Below: goal.y = reference.y_max + margin + hh; break;
  }
  SpatialGoal out{goal, false};
  out.center.x = std::clamp(goal.x, std::min(hw, frame.width / 2.0),
                            std::max(frame.width - hw, frame.width / 2.0));
  out.center.y = std::clamp(goal.y, std::min(hh, frame.height / 2.0),
                            std::max(frame.height - hh, frame.height / 2.0));
  out.clipped = !(out.center == goal);
  return out;
}

}  // namespace hri::sim
