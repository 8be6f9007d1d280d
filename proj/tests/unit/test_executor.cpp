#include <doctest.h>

#include "hri/sim/executor.hpp"

using namespace hri;
using namespace hri::sim;

namespace {

const fuzzy::IT2FuzzySystem& controller() {
  static const auto sys = fuzzy::IT2FuzzySystem::default_axis_controller();
  return sys;
}

SceneState table() {
  SceneState s;
  s.effector = {640.0, 360.0};
  s.objects["apple"] = {200.0, 300.0, 260.0, 360.0};
  s.objects["banana"] = {600.0, 500.0, 700.0, 540.0};
  s.objects["hand"] = {1000.0, 100.0, 1100.0, 200.0};
  return s;
}

struct Rig {
  SceneSim scene;
  perception::SimPoseProvider poses;
  perception::SimDetector detector;
  PrimitiveExecutor exec;

  explicit Rig(SceneState s, NoiseModel noise = {})
      : scene(std::move(s), noise),
        poses(scene, noise.perception_sigma, 11),
        detector(scene, noise.perception_sigma, 12),
        exec(scene, poses, controller(), servo::ServoConfig{}) {}

  perception::ObjectPositionMap look() {
    std::vector<std::string> labels;
    for (const auto& [l, b] : scene.state().objects) labels.push_back(l);
    return perception::query_objects(labels, detector).objects;
  }

  ExecutionResult run(const std::string& text) {
    const auto calls = grammar::parse_actions("[" + text + "]");
    REQUIRE(calls.size() == 1);
    return exec.execute(calls.front(), look());
  }

  Point center(const std::string& label) { return bbox_center(scene.state().objects.at(label)); }
};

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST_CASE("pick_up attaches the object") {
  Rig rig(table());
  const auto r = rig.run("pick_up(apple)");
  CHECK(r.success);
  CHECK(r.reason.empty());
  CHECK(r.servo_iterations > 0);
  CHECK(rig.scene.state().held == std::optional<std::string>("apple"));
}

TEST_CASE("pick_up of an undetected object fails without moving") {
  Rig rig(table());
  const auto before = rig.scene.state().effector;
  const auto r = rig.run("pick_up(cup)");
  CHECK_FALSE(r.success);
  CHECK(r.reason == kReasonNotDetected);
  CHECK(rig.scene.state().effector == before);
}

TEST_CASE("a second pick while holding reports an occupied gripper") {
  Rig rig(table());
  REQUIRE(rig.run("pick_up(apple)").success);
  const auto r = rig.run("pick_up(banana)");
  CHECK_FALSE(r.success);
  CHECK(r.reason == kReasonOccupied);
  CHECK(rig.scene.state().held == std::optional<std::string>("apple"));
}

TEST_CASE("hand_over delivers to the hand and releases") {
  Rig rig(table());
  const auto r = rig.run("hand_over(banana)");
  CHECK(r.success);
  CHECK_FALSE(rig.scene.state().held);
  CHECK(dist(rig.center("banana"), rig.center("hand")) < 15.0);
}

TEST_CASE("hand_over without a hand in view fails") {
  auto s = table();
  s.objects.erase("hand");
  Rig rig(s);
  const auto r = rig.run("hand_over(banana)");
  CHECK_FALSE(r.success);
  CHECK(r.reason == kReasonNotDetected);
}

TEST_CASE("relational moves satisfy the relation") {
  const std::pair<const char*, int> cases[] = {{"move_object_to_left_of(banana, apple)", 0},
                                               {"move_object_to_right_of(apple, banana)", 1},
                                               {"move_object_above(apple, banana)", 2},
                                               {"move_object_below(banana, apple)", 3}};
  for (const auto& [text, kind] : cases) {
    CAPTURE(text);
    Rig rig(table());
    const auto call = grammar::parse_actions("[" + std::string(text) + "]").front();
    const auto r = rig.exec.execute(call, rig.look());
    REQUIRE(r.success);
    const auto& m = rig.scene.state().objects.at(call.args[0]);
    const auto& ref = rig.scene.state().objects.at(call.args[1]);
    switch (kind) {
      case 0: CHECK(m.x_max <= ref.x_min); break;
      case 1: CHECK(m.x_min >= ref.x_max); break;
      case 2: CHECK(m.y_max <= ref.y_min); break;
      case 3: CHECK(m.y_min >= ref.y_max); break;
    }
    CHECK_FALSE(rig.scene.state().held);
  }
}

TEST_CASE("place_at moves the object center to the point") {
  Rig rig(table());
  const auto r = rig.run("place_at(apple, 900, 600)");
  CHECK(r.success);
  CHECK_FALSE(r.goal_clipped);
  CHECK(dist(rig.center("apple"), {900.0, 600.0}) < 15.0);
}

TEST_CASE("place_at rejects non-numeric coordinates and clips out-of-frame ones") {
  Rig rig(table());
  auto r = rig.run("place_at(apple, left, 600)");
  CHECK_FALSE(r.success);
  CHECK(r.reason == "invalid coordinate");
  r = rig.run("place_at(apple, 5000, 600)");
  CHECK(r.success);
  CHECK(r.goal_clipped);
  CHECK(rig.scene.state().objects.at("apple").within(1280.0, 720.0));
}

TEST_CASE("grip fault leaves the object behind") {
  Rig rig(table());
  rig.scene.arm_grip_fault();
  const auto start = rig.center("apple");
  const auto r = rig.run("place_at(apple, 900, 600)");
  CHECK(r.success);  // the executor cannot observe the slip
  CHECK(rig.center("apple") == start);
}

TEST_CASE("unknown method and wrong arity are reported, not thrown") {
  Rig rig(table());
  CHECK(rig.exec.execute({"fly", {"apple"}}, rig.look()).reason.find("unknown") == 0);
  CHECK(rig.exec.execute({"pick_up", {"apple", "banana"}}, rig.look()).reason.find("arity") == 0);
}

TEST_CASE("noise-free runs are deterministic and exact") {
  Rig a(table(), NoiseModel{0.0, 0.0});
  Rig b(table(), NoiseModel{0.0, 0.0});
  CHECK(a.run("hand_over(apple)").servo_iterations == b.run("hand_over(apple)").servo_iterations);
  CHECK(a.scene.state() == b.scene.state());
}
