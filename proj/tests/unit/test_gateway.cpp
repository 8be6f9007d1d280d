#include <doctest.h>

#include <future>
#include <sstream>

#include <httplib.h>

#include "hri/gateway/gateway.hpp"

using namespace hri;
using namespace hri::gateway;
using nlohmann::json;

namespace {

const std::string kData = HRI_DATA_DIR;

const fuzzy::IT2FuzzySystem& controller() {
  static const auto sys = fuzzy::IT2FuzzySystem::default_axis_controller();
  return sys;
}

// Splits an SSE byte stream into events, skipping comments.
std::vector<Event> parse_sse(const std::string& text) {
  std::vector<Event> out;
  std::istringstream in(text);
  std::string line;
  Event cur;
  bool any = false;
  while (std::getline(in, line)) {
    if (line.empty()) {
      if (any) out.push_back(cur);
      cur = {};
      any = false;
    } else if (line.rfind("id: ", 0) == 0) {
      cur.id = std::stoull(line.substr(4));
      any = true;
    } else if (line.rfind("event: ", 0) == 0) {
      cur.type = line.substr(7);
    } else if (line.rfind("data: ", 0) == 0) {
      cur.data = json::parse(line.substr(6));
    }
  }
  return out;
}

struct Rig {
  orch::SimClock clock;
  EventBus bus;
  Session session;
  Server server;
  int port;

  explicit Rig(SessionConfig cfg = {}, orch::Clock* c = nullptr)
      : session(sim::load_scene(kData + "/scenes/table_a.json"), controller(),
                c ? *c : clock, bus, cfg),
        server(session, bus),
        port(server.start("127.0.0.1", 0)) {}

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    return c;
  }
};

}  // namespace

TEST_CASE("event bus ordering, resume and capacity") {
  EventBus bus(3);
  CHECK(bus.last_id() == 0);
  CHECK(bus.wait(0, std::chrono::milliseconds(1)).empty());
  for (int i = 0; i < 5; ++i) CHECK(bus.publish("e", {{"i", i}}) == static_cast<std::uint64_t>(i + 1));
  const auto kept = bus.wait(0, std::chrono::milliseconds(1));
  REQUIRE(kept.size() == 3);
  CHECK(kept.front().id == 3);
  CHECK(kept.back().data["i"] == 4);
  CHECK(bus.wait(4, std::chrono::milliseconds(1)).size() == 1);

  auto waiter = std::async(std::launch::async,
                           [&] { return bus.wait(5, std::chrono::seconds(5)); });
  bus.publish("late", json::object());
  CHECK(waiter.get().at(0).type == "late");

  auto blocked = std::async(std::launch::async,
                            [&] { return bus.wait(6, std::chrono::seconds(5)); });
  bus.close();
  CHECK(blocked.get().empty());
  CHECK(bus.closed());
  CHECK_THROWS_AS(EventBus(0), std::invalid_argument);
}

TEST_CASE("sse framing") {
  CHECK(sse_frame({7, "stage", {{"stage", "stt"}}}) ==
        "id: 7\nevent: stage\ndata: {\"stage\":\"stt\"}\n\n");
  const auto back = parse_sse(sse_frame({1, "a", {{"x", 1}}}) + ": keepalive\n\n" +
                              sse_frame({2, "b", json::array()}));
  REQUIRE(back.size() == 2);
  CHECK(back[1].type == "b");
}

TEST_CASE("command validation") {
  orch::SimClock clock;
  EventBus bus;
  Session s(sim::load_scene(kData + "/scenes/table_a.json"), controller(), clock, bus);
  CHECK(s.submit(json::array()).status == 400);
  CHECK(s.submit(json::object()).status == 400);
  CHECK(s.submit({{"text", "a"}, {"actions", "[]"}}).status == 400);
  CHECK(s.submit({{"text", 3}}).status == 400);
  CHECK(s.submit({{"text", "grab the apple"}, {"seed", -1}}).status == 400);

  const auto parse = s.submit({{"actions", "[pick_up(apple"}});
  CHECK(parse.status == 400);
  CHECK(parse.body["offset"] == 14);
  CHECK(parse.body.contains("expected"));

  const auto bad = s.submit({{"actions", "[fly(apple), pick_up(a, b)]"}});
  CHECK(bad.status == 422);
  CHECK(bad.body["violations"].size() == 2);
  CHECK(s.submit({{"actions", "[]"}}).status == 422);
  CHECK(s.submit({{"actions", json::array({{{"method", 3}}})}}).status == 400);
  CHECK(s.submit({{"actions", json::array({{{"method", "pick_up"}}})}}).status == 422);
  CHECK_FALSE(s.busy());
  CHECK(s.metrics_json()["trials"] == 0);
  CHECK(s.metrics_json()["report"].is_null());

  const auto ok = s.submit({{"actions", json::array({{{"method", "pick_up"},
                                                      {"args", {"apple"}}}})}});
  CHECK(ok.status == 202);
  s.wait_idle();
  CHECK(s.scene_json()["scene"]["held"] == "apple");
}

TEST_CASE("second command while one runs is refused") {
  orch::SteadyClock steady;
  SessionConfig cfg;
  cfg.pipeline.step_pace = 0.01;  // real time per servo step
  EventBus bus;
  Session s(sim::load_scene(kData + "/scenes/table_a.json"), controller(), steady, bus, cfg);
  CHECK(s.submit({{"text", "give me the banana"}}).status == 202);
  CHECK(s.busy());
  const auto r = s.submit({{"text", "grab the apple"}});
  CHECK(r.status == 409);
  const auto mid = s.scene_json();
  CHECK(mid["busy"] == true);
  s.wait_idle();
  CHECK(s.metrics_json()["trials"] == 1);
  CHECK(s.submit({{"text", "grab the apple"}}).status == 202);
  s.wait_idle();
  CHECK(s.metrics_json()["trials"] == 2);
}

TEST_CASE("http round trip: grab the apple") {
  Rig rig;
  auto c = rig.client();

  auto scene = c.Get("/scene");
  REQUIRE(scene);
  CHECK(scene->status == 200);
  CHECK(scene->get_header_value("Content-Type") == "application/json");
  const auto before = json::parse(scene->body);
  CHECK(before["scene"]["held"].is_null());
  CHECK(before["scene"]["objects"].size() == 5);

  CHECK(c.Post("/command", "{", "application/json")->status == 400);
  const auto bad = c.Post("/command", R"j({"actions": "pick_up(apple)"})j", "application/json");
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body)["offset"] == 0);

  const auto post = c.Post("/command", R"({"text": "grab the apple"})", "application/json");
  REQUIRE(post);
  CHECK(post->status == 202);
  const auto id = json::parse(post->body)["id"].get<int>();
  rig.session.wait_idle();

  // Replay the stream from the start up to this command's trial event.
  std::string stream;
  auto events_client = rig.client();
  events_client.Get("/events?after=0", [&](const char* data, std::size_t n) {
    stream.append(data, n);
    const auto at = stream.find("event: trial\n");
    return at == std::string::npos || stream.find("\n\n", at) == std::string::npos;
  });
  const auto events = parse_sse(stream);
  REQUIRE_FALSE(events.empty());
  std::vector<std::string> stage_flow;
  std::vector<json> trajectory;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0) CHECK(events[i].id == events[i - 1].id + 1);
    CHECK(events[i].data["command"] == id);
    if (events[i].type == "stage") {
      stage_flow.push_back(events[i].data["stage"].get<std::string>() + ":" +
                           events[i].data["state"].get<std::string>());
    }
    if (events[i].type == "trajectory") trajectory.push_back(events[i].data);
  }
  CHECK(stage_flow == std::vector<std::string>{"stt:running", "stt:ok", "ae:running", "ae:ok",
                                               "od:running", "od:ok", "ra:running", "ra:ok"});
  CHECK(events.back().type == "trial");
  CHECK(events.back().data["a_total"] == 100);
  REQUIRE_FALSE(trajectory.empty());
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    CHECK(trajectory[i]["iteration"].get<int>() > trajectory[i - 1]["iteration"].get<int>());
  }

  const auto after = json::parse(c.Get("/scene")->body);
  CHECK(after["scene"]["held"] == "apple");
  CHECK(after["busy"] == false);
  // Polyline: start pose, then one point per trajectory event.
  CHECK(after["trajectory"].size() == trajectory.size() + 1);
  CHECK(after["trajectory"].back()[0] == trajectory.back()["x"]);

  const auto metrics = json::parse(c.Get("/metrics")->body);
  CHECK(metrics["trials"] == 1);
  CHECK(metrics["report"]["metrics"]["a_total"]["mean"] == 100.0);
  CHECK(metrics["last"]["a_total"] == 100);

  CHECK(c.Get("/nope")->status == 404);
  CHECK(c.Get("/events?after=x")->status == 400);
}

TEST_CASE("open event streams end when the server stops") {
  Rig rig;
  auto c = rig.client();
  auto reader = std::async(std::launch::async, [&] {
    std::string s;
    c.Get("/events", [&](const char* d, std::size_t n) {
      s.append(d, n);
      return true;
    });
    return s;
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  rig.server.stop();
  CHECK(reader.wait_for(std::chrono::seconds(5)) == std::future_status::ready);
}
