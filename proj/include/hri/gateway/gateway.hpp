#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hri/orchestrator/pipeline.hpp"

namespace hri::gateway {

struct Event {
  std::uint64_t id = 0;  // 1-based, strictly increasing
  std::string type;
  nlohmann::json data;
};

/// Fan-out of pipeline events to stream readers. Keeps the most recent
/// `capacity` events so a reconnecting reader can resume by id.
class EventBus {
 public:
  explicit EventBus(std::size_t capacity = 4096);

  std::uint64_t publish(std::string type, nlohmann::json data);

  /// Retained events with id > after. Blocks up to `timeout` when there are
  /// none yet; returns empty on timeout or once closed.
  std::vector<Event> wait(std::uint64_t after, std::chrono::milliseconds timeout) const;

  std::uint64_t last_id() const;
  void close();
  bool closed() const;

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::deque<Event> events_;
  std::size_t capacity_;
  std::uint64_t next_id_ = 1;
  bool closed_ = false;
};

/// "id: 7\nevent: stage\ndata: {...}\n\n"
std::string sse_frame(const Event& e);

struct Response {
  int status = 200;
  nlohmann::json body;
};

struct SessionConfig {
  orch::PipelineConfig pipeline;
  orch::AdapterKind adapters = orch::AdapterKind::Mock;
  orch::ExternalEndpoints endpoints;
  std::uint64_t seed = 1;
};

/// One scene, one pipeline, at most one command in flight. The worker
/// thread owns the scene while a command runs; readers only ever see the
/// snapshot it publishes after each simulation step.
class Session {
 public:
  Session(sim::SceneState initial, const fuzzy::IT2FuzzySystem& controller, orch::Clock& clock,
          EventBus& bus, SessionConfig cfg = {});
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// {"scene": snapshot, "trajectory": [[x, y], ...] of the current command,
  ///  "busy": bool, "commands": count}
  nlohmann::json scene_json() const;
  /// {"trials": n, "report": aggregate or null, "last": record or null}
  nlohmann::json metrics_json() const;

  /// Body {"text": "..."} or {"actions": "[...]" | [{method, args}, ...]},
  /// optional "seed". 202 when accepted, 400 on a malformed body or parse
  /// error (with "offset"), 422 when validation fails, 409 while busy.
  Response submit(const nlohmann::json& body);

  bool busy() const;
  void wait_idle();

 private:
  void run(orch::CommandInput input, std::uint64_t id, std::uint64_t seed);

  sim::SceneSim scene_;  // touched only by the worker, or while idle
  orch::Pipeline pipeline_;
  EventBus& bus_;
  SessionConfig cfg_;

  mutable std::mutex mu_;
  std::condition_variable idle_cv_;
  bool busy_ = false;
  sim::SceneState snapshot_;
  std::vector<std::array<double, 2>> trajectory_;
  std::vector<orch::TrialRecord> records_;
  std::uint64_t commands_ = 0;
  std::thread worker_;
};

/// HTTP front end: GET /scene, GET /metrics, POST /command, GET /events.
class Server {
 public:
  Server(Session& session, EventBus& bus);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving on a background thread. Port 0 picks a free
  /// port. Returns the bound port; throws std::runtime_error on failure.
  int start(const std::string& host, int port);
  /// Closes the event bus so open streams end, then stops listening.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hri::gateway
