#include "hri/gateway/gateway.hpp"

#include <stdexcept>

#include <httplib.h>

namespace hri::gateway {

EventBus::EventBus(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("event bus capacity must be positive");
}

std::uint64_t EventBus::publish(std::string type, nlohmann::json data) {
  std::uint64_t id;
  {
    std::lock_guard lock(mu_);
    id = next_id_++;
    events_.push_back({id, std::move(type), std::move(data)});
    if (events_.size() > capacity_) events_.pop_front();
  }
  cv_.notify_all();
  return id;
}

std::vector<Event> EventBus::wait(std::uint64_t after, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || next_id_ - 1 > after; });
  std::vector<Event> out;
  if (closed_) return out;
  for (const auto& e : events_) {
    if (e.id > after) out.push_back(e);
  }
  return out;
}

std::uint64_t EventBus::last_id() const {
  std::lock_guard lock(mu_);
  return next_id_ - 1;
}

void EventBus::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool EventBus::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::string sse_frame(const Event& e) {
  return "id: " + std::to_string(e.id) + "\nevent: " + e.type + "\ndata: " + e.data.dump() +
         "\n\n";
}

Session::Session(sim::SceneState initial, const fuzzy::IT2FuzzySystem& controller,
                 orch::Clock& clock, EventBus& bus, SessionConfig cfg)
    : scene_(std::move(initial), cfg.pipeline.noise),
      pipeline_(clock, controller, cfg.pipeline, cfg.adapters, cfg.endpoints),
      bus_(bus),
      cfg_(std::move(cfg)),
      snapshot_(scene_.state()) {}

Session::~Session() {
  wait_idle();
  if (worker_.joinable()) worker_.join();
}

nlohmann::json Session::scene_json() const {
  std::lock_guard lock(mu_);
  nlohmann::json traj = nlohmann::json::array();
  for (const auto& p : trajectory_) traj.push_back({p[0], p[1]});
  return {{"scene", sim::to_json(snapshot_)},
          {"trajectory", std::move(traj)},
          {"busy", busy_},
          {"commands", commands_}};
}

nlohmann::json Session::metrics_json() const {
  std::lock_guard lock(mu_);
  if (records_.empty()) {
    return {{"trials", 0}, {"report", nullptr}, {"last", nullptr}};
  }
  return {{"trials", records_.size()},
          {"report", orch::to_json(orch::aggregate(records_))},
          {"last", orch::to_json(records_.back())}};
}

bool Session::busy() const {
  std::lock_guard lock(mu_);
  return busy_;
}

void Session::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return !busy_; });
}

namespace {

Response error(int status, const std::string& message) {
  return {status, {{"error", message}}};
}

}  // namespace

Response Session::submit(const nlohmann::json& body) {
  if (!body.is_object()) return error(400, "body must be a JSON object");
  const bool has_text = body.contains("text");
  const bool has_actions = body.contains("actions");
  if (has_text == has_actions) return error(400, "expected exactly one of \"text\" or \"actions\"");

  orch::CommandInput input;
  if (has_text) {
    if (!body["text"].is_string()) return error(400, "\"text\" must be a string");
    input.text = body["text"].get<std::string>();
  } else {
    const auto& a = body["actions"];
    try {
      input.actions = a.is_string() ? grammar::parse_actions(a.get<std::string>())
                                    : grammar::calls_from_json(a);
    } catch (const grammar::ParseError& e) {
      return {400, {{"error", e.what()}, {"offset", e.offset()}, {"expected", e.expected()}}};
    }
    try {
      grammar::validate(*input.actions, pipeline_.registry());
    } catch (const grammar::ValidationError& e) {
      nlohmann::json v = nlohmann::json::array();
      for (const auto& x : e.violations()) {
        v.push_back({{"index", x.index}, {"method", x.method}, {"message", x.message()}});
      }
      return {422, {{"error", e.what()}, {"violations", std::move(v)}}};
    }
    if (input.actions->empty()) return error(422, "empty action list");
  }
  std::uint64_t seed = 0;
  if (body.contains("seed")) {
    if (!body["seed"].is_number_unsigned()) return error(400, "\"seed\" must be a nonnegative integer");
    seed = body["seed"].get<std::uint64_t>();
  }

  std::uint64_t id;
  {
    std::lock_guard lock(mu_);
    if (busy_) return error(409, "a command is already running");
    busy_ = true;
    id = ++commands_;
    trajectory_.clear();
    trajectory_.push_back({snapshot_.effector.x, snapshot_.effector.y});
  }
  if (worker_.joinable()) worker_.join();
  if (!body.contains("seed")) seed = cfg_.seed + id;
  worker_ = std::thread(&Session::run, this, std::move(input), id, seed);
  return {202, {{"id", id}, {"seed", seed}}};
}

void Session::run(orch::CommandInput input, std::uint64_t id, std::uint64_t seed) {
  auto sink = [&](const std::string& type, const nlohmann::json& payload) {
    if (type == "trajectory" || type == "scene" || type == "pose") {
      std::lock_guard lock(mu_);
      snapshot_ = scene_.state();
      if (type == "trajectory") {
        trajectory_.push_back({payload["x"].get<double>(), payload["y"].get<double>()});
      }
    }
    nlohmann::json data = payload;
    if (data.is_object()) data["command"] = id;
    bus_.publish(type, std::move(data));
  };
  orch::TrialRecord record;
  try {
    record = pipeline_.run_command(scene_, input, seed, {}, sink).record;
  } catch (const std::exception& e) {
    // run_command folds stage errors into the record; this is bookkeeping
    // failing, so report it and leave the metrics alone.
    bus_.publish("error", {{"command", id}, {"error", e.what()}});
    std::lock_guard lock(mu_);
    snapshot_ = scene_.state();
    busy_ = false;
    idle_cv_.notify_all();
    return;
  }
  record.id = "cmd" + std::to_string(id);
  {
    std::lock_guard lock(mu_);
    snapshot_ = scene_.state();
    records_.push_back(std::move(record));
    busy_ = false;
  }
  idle_cv_.notify_all();
}

struct Server::Impl {
  Impl(Session& s, EventBus& b) : session(s), bus(b) {}
  Session& session;
  EventBus& bus;
  httplib::Server http;
  std::thread thread;
};

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

Server::Server(Session& session, EventBus& bus)
    : impl_(std::make_unique<Impl>(session, bus)) {
  auto& http = impl_->http;
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  http.Get("/scene", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, impl_->session.scene_json());
  });
  http.Get("/metrics", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, impl_->session.metrics_json());
  });
  http.Post("/command", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
      send_json(res, 400, {{"error", "body is not valid JSON"}});
      return;
    }
    const auto r = impl_->session.submit(body);
    send_json(res, r.status, r.body);
  });
  http.Options("/command", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "POST");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  http.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
    // Resume after Last-Event-ID (or ?after=N); otherwise only new events.
    std::uint64_t after = impl_->bus.last_id();
    const std::string resume = req.has_header("Last-Event-ID") ? req.get_header_value("Last-Event-ID")
                               : req.has_param("after")         ? req.get_param_value("after")
                                                                : "";
    if (!resume.empty()) {
      try {
        after = std::stoull(resume);
      } catch (const std::exception&) {
        send_json(res, 400, {{"error", "bad event id: " + resume}});
        return;
      }
    }
    res.set_header("Cache-Control", "no-cache");
    auto cursor = std::make_shared<std::uint64_t>(after);
    res.set_chunked_content_provider(
        "text/event-stream", [this, cursor](std::size_t, httplib::DataSink& sink) {
          const auto events = impl_->bus.wait(*cursor, std::chrono::milliseconds(500));
          if (impl_->bus.closed()) {
            sink.done();
            return false;
          }
          std::string chunk;
          for (const auto& e : events) {
            chunk += sse_frame(e);
            *cursor = e.id;
          }
          if (chunk.empty()) chunk = ": keepalive\n\n";
          return sink.write(chunk.data(), chunk.size());
        });
  });
}

Server::~Server() { stop(); }

int Server::start(const std::string& host, int port) {
  auto& http = impl_->http;
  const int bound = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([&http] { http.listen_after_bind(); });
  http.wait_until_ready();
  return bound;
}

void Server::stop() {
  if (!impl_) return;
  impl_->bus.close();
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace hri::gateway
