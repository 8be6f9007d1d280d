#include "hri/perception/perception.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "hri/net/http_json.hpp"

namespace hri::perception {

std::string detection_prompt(std::string_view label) {
  std::string out(kDetectionTask);
  out += ' ';
  out += label;
  return out;
}

QueryResult query_objects(std::span<const std::string> labels, Detector& detector,
                          bool concurrent) {
  if (labels.empty()) throw std::invalid_argument("query_objects: no labels requested");
  std::vector<std::string> unique;
  for (const auto& l : labels) {
    if (l.empty()) throw std::invalid_argument("query_objects: empty label");
    if (std::find(unique.begin(), unique.end(), l) == unique.end()) unique.push_back(l);
  }

  struct Outcome {
    std::optional<BBox> box;
    std::optional<std::string> failure;
  };
  auto run = [&detector](const std::string& label) {
    Outcome o;
    try {
      o.box = detector.detect(label);
      if (o.box && !o.box->valid()) {
        o.box.reset();
        o.failure = "detector returned a degenerate box";
      }
    } catch (const std::exception& e) {
      o.failure = e.what();
    }
    return o;
  };

  std::vector<Outcome> outcomes;
  if (concurrent) {
    std::vector<std::future<Outcome>> pending;
    for (const auto& l : unique) pending.push_back(std::async(std::launch::async, run, l));
    for (auto& f : pending) outcomes.push_back(f.get());
  } else {
    for (const auto& l : unique) outcomes.push_back(run(l));
  }

  QueryResult r;
  r.queries = static_cast<int>(unique.size());
  for (std::size_t i = 0; i < unique.size(); ++i) {
    if (outcomes[i].failure) r.failures[unique[i]] = *outcomes[i].failure;
    else if (outcomes[i].box) r.objects[unique[i]] = *outcomes[i].box;
  }
  return r;
}

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

SimDetector::SimDetector(const sim::SceneSim& scene, double sigma, std::uint64_t seed)
    : scene_(scene), sigma_(sigma), seed_(seed) {
  if (!(sigma_ >= 0.0)) throw std::invalid_argument("detector noise must be nonnegative");
}

std::optional<BBox> SimDetector::detect(std::string_view label) {
  const auto& state = scene_.state();
  const auto it = state.objects.find(label);
  if (it == state.objects.end()) return std::nullopt;
  BBox b = it->second;
  if (sigma_ == 0.0) return b;

  const auto frame_index =
      static_cast<std::uint64_t>(std::llround(state.time / scene_.control_period()));
  std::seed_seq seq{seed_, fnv1a(label), frame_index};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> n(0.0, sigma_);
  auto jitter = [&] { return std::clamp(n(rng), -noise_bound(), noise_bound()); };
  BBox noisy{b.x_min + jitter(), b.y_min + jitter(), b.x_max + jitter(), b.y_max + jitter()};
  noisy.x_min = std::max(0.0, noisy.x_min);
  noisy.y_min = std::max(0.0, noisy.y_min);
  noisy.x_max = std::min(state.frame.width, noisy.x_max);
  noisy.y_max = std::min(state.frame.height, noisy.y_max);
  if (!noisy.valid()) return b;
  return noisy;
}

HttpDetector::HttpDetector(std::string url, std::string frame_ref,
                           std::chrono::milliseconds timeout)
    : url_(std::move(url)), frame_ref_(std::move(frame_ref)), timeout_(timeout) {
  net::parse_endpoint(url_);
}

std::optional<BBox> HttpDetector::detect(std::string_view label) {
  const auto reply =
      net::post_json(url_, {{"frame", frame_ref_}, {"prompt", detection_prompt(label)}}, timeout_);
  if (!reply.contains("box") || reply.at("box").is_null()) return std::nullopt;
  try {
    const auto& b = reply.at("box");
    return BBox{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                b.at(3).get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw net::HttpError(url_ + ": malformed box: " + e.what());
  }
}

StalePoseError::StalePoseError(double age, double bound)
    : std::runtime_error("effector pose is stale (" + std::to_string(age) + " s > " +
                         std::to_string(bound) + " s)"),
      age_(age) {}

EffectorPose effector_pose(PoseProvider& provider, double staleness_bound) {
  const auto pose = provider.latest();
  const double age = provider.now() - pose.timestamp;
  if (age > staleness_bound) throw StalePoseError(age, staleness_bound);
  return pose;
}

SimPoseProvider::SimPoseProvider(const sim::SceneSim& scene, double sigma, std::uint64_t seed)
    : scene_(scene), sigma_(sigma), rng_(seed) {
  if (!(sigma_ >= 0.0)) throw std::invalid_argument("pose noise must be nonnegative");
}

EffectorPose SimPoseProvider::latest() {
  std::lock_guard lock(mu_);
  if (frozen_ && last_) return *last_;
  const auto& s = scene_.state();
  Point p = s.effector;
  if (sigma_ > 0.0) {
    std::normal_distribution<double> n(0.0, sigma_);
    p.x += n(rng_);
    p.y += n(rng_);
    p.x = std::clamp(p.x, 0.0, s.frame.width);
    p.y = std::clamp(p.y, 0.0, s.frame.height);
  }
  last_ = EffectorPose{p, s.time, PoseSource::GroundTruthNoisy};
  return *last_;
}

}  // namespace hri::perception
