#include "hri/orchestrator/script.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

namespace hri::orch {

namespace {

const BBox& box_of(const sim::SceneState& s, const std::string& label, bool& ok) {
  static const BBox none{};
  const auto it = s.objects.find(label);
  ok = it != s.objects.end();
  return ok ? it->second : none;
}

class HeldPredicate final : public Predicate {
 public:
  explicit HeldPredicate(std::optional<std::string> label) : label_(std::move(label)) {}
  bool holds(const sim::SceneState& s) const override { return s.held == label_; }
  nlohmann::json to_json() const override {
    return {{"held", label_ ? nlohmann::json(*label_) : nlohmann::json(nullptr)}};
  }

 private:
  std::optional<std::string> label_;
};

class RelationPredicate final : public Predicate {
 public:
  RelationPredicate(std::string kind, std::string a, std::string b)
      : kind_(std::move(kind)), a_(std::move(a)), b_(std::move(b)) {}
  bool holds(const sim::SceneState& s) const override {
    bool ok_a = false;
    bool ok_b = false;
    const BBox& a = box_of(s, a_, ok_a);
    const BBox& b = box_of(s, b_, ok_b);
    if (!ok_a || !ok_b) return false;
    if (kind_ == "left_of") return a.x_max < b.x_min;
    if (kind_ == "right_of") return a.x_min > b.x_max;
    if (kind_ == "above") return a.y_max < b.y_min;
    return a.y_min > b.y_max;  // below
  }
  nlohmann::json to_json() const override { return {{kind_, {a_, b_}}}; }

 private:
  std::string kind_;
  std::string a_;
  std::string b_;
};

class NearPredicate final : public Predicate {
 public:
  NearPredicate(std::string a, std::string b, double tol)
      : a_(std::move(a)), b_(std::move(b)), tol_(tol) {}
  bool holds(const sim::SceneState& s) const override {
    bool ok_a = false;
    bool ok_b = false;
    const BBox& a = box_of(s, a_, ok_a);
    const BBox& b = box_of(s, b_, ok_b);
    if (!ok_a || !ok_b) return false;
    const auto ca = bbox_center(a);
    const auto cb = bbox_center(b);
    return std::hypot(ca.x - cb.x, ca.y - cb.y) <= tol_;
  }
  nlohmann::json to_json() const override { return {{"near", {a_, b_}}, {"tol", tol_}}; }

 private:
  std::string a_;
  std::string b_;
  double tol_;
};

class AtPredicate final : public Predicate {
 public:
  AtPredicate(std::string a, Point p, double tol) : a_(std::move(a)), p_(p), tol_(tol) {}
  bool holds(const sim::SceneState& s) const override {
    bool ok = false;
    const BBox& a = box_of(s, a_, ok);
    if (!ok) return false;
    const auto c = bbox_center(a);
    return std::hypot(c.x - p_.x, c.y - p_.y) <= tol_;
  }
  nlohmann::json to_json() const override {
    return {{"at", {a_, p_.x, p_.y}}, {"tol", tol_}};
  }

 private:
  std::string a_;
  Point p_;
  double tol_;
};

class AllPredicate final : public Predicate {
 public:
  explicit AllPredicate(std::vector<std::unique_ptr<Predicate>> parts) : parts_(std::move(parts)) {}
  bool holds(const sim::SceneState& s) const override {
    for (const auto& p : parts_) {
      if (!p->holds(s)) return false;
    }
    return true;
  }
  nlohmann::json to_json() const override {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : parts_) list.push_back(p->to_json());
    return {{"all", list}};
  }

 private:
  std::vector<std::unique_ptr<Predicate>> parts_;
};

double tolerance(const nlohmann::json& j, double fallback) {
  if (!j.contains("tol")) return fallback;
  const double t = j.at("tol").get<double>();
  if (!(t >= 0.0)) throw ScriptError("predicate tol must be nonnegative");
  return t;
}

}  // namespace

std::unique_ptr<Predicate> predicate_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ScriptError("predicate must be an object");
  try {
    if (j.contains("held")) {
      const auto& h = j.at("held");
      return std::make_unique<HeldPredicate>(
          h.is_null() ? std::nullopt : std::optional<std::string>(h.get<std::string>()));
    }
    for (const char* kind : {"left_of", "right_of", "above", "below"}) {
      if (j.contains(kind)) {
        const auto& p = j.at(kind);
        if (!p.is_array() || p.size() != 2) {
          throw ScriptError(std::string(kind) + " needs two labels");
        }
        return std::make_unique<RelationPredicate>(kind, p.at(0).get<std::string>(),
                                                   p.at(1).get<std::string>());
      }
    }
    if (j.contains("near")) {
      const auto& p = j.at("near");
      if (!p.is_array() || p.size() != 2) throw ScriptError("near needs two labels");
      return std::make_unique<NearPredicate>(p.at(0).get<std::string>(),
                                             p.at(1).get<std::string>(), tolerance(j, 20.0));
    }
    if (j.contains("at")) {
      const auto& p = j.at("at");
      if (!p.is_array() || p.size() != 3) throw ScriptError("at needs [label, x, y]");
      return std::make_unique<AtPredicate>(p.at(0).get<std::string>(),
                                           Point{p.at(1).get<double>(), p.at(2).get<double>()},
                                           tolerance(j, 15.0));
    }
    if (j.contains("all")) {
      std::vector<std::unique_ptr<Predicate>> parts;
      for (const auto& p : j.at("all")) parts.push_back(predicate_from_json(p));
      if (parts.empty()) throw ScriptError("all needs at least one predicate");
      return std::make_unique<AllPredicate>(std::move(parts));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ScriptError(std::string("malformed predicate: ") + e.what());
  }
  throw ScriptError("unknown predicate: " + j.dump());
}

std::vector<TrialSpec> parse_script(std::istream& in, const std::string& base_dir,
                                    const std::string& name) {
  std::vector<TrialSpec> out;
  std::map<std::string, sim::SceneState> scenes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = name + ":" + std::to_string(line_no) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      TrialSpec t;
      t.id = j.at("id").get<std::string>();
      t.scene_file = j.at("scene_file").get<std::string>();
      t.utterance = j.at("utterance").get<std::string>();
      t.expected_transcript = j.value("expected_transcript", t.utterance);
      const auto& acts = j.at("expected_actions");
      t.expected_actions = acts.is_string() ? grammar::parse_actions(acts.get<std::string>())
                                            : grammar::calls_from_json(acts);
      t.expected_final = predicate_from_json(j.at("expected_final"));
      t.seed = j.value("seed", std::uint64_t{0});

      const auto path = (std::filesystem::path(base_dir) / t.scene_file).string();
      auto it = scenes.find(path);
      if (it == scenes.end()) it = scenes.emplace(path, sim::load_scene(path)).first;
      t.scene = it->second;
      out.push_back(std::move(t));
    } catch (const ScriptError& e) {
      throw ScriptError(where + e.what());
    } catch (const std::exception& e) {
      throw ScriptError(where + e.what());
    }
  }
  return out;
}

std::vector<TrialSpec> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScriptError("cannot open script " + path);
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_script(in, dir.empty() ? "." : dir, path);
}

}  // namespace hri::orch
