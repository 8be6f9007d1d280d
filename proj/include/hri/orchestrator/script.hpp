#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hri/grammar/actions.hpp"
#include "hri/sim/scene.hpp"

namespace hri::orch {

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Final-scene condition. JSON forms:
///   {"held": "apple"}   {"held": null}
///   {"left_of": ["a", "b"]}  (also right_of, above, below; strict box order)
///   {"near": ["a", "b"], "tol": 20}      centers within tol px
///   {"at": ["a", x, y], "tol": 15}       center within tol px of (x, y)
///   {"all": [ ... ]}
class Predicate {
 public:
  virtual ~Predicate() = default;
  virtual bool holds(const sim::SceneState& s) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

std::unique_ptr<Predicate> predicate_from_json(const nlohmann::json& j);

struct TrialSpec {
  std::string id;
  std::string scene_file;  // resolved against the script's directory
  sim::SceneState scene;
  std::string utterance;
  std::string expected_transcript;
  std::vector<grammar::ActionCall> expected_actions;
  std::shared_ptr<const Predicate> expected_final;
  std::uint64_t seed = 0;
};

/// One JSON object per line; blank lines and lines starting with '#' are
/// skipped. expected_actions may be a canonical string or a JSON list.
/// Errors name the line.
std::vector<TrialSpec> parse_script(std::istream& in, const std::string& base_dir,
                                    const std::string& name = "<script>");
std::vector<TrialSpec> load_script(const std::string& path);

}  // namespace hri::orch
