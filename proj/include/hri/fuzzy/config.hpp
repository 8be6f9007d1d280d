#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hri/fuzzy/system.hpp"

namespace hri::fuzzy {

// Rule-base file layout:
//
//   {
//     "inputs":  [ <variable>, ... ],
//     "outputs": [ <variable>, ... ],
//     "rules":   [ {"if": [["error", "NegativeSmall"], ...],
//                   "then": ["correction", "PositiveSmall"]}, ... ]
//   }
//
// where <variable> is
//
//   {"name": "error",
//    "universe": {"lo": -100, "hi": 100, "points": 200},
//    "terms": [{"label": "NegativeVeryLarge", "center": -100, "sigma": 10, "delta": 2}, ...]}
//
// "tnorm"/"snorm" are optional and only accept "minimum"/"maximum".

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

IT2FuzzySystem system_from_json(const nlohmann::json& doc);
nlohmann::json system_to_json(const IT2FuzzySystem& system);

IT2FuzzySystem load_system(const std::filesystem::path& path);

}  // namespace hri::fuzzy
