#pragma once

#include <array>
#include <string>
#include <vector>

#include "hri/orchestrator/metrics.hpp"
#include "hri/sim/scene.hpp"

namespace hri::report {

using Polyline = std::vector<std::array<double, 2>>;

/// Frame-sized plot in image coordinates: object boxes from `before` in
/// grey, from `after` outlined, and the effector path on top.
std::string trajectory_svg(const sim::SceneState& before, const sim::SceneState& after,
                           const Polyline& path);

/// Paired bars per stage (time share, error share) plus the overhead bar.
std::string contributions_svg(const orch::AggregateReport& report);

std::string xml_escape(const std::string& s);

}  // namespace hri::report
