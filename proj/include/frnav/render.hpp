#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace frnav {

/// Deterministic SVG rendering of an episode log: workspace, obstacle
/// discs, region polygons, robot footprints at node poses, executed
/// trajectories and graph edges color-coded by status.
std::string render_svg(const nlohmann::json& episode_log);

}  // namespace frnav
