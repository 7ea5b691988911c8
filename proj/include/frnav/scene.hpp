#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "frnav/geometry.hpp"

namespace frnav {

struct Obstacle {
  Vec2 center{0.0, 0.0};
  double radius{0.3};
};

/// Benchmark world: rectangular workspace with cylindrical obstacles, a
/// start pose, a goal position and the robot footprint.
struct Scene {
  double width{5.0};
  double height{5.0};
  std::vector<Obstacle> obstacles;
  Pose start;
  Vec2 goal{4.5, 4.5};
  ConvexBody robot{ConvexBody::rectangle(0.6, 0.4)};
  std::uint64_t seed{0};
};

struct SceneGenerationExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SceneGenParams {
  double width = 5.0;
  double height = 5.0;
  double obstacle_radius = 0.3;
  Vec2 start{0.5, 0.5};
  Vec2 goal{4.5, 4.5};
  double clearance_extra = 0.1;  // start/goal clearance beyond circumradius
  double grid_cell = 0.05;       // connectivity-filter resolution
  int max_redraws = 1000;
};

/// Deterministic random scene: round(density * area) obstacle centers from
/// the seeded generator, redrawn (next derived seed) until an inflated-grid
/// path connects start to goal. Throws SceneGenerationExhausted after
/// max_redraws attempts.
Scene generate_scene(double density, std::uint64_t seed,
                     const SceneGenParams& params = {});

/// BFS over the occupancy grid with obstacle discs (and walls) inflated by
/// the robot's inradius. This is the feasibility oracle used by the scene
/// filter and its tests.
bool grid_path_exists(const Scene& scene, double cell);

}  // namespace frnav
