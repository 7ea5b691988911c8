#pragma once

#include <optional>
#include <span>
#include <vector>

#include "frnav/geometry.hpp"
#include "frnav/perception.hpp"
#include "frnav/solvers.hpp"

namespace frnav {

struct RegionGenConfig {
  double lambda = 0.1;            // off-direction weight in Q
  double epsilon = 0.01;          // vertex clearance in the separation QP
  int max_hyperplanes = 80;
  double sensor_box_margin = 0.2;
  double sensor_range = 5.0;      // sensor box sits at sensor_range + margin

  /// false: always select the obstacle nearest to the robot center
  /// (direction-unaware ablation).
  bool direction_aware_selection = true;

  /// Angular beam spacing of the scan that produced the cloud. When > 0,
  /// hyperplanes at range discontinuities are additionally constrained to
  /// cover the unsampled surface wedge between adjacent beams (ghost-point
  /// constraints); 0 disables the guard.
  double beam_step = 0.0;
  double silhouette_jump = 0.2;   // range jump that marks a silhouette edge
};

/// Direction-aware obstacle pick: among points in the forward halfspace of
/// e the one nearest the ray {p1 + t e, t >= 0}; falls back to the point
/// nearest p1. Ties break to the lowest index.
int select_obstacle(const PointCloud& points, const Vec2& p1,
                    const UnitDirection& e);

/// Separating hyperplane through obstacle point o: solves
///   min n' Q n,  Q = e e' + lambda (I - e e')
///   s.t. (v_j - o)' n <= -epsilon  for every world vertex v_j
///        (p1 - o)' n  = -1
/// and returns {x : n.x <= n.o}. extra_outside points are constrained to
/// the excluded side (n.(q - o) >= 0). nullopt when the QP is infeasible,
/// i.e. o is within epsilon of the robot hull.
std::optional<Halfspace> compute_hyperplane(
    const Vec2& o, const Vec2& p1, std::span<const Vec2> world_vertices,
    const UnitDirection& e, const RegionGenConfig& cfg,
    std::span<const Vec2> extra_outside = {});

/// Same, also exposing the underlying QP report (for traces and tests).
struct HyperplaneResult {
  std::optional<Halfspace> halfspace;
  SolveReport report;
};
HyperplaneResult compute_hyperplane_report(
    const Vec2& o, const Vec2& p1, std::span<const Vec2> world_vertices,
    const UnitDirection& e, const RegionGenConfig& cfg,
    std::span<const Vec2> extra_outside = {});

enum class RegionStatus { ok, in_collision, budget_exceeded };

struct RegionGenIterate {
  Vec2 selected;
  SolveStatus qp_status;
  int qp_iterations;
  int survivors;  // unseparated points remaining after this iterate
};

struct RegionGenTrace {
  std::vector<RegionGenIterate> iterations;
};

struct RegionResult {
  RegionStatus status{RegionStatus::ok};
  ConvexRegion region;
  RegionGenTrace trace;
};

/// Iterative region construction: four sensor-box halfspaces up front, then
/// separating hyperplanes until every cloud point lies on or outside some
/// halfspace. Pruning removes every point separated by the new hyperplane,
/// so the surviving set strictly shrinks each iterate.
RegionResult generate_region(const PointCloud& points, const Vec2& p1,
                             double heading, const ConvexBody& body,
                             const UnitDirection& e, const RegionGenConfig& cfg);

}  // namespace frnav
