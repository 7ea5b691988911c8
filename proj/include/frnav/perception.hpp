#pragma once

#include <stdexcept>
#include <vector>

#include "frnav/geometry.hpp"
#include "frnav/scene.hpp"

namespace frnav {

/// Single-row angular range map. Beam i points along world azimuth
/// -pi + 2*pi*i/N regardless of the scan heading; the planner works in
/// world coordinates throughout.
struct RangeMap {
  std::vector<double> ranges;
  double max_range{5.0};
  Pose origin;

  int n() const { return static_cast<int>(ranges.size()); }
  double beam_step() const { return 2.0 * M_PI / n(); }
  double azimuth(int i) const { return -M_PI + 2.0 * M_PI * i / n(); }
};

/// World-frame hit points, one per beam that returned (range < max_range),
/// in beam order. Wall returns are included: workspace walls are scanned as
/// obstacles so that open boundaries do not read as infinite free space.
struct PointCloud {
  std::vector<Vec2> points;
  int size() const { return static_cast<int>(points.size()); }
  bool empty() const { return points.empty(); }
};

/// Angular opening bounded by depth discontinuities or no-return runs.
/// Indices are inclusive and circular.
struct Gap {
  int start_beam{0};
  int end_beam{0};
  double angular_width{0.0};
  double near_range{0.0};  // min bounding return, max_range if unbounded
};

struct ScanResult {
  RangeMap map;
  PointCloud cloud;
};

struct PoseInsideObstacle : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact ray casting against obstacle discs and workspace walls, clipped to
/// max_range. Throws PoseInsideObstacle when the scan origin lies inside an
/// obstacle disc and std::invalid_argument when it lies outside the
/// workspace.
ScanResult simulate_scan(const Scene& scene, const Pose& pose, int n_beams,
                         double max_range);

/// Gap detection. A gap opens at a rising depth discontinuity
/// (ranges[i+1] - ranges[i] > depth_jump) and runs to the next falling one;
/// maximal runs of max-range beams are gaps as well. Gaps narrower than
/// min_width are dropped, and when body_circumradius > 0 a gap must also be
/// wide enough to plausibly admit the body at its near range:
/// width >= 2*atan(body_circumradius / near_range).
std::vector<Gap> extract_gaps(const RangeMap& map, double depth_jump,
                              double min_width, double body_circumradius = 0.0);

/// Candidate directions from gaps, widest gaps first, at most max_directions
/// entries. A gap emits its angular bisector; gaps wider than
/// max_arc_per_direction are split into equal sub-arcs whose bisectors are
/// emitted nearest-to-`fallback` first, so broad openings contribute several
/// representative directions instead of one arbitrary ray. A full-circle gap
/// has no bisector and maps to `fallback` (the episode's goal direction).
std::vector<UnitDirection> gaps_to_directions(
    const std::vector<Gap>& gaps, const RangeMap& map,
    const UnitDirection& fallback, int max_directions = 6,
    double max_arc_per_direction = 2.0 * M_PI / 3.0);

}  // namespace frnav
