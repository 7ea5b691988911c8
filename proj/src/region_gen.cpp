#include "frnav/region_gen.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace frnav {

namespace {

// Forward-halfspace pick among the given indices; nearest-to-center fallback.
int select_among(const PointCloud& points, const std::vector<int>& indices,
                 const Vec2& p1, const UnitDirection& e, bool direction_aware) {
  double best_perp = std::numeric_limits<double>::infinity();
  double best_dist = std::numeric_limits<double>::infinity();
  int best_fwd = -1;
  int best_near = -1;
  for (int idx : indices) {
    const Vec2 rel = points.points[idx] - p1;
    const double fwd = e.dot(rel);
    if (direction_aware && fwd > 0.0) {
      const double perp = (rel - fwd * e.vec()).norm();
      if (perp < best_perp) {
        best_perp = perp;
        best_fwd = idx;
      }
    }
    const double dist = rel.norm();
    if (dist < best_dist) {
      best_dist = dist;
      best_near = idx;
    }
  }
  return best_fwd >= 0 ? best_fwd : best_near;
}

}  // namespace

int select_obstacle(const PointCloud& points, const Vec2& p1,
                    const UnitDirection& e) {
  std::vector<int> all(points.size());
  for (int i = 0; i < points.size(); ++i) all[i] = i;
  return select_among(points, all, p1, e, true);
}

HyperplaneResult compute_hyperplane_report(const Vec2& o, const Vec2& p1,
                                           std::span<const Vec2> world_vertices,
                                           const UnitDirection& e,
                                           const RegionGenConfig& cfg,
                                           std::span<const Vec2> extra_outside) {
  const Vec2 ev = e.vec();
  Mat2 q = ev * ev.transpose() + cfg.lambda * (Mat2::Identity() - ev * ev.transpose());

  QuadraticProgram prog;
  prog.H = 2.0 * q;
  prog.g = Eigen::VectorXd::Zero(2);
  const int j = static_cast<int>(world_vertices.size());
  const int extra = static_cast<int>(extra_outside.size());
  prog.C.resize(j + extra, 2);
  prog.d.resize(j + extra);
  for (int i = 0; i < j; ++i) {
    prog.C.row(i) = (world_vertices[i] - o).transpose();
    prog.d[i] = -cfg.epsilon;
  }
  for (int i = 0; i < extra; ++i) {
    prog.C.row(j + i) = -(extra_outside[i] - o).transpose();
    prog.d[j + i] = 0.0;
  }
  prog.E.resize(1, 2);
  prog.E.row(0) = (p1 - o).transpose();
  prog.f.resize(1);
  prog.f[0] = -1.0;

  HyperplaneResult out;
  out.report = solve_qp(prog);
  if (out.report.status == SolveStatus::optimal) {
    const Vec2 n(out.report.solution[0], out.report.solution[1]);
    out.halfspace = Halfspace{n, n.dot(o)};
  }
  return out;
}

std::optional<Halfspace> compute_hyperplane(const Vec2& o, const Vec2& p1,
                                            std::span<const Vec2> world_vertices,
                                            const UnitDirection& e,
                                            const RegionGenConfig& cfg,
                                            std::span<const Vec2> extra_outside) {
  return compute_hyperplane_report(o, p1, world_vertices, e, cfg, extra_outside)
      .halfspace;
}

RegionResult generate_region(const PointCloud& points, const Vec2& p1,
                             double heading, const ConvexBody& body,
                             const UnitDirection& e, const RegionGenConfig& cfg) {
  RegionResult out;

  const double box = cfg.sensor_range + cfg.sensor_box_margin;
  out.region.halfspaces = {
      Halfspace{Vec2(1.0, 0.0), p1.x() + box},
      Halfspace{Vec2(-1.0, 0.0), -(p1.x() - box)},
      Halfspace{Vec2(0.0, 1.0), p1.y() + box},
      Halfspace{Vec2(0.0, -1.0), -(p1.y() - box)},
  };

  const Mat2 r = rotation(heading);
  std::vector<Vec2> world_verts(body.vertices().size());
  for (std::size_t i = 0; i < world_verts.size(); ++i) {
    world_verts[i] = p1 + r * body.vertices()[i];
  }

  const int np = points.size();
  std::vector<int> survivors(np);
  for (int i = 0; i < np; ++i) survivors[i] = i;

  // Silhouette edges: where the scan skipped beams or the range jumps, the
  // unsampled surface wedge between adjacent beams is covered by requiring
  // the hyperplane to also exclude a ghost point one beam step to that side
  // at the same range.
  std::vector<std::array<bool, 2>> silhouette;
  std::vector<double> az(np), rr(np);
  if (cfg.beam_step > 0.0 && np > 0) {
    silhouette.assign(np, {false, false});
    for (int i = 0; i < np; ++i) {
      const Vec2 rel = points.points[i] - p1;
      az[i] = std::atan2(rel.y(), rel.x());
      rr[i] = rel.norm();
    }
    for (int i = 0; i < np; ++i) {
      const int prev = (i - 1 + np) % np;
      const int next = (i + 1) % np;
      if (np == 1) {
        silhouette[i] = {true, true};
        break;
      }
      const double gap_prev = std::abs(wrap_to_pi(az[i] - az[prev]));
      const double gap_next = std::abs(wrap_to_pi(az[next] - az[i]));
      silhouette[i][0] = gap_prev > 1.5 * cfg.beam_step || rr[prev] - rr[i] > cfg.silhouette_jump;
      silhouette[i][1] = gap_next > 1.5 * cfg.beam_step || rr[next] - rr[i] > cfg.silhouette_jump;
    }
  }

  for (int iter = 0; iter < cfg.max_hyperplanes && !survivors.empty(); ++iter) {
    const int idx = select_among(points, survivors, p1, e,
                                 cfg.direction_aware_selection);
    const Vec2 o = points.points[idx];

    std::vector<Vec2> ghosts;
    if (!silhouette.empty()) {
      if (silhouette[idx][0]) {
        const double a = az[idx] - cfg.beam_step;
        ghosts.push_back(p1 + rr[idx] * Vec2(std::cos(a), std::sin(a)));
      }
      if (silhouette[idx][1]) {
        const double a = az[idx] + cfg.beam_step;
        ghosts.push_back(p1 + rr[idx] * Vec2(std::cos(a), std::sin(a)));
      }
    }

    auto solve_plane = [&](const RegionGenConfig& c) {
      HyperplaneResult hr = compute_hyperplane_report(o, p1, world_verts, e, c, ghosts);
      if (!hr.halfspace && !ghosts.empty()) {
        // Wedge guard conflicts with robot clearance here; fall back to the
        // plain separation so tight passages stay reachable.
        hr = compute_hyperplane_report(o, p1, world_verts, e, c);
      }
      return hr;
    };
    auto pruned_by = [&](const Halfspace& hp) {
      int count = 0;
      for (int s : survivors) {
        if (s == idx || hp.normal.dot(points.points[s]) - hp.offset >= -1e-12) {
          ++count;
        }
      }
      return count;
    };

    HyperplaneResult hr = solve_plane(cfg);
    if (!hr.halfspace) {
      out.status = RegionStatus::in_collision;
      return out;
    }
    Halfspace hp = *hr.halfspace;
    int pruned = pruned_by(hp);

    // Direction-biased planes can stall on collinear clouds (long walls seen
    // from behind): each tilted cut removes a single point. When the prune
    // rate falls behind what the budget needs, also try the isotropic plane
    // through the same point and keep whichever removes more.
    const int needed = (static_cast<int>(survivors.size()) +
                        (cfg.max_hyperplanes - iter) - 1) /
                       (cfg.max_hyperplanes - iter);
    if (pruned < needed && cfg.lambda != 1.0) {
      RegionGenConfig iso = cfg;
      iso.lambda = 1.0;
      const HyperplaneResult alt = solve_plane(iso);
      if (alt.halfspace) {
        const int alt_pruned = pruned_by(*alt.halfspace);
        if (alt_pruned > pruned) {
          hr = alt;
          hp = *alt.halfspace;
          pruned = alt_pruned;
        }
      }
    }
    out.region.halfspaces.push_back(hp);

    std::vector<int> next;
    next.reserve(survivors.size());
    for (int s : survivors) {
      if (s == idx) continue;
      const double v = hp.normal.dot(points.points[s]) - hp.offset;
      if (v < -1e-12) {
        next.push_back(s);
      }
    }
    out.trace.iterations.push_back(RegionGenIterate{
        o, hr.report.status, hr.report.iterations, static_cast<int>(next.size())});
    survivors = std::move(next);
  }

  if (!survivors.empty()) {
    out.status = RegionStatus::budget_exceeded;
    return out;
  }
  out.status = RegionStatus::ok;
  return out;
}

}  // namespace frnav
