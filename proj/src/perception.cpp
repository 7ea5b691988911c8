#include "frnav/perception.hpp"

#include <algorithm>
#include <cmath>

namespace frnav {

namespace {

bool is_far(const RangeMap& map, int i) {
  return map.ranges[i] >= map.max_range - 1e-9;
}

}  // namespace

ScanResult simulate_scan(const Scene& scene, const Pose& pose, int n_beams,
                         double max_range) {
  if (n_beams < 8) {
    throw std::invalid_argument("simulate_scan: need at least 8 beams");
  }
  const Vec2 p = pose.position;
  if (!(p.x() > 0.0 && p.x() < scene.width && p.y() > 0.0 && p.y() < scene.height)) {
    throw std::invalid_argument("simulate_scan: pose outside workspace");
  }
  for (const Obstacle& obs : scene.obstacles) {
    if ((p - obs.center).norm() < obs.radius) {
      throw PoseInsideObstacle("scan origin inside obstacle disc");
    }
  }

  ScanResult out;
  out.map.ranges.resize(n_beams);
  out.map.max_range = max_range;
  out.map.origin = pose;

  for (int i = 0; i < n_beams; ++i) {
    const double az = -M_PI + 2.0 * M_PI * i / n_beams;
    const Vec2 u(std::cos(az), std::sin(az));

    // Workspace walls; the pose is strictly interior so one wall is always hit.
    double t = std::numeric_limits<double>::infinity();
    if (u.x() < -1e-15) t = std::min(t, -p.x() / u.x());
    if (u.x() > 1e-15) t = std::min(t, (scene.width - p.x()) / u.x());
    if (u.y() < -1e-15) t = std::min(t, -p.y() / u.y());
    if (u.y() > 1e-15) t = std::min(t, (scene.height - p.y()) / u.y());

    for (const Obstacle& obs : scene.obstacles) {
      const Vec2 rel = obs.center - p;
      const double b = u.dot(rel);
      if (b <= 0.0) continue;
      double disc = b * b - (rel.squaredNorm() - obs.radius * obs.radius);
      // Grazing tolerance: keep exactly tangent rays as hits.
      if (disc < -1e-10 * std::max(1.0, b * b)) continue;
      disc = std::max(disc, 0.0);
      const double root = b - std::sqrt(disc);
      if (root > 1e-9 && root < t) t = root;
    }

    if (t >= max_range) {
      out.map.ranges[i] = max_range;
    } else {
      out.map.ranges[i] = t;
      out.cloud.points.push_back(p + t * u);
    }
  }
  return out;
}

std::vector<Gap> extract_gaps(const RangeMap& map, double depth_jump,
                              double min_width, double body_circumradius) {
  const int n = map.n();
  const auto& r = map.ranges;
  std::vector<char> in_gap(n, 0);
  for (int i = 0; i < n; ++i) in_gap[i] = is_far(map, i) ? 1 : 0;

  // Boundary i -> i+1 classification.
  std::vector<char> rising(n, 0), falling(n, 0);
  bool any_falling = false;
  for (int i = 0; i < n; ++i) {
    const double delta = r[(i + 1) % n] - r[i];
    if (delta > depth_jump) rising[i] = 1;
    if (-delta > depth_jump) {
      falling[i] = 1;
      any_falling = true;
    }
  }

  // Each rising edge opens a span that runs to the next falling edge. An
  // unmatched rising edge (no falling edge anywhere) marks nothing; only
  // no-return runs remain gaps then.
  if (any_falling) {
    for (int i = 0; i < n; ++i) {
      if (!rising[i]) continue;
      int j = (i + 1) % n;
      for (int steps = 0; steps < n; ++steps) {
        in_gap[j] = 1;
        if (falling[j]) break;
        j = (j + 1) % n;
      }
    }
  }

  std::vector<Gap> gaps;
  const double step = map.beam_step();

  bool all = true;
  for (int i = 0; i < n; ++i) {
    if (!in_gap[i]) {
      all = false;
      break;
    }
  }
  if (all) {
    Gap g;
    g.start_beam = 0;
    g.end_beam = n - 1;
    g.angular_width = 2.0 * M_PI;
    g.near_range = map.max_range;
    if (g.angular_width >= min_width - 1e-12) gaps.push_back(g);
    return gaps;
  }

  for (int s = 0; s < n; ++s) {
    if (!in_gap[s] || in_gap[(s - 1 + n) % n]) continue;
    int count = 1;
    int e = s;
    while (in_gap[(e + 1) % n]) {
      e = (e + 1) % n;
      ++count;
    }
    Gap g;
    g.start_beam = s;
    g.end_beam = e;
    g.angular_width = count * step;
    g.near_range = std::min(r[(s - 1 + n) % n], r[(e + 1) % n]);
    double threshold = min_width;
    if (body_circumradius > 0.0 && g.near_range > 0.0) {
      threshold = std::max(threshold, 2.0 * std::atan(body_circumradius / g.near_range));
    }
    if (g.angular_width >= threshold - 1e-12) gaps.push_back(g);
  }
  return gaps;
}

std::vector<UnitDirection> gaps_to_directions(const std::vector<Gap>& gaps,
                                              const RangeMap& map,
                                              const UnitDirection& fallback,
                                              int max_directions,
                                              double max_arc_per_direction) {
  std::vector<int> order(gaps.size());
  for (int i = 0; i < static_cast<int>(order.size()); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return gaps[a].angular_width > gaps[b].angular_width;
  });

  std::vector<UnitDirection> dirs;
  const double step = map.beam_step();
  for (int idx : order) {
    if (static_cast<int>(dirs.size()) >= max_directions) break;
    const Gap& g = gaps[idx];
    if (g.angular_width >= 2.0 * M_PI - 1e-9) {
      dirs.push_back(fallback);
      continue;
    }
    const int count = static_cast<int>(std::lround(g.angular_width / step));
    const double start_az = map.azimuth(g.start_beam) - 0.5 * step;
    const int splits = std::max(
        1, static_cast<int>(std::ceil(g.angular_width / max_arc_per_direction)));
    std::vector<double> bisectors;
    for (int s = 0; s < splits; ++s) {
      bisectors.push_back(start_az +
                          (s + 0.5) * count * step / static_cast<double>(splits));
    }
    std::stable_sort(bisectors.begin(), bisectors.end(), [&](double a, double b) {
      return std::abs(wrap_to_pi(a - fallback.angle())) <
             std::abs(wrap_to_pi(b - fallback.angle()));
    });
    for (double b : bisectors) {
      if (static_cast<int>(dirs.size()) >= max_directions) break;
      dirs.push_back(UnitDirection::from_angle(b));
    }
  }
  return dirs;
}

}  // namespace frnav
