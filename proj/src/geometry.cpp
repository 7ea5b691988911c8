#include "frnav/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace frnav {

UnitDirection::UnitDirection(const Vec2& v) {
  const double n = v.norm();
  if (!(n > 1e-12)) {
    throw std::invalid_argument("UnitDirection: near-zero vector");
  }
  v_ = v / n;
}

UnitDirection UnitDirection::from_angle(double azimuth) {
  UnitDirection d;
  d.v_ = Vec2(std::cos(azimuth), std::sin(azimuth));
  return d;
}

namespace {

double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

ConvexBody::ConvexBody(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const int n = static_cast<int>(vertices_.size());
  if (n < 3) {
    throw std::invalid_argument("ConvexBody: need at least 3 vertices");
  }
  for (const Vec2& v : vertices_) {
    if (!v.allFinite()) {
      throw std::invalid_argument("ConvexBody: non-finite vertex");
    }
  }
  inradius_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    const Vec2& c = vertices_[(i + 2) % n];
    const Vec2 u = b - a;
    const Vec2 w = c - b;
    // Strict convexity, scale-free: sin of the turn angle must exceed 1e-9.
    if (cross2(u, w) <= 1e-9 * u.norm() * w.norm()) {
      throw std::invalid_argument("ConvexBody: not strictly convex CCW");
    }
    // Origin strictly left of every edge.
    const double side = cross2(u, -a);
    if (side <= 1e-12 * u.norm() * std::max(1e-9, a.norm())) {
      throw std::invalid_argument("ConvexBody: origin not interior");
    }
    inradius_ = std::min(inradius_, side / u.norm());
    circumradius_ = std::max(circumradius_, a.norm());
  }
}

ConvexBody ConvexBody::rectangle(double length, double width) {
  const double hx = 0.5 * length;
  const double hy = 0.5 * width;
  return ConvexBody({{hx, -hy}, {hx, hy}, {-hx, hy}, {-hx, -hy}});
}

Mat2 rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Mat2 rotation_derivative(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << -s, -c, c, -s;
  return r;
}

SupportResult support_value(const ConvexBody& body, double theta, const Vec2& a) {
  const Mat2 r = rotation(theta);
  const Vec2 ar = r.transpose() * a;  // a.(R v) == (R'a).v
  double best = -std::numeric_limits<double>::infinity();
  int best_idx = 0;
  const auto& verts = body.vertices();
  for (int j = 0; j < static_cast<int>(verts.size()); ++j) {
    const double val = ar.dot(verts[j]);
    if (val > best) {
      best = val;
      best_idx = j;
    }
  }
  return {best, best_idx};
}

ViolationResult halfspace_violation(const ConvexRegion& region,
                                    const ConvexBody& body, const Pose& pose) {
  ViolationResult out;
  const int k = region.size();
  out.per_halfspace.resize(k);
  out.active_vertex.resize(k);
  out.worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    const Halfspace& h = region.halfspaces[i];
    const SupportResult s = support_value(body, pose.heading, h.normal);
    const double g = h.normal.dot(pose.position) + s.value - h.offset;
    out.per_halfspace[i] = g;
    out.active_vertex[i] = s.vertex;
    out.worst = std::max(out.worst, g);
  }
  return out;
}

double polygon_circle_penetration(const ConvexBody& body, const Pose& pose,
                                  const Vec2& center, double radius) {
  const Mat2 r = rotation(pose.heading);
  const auto& verts = body.vertices();
  const int n = static_cast<int>(verts.size());

  bool inside = true;
  double dist = std::numeric_limits<double>::infinity();
  Vec2 prev = pose.position + r * verts[n - 1];
  for (int i = 0; i < n; ++i) {
    const Vec2 cur = pose.position + r * verts[i];
    const Vec2 edge = cur - prev;
    if (cross2(edge, center - prev) < 0.0) {
      inside = false;
    }
    // Point-segment distance.
    const double len2 = edge.squaredNorm();
    double t = len2 > 0.0 ? (center - prev).dot(edge) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    dist = std::min(dist, (center - (prev + t * edge)).norm());
    prev = cur;
  }
  if (inside) {
    dist = 0.0;
  }
  return radius - dist;
}

std::vector<Vec2> region_vertices(const ConvexRegion& region) {
  const int k = region.size();
  std::vector<Vec2> pts;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const Halfspace& a = region.halfspaces[i];
      const Halfspace& b = region.halfspaces[j];
      const double det = cross2(a.normal, b.normal);
      const double scale = a.normal.norm() * b.normal.norm();
      if (std::abs(det) <= 1e-12 * scale) {
        continue;
      }
      const Vec2 x((a.offset * b.normal.y() - b.offset * a.normal.y()) / det,
                   (a.normal.x() * b.offset - b.normal.x() * a.offset) / det);
      bool ok = true;
      for (int m = 0; m < k && ok; ++m) {
        const Halfspace& h = region.halfspaces[m];
        if (h.normal.dot(x) - h.offset > 1e-6 * h.normal.norm()) {
          ok = false;
        }
      }
      if (ok) {
        pts.push_back(x);
      }
    }
  }
  if (pts.size() < 3) {
    return pts;
  }
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vec2& a, const Vec2& b) {
    const double aa = std::atan2(a.y() - centroid.y(), a.x() - centroid.x());
    const double ab = std::atan2(b.y() - centroid.y(), b.x() - centroid.x());
    if (aa != ab) return aa < ab;
    return a.squaredNorm() < b.squaredNorm();
  });
  // Collapse near-duplicate vertices from coincident constraint pairs.
  std::vector<Vec2> out;
  for (const Vec2& p : pts) {
    if (out.empty() || (p - out.back()).norm() > 1e-9) {
      out.push_back(p);
    }
  }
  if (out.size() > 1 && (out.front() - out.back()).norm() <= 1e-9) {
    out.pop_back();
  }
  return out;
}

double wrap_to_pi(double angle) {
  double a = std::fmod(angle + M_PI, 2.0 * M_PI);
  if (a < 0.0) {
    a += 2.0 * M_PI;
  }
  return a - M_PI;
}

}  // namespace frnav
