#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace frnav {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// World-frame pose of the robot reference point. Headings are kept
/// unwrapped; callers that need continuity across segments own the
/// unwrapping.
struct Pose {
  Vec2 position{0.0, 0.0};
  double heading{0.0};
};

/// Unit-norm direction in the plane. Normalized on construction; near-zero
/// input is rejected.
class UnitDirection {
 public:
  explicit UnitDirection(const Vec2& v);
  static UnitDirection from_angle(double azimuth);

  const Vec2& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double angle() const { return std::atan2(v_.y(), v_.x()); }
  double dot(const Vec2& p) const { return v_.dot(p); }

 private:
  UnitDirection() = default;
  Vec2 v_{1.0, 0.0};
};

/// Convex robot footprint in the body frame. Vertices are counterclockwise,
/// strictly convex, and contain the body-frame origin (the reference point)
/// in their interior. Immutable after construction.
class ConvexBody {
 public:
  explicit ConvexBody(std::vector<Vec2> vertices);

  /// Axis-aligned rectangle centered on the reference point.
  static ConvexBody rectangle(double length, double width);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  int size() const { return static_cast<int>(vertices_.size()); }

  /// max_j |v_j|
  double circumradius() const { return circumradius_; }
  /// Distance from the reference point to the nearest edge.
  double inradius() const { return inradius_; }

 private:
  std::vector<Vec2> vertices_;
  double circumradius_{0.0};
  double inradius_{0.0};
};

/// Closed halfspace {x : normal.dot(x) <= offset}. Normals are deliberately
/// not normalized: the region generator produces meaningfully scaled normals
/// (the separation QP's equality constraint fixes the scale) and Lipschitz
/// constants use |normal| explicitly.
struct Halfspace {
  Vec2 normal{1.0, 0.0};
  double offset{0.0};

  /// Signed distance of x to the boundary, negative inside the safe set.
  double signed_distance(const Vec2& x) const {
    return (normal.dot(x) - offset) / normal.norm();
  }
};

/// Intersection of halfspaces. Construct through make_convex_region (which
/// checks for a nonempty interior) or a generator that guarantees one.
struct ConvexRegion {
  std::vector<Halfspace> halfspaces;
  int size() const { return static_cast<int>(halfspaces.size()); }
};

/// Counterclockwise rotation matrix.
Mat2 rotation(double theta);
/// dR/dtheta; equals rotation(theta + pi/2).
Mat2 rotation_derivative(double theta);

struct SupportResult {
  double value;
  int vertex;  // argmax index, lowest index on ties
};

/// max_j a.dot(R(theta) v_j): farthest extent of the oriented body along a.
/// a may be any vector including zero (value 0, vertex 0).
SupportResult support_value(const ConvexBody& body, double theta, const Vec2& a);

struct ViolationResult {
  double worst;                       // max over halfspaces
  std::vector<double> per_halfspace;  // a_k.p + support - b_k
  std::vector<int> active_vertex;     // support argmax per halfspace
};

/// Static containment check of the posed body against every halfspace.
/// worst <= 0 iff the whole body lies inside the region.
ViolationResult halfspace_violation(const ConvexRegion& region,
                                    const ConvexBody& body, const Pose& pose);

/// radius - dist(center, posed polygon); positive means the disc penetrates
/// the body, distance is zero when the center is inside the polygon.
double polygon_circle_penetration(const ConvexBody& body, const Pose& pose,
                                  const Vec2& center, double radius);

/// Vertices of a bounded region polygon, counterclockwise. Intended for
/// rendering and containment checks of generator output (regions there are
/// always bounded by the sensor box).
std::vector<Vec2> region_vertices(const ConvexRegion& region);

/// Map an angle to [-pi, pi).
double wrap_to_pi(double angle);

}  // namespace frnav
