#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "frnav/geometry.hpp"
#include "frnav/solvers.hpp"

namespace frnav {

/// Bezier curve over t in [0,1]; control points are rows (k+1 x dim).
class BezierCurve {
 public:
  explicit BezierCurve(Eigen::MatrixXd control_points);

  int degree() const { return static_cast<int>(pts_.rows()) - 1; }
  int dim() const { return static_cast<int>(pts_.cols()); }
  const Eigen::MatrixXd& control_points() const { return pts_; }
  Eigen::MatrixXd& control_points() { return pts_; }

  /// de Casteljau evaluation.
  Eigen::VectorXd eval(double t) const;

  /// max_i |P_{i+1} - P_i| over consecutive control points.
  double max_control_step() const;

 private:
  Eigen::MatrixXd pts_;
};

/// Bernstein weights B_i^k(t), i = 0..k. Partition of unity to 1e-12.
Eigen::VectorXd bernstein_basis(int k, double t);

/// Paired position (2D) and yaw (1D) curves of equal degree with pinned
/// endpoints.
struct PoseTrajectory {
  BezierCurve position;
  BezierCurve yaw;

  Pose pose_at(double t) const;
  /// Same curve traversed backwards (control points reversed).
  PoseTrajectory reversed() const;
};

enum class Verdict { safe, violated, inconclusive };

struct SafetyCertificate {
  Verdict verdict{Verdict::inconclusive};
  /// safe: max certified interval upper bound (<= 0). violated: equals
  /// worst_value. inconclusive: largest unresolved interval bound.
  double margin{0.0};
  double worst_time{0.0};   // t* for violated verdicts
  double worst_value{0.0};  // g(t*)
  std::vector<int> violated_hyperplanes;  // indices with g_l(t*) > -m
  std::vector<int> active_vertices;       // support argmax per violated index
  long intervals_examined{0};

  bool safe() const { return verdict == Verdict::safe; }
  /// Scalar used by the refinement line search: lower is better;
  /// inconclusive is never an improvement.
  double score() const;
};

struct RefineConfig {
  double margin = 0.02;        // m: refinement pushes violations below -m
  double trust_radius = 0.3;   // per-variable box on control point moves
  double w_pos = 1.0;          // W_p (diagonal weight)
  double w_yaw = 0.5;          // W_theta
  double w_slack = 1e3;        // w_s
  int n_ctrl_select = 2;       // control points picked per curve
  int max_iters = 30;          // N
  double ls_shrink = 0.5;
  double ls_floor = 1.0 / 64.0;
  double min_interval = 1e-5;
};

/// Farthest reachable pose along e: samples n_yaw headings uniformly over
/// [current.heading - pi, current.heading + pi) (always including the
/// current heading) and solves max e'p over the support-shifted halfspaces
/// per heading. Progress ties within 1e-6 m prefer the smallest heading
/// change; transverse position degeneracy resolves through the LP's
/// lexicographic vertex rule.
struct TargetResult {
  bool found{false};
  Pose pose;
  double progress{0.0};
};
TargetResult select_target_pose(const ConvexRegion& region,
                                const ConvexBody& body, const UnitDirection& e,
                                const Pose& current, int n_yaw);

/// Straight-line control points from start to target; the target yaw is
/// first unwrapped to the representative within pi of the start yaw.
PoseTrajectory init_trajectory(const Pose& start, const Pose& target, int k);

/// g_k(t) for every halfspace at trajectory parameter t.
ViolationResult violation(const PoseTrajectory& traj, const ConvexRegion& region,
                          const ConvexBody& body, double t);

/// Rate bounds from control-point differences:
///   per_halfspace[k] = |a_k| (v_p + r_max v_theta),
///   global           = max_k |a_k| (v_p + r_max v_theta).
/// Certification uses the per-halfspace constants (tighter).
struct LipschitzConstants {
  std::vector<double> per_halfspace;
  double global{0.0};
};
LipschitzConstants lipschitz_constants(const PoseTrajectory& traj,
                                       const ConvexRegion& region,
                                       const ConvexBody& body);

/// Examined-interval record for bound audits.
struct IntervalRecord {
  double t_left, t_right;
  double upper_bound;
};

/// Lipschitz branch-and-bound verification. Maintains a worklist ordered by
/// the interval bound u = max_k (g_k(t_c) + L_k (t_R - t_L)/2); an interval
/// with u <= 0 is certified safe and discarded; positive center values are
/// violation candidates, refined until the maximal center violation is
/// isolated (no remaining u exceeds it). Intervals that shrink below
/// min_interval with u > 0 but nonpositive centers leave the verdict
/// inconclusive, which callers treat as unsafe.
SafetyCertificate verify_continuous(const PoseTrajectory& traj,
                                    const ConvexRegion& region,
                                    const ConvexBody& body,
                                    double min_interval,
                                    double report_margin = 0.02,
                                    std::vector<IntervalRecord>* audit = nullptr);

/// One first-order correction step at t*: picks the internal control points
/// with the largest Bernstein weights, builds the violated-hyperplane rows
/// from the support gradient, solves the slack QP inside the trust box and
/// backtracks on the re-verified worst violation. accepted == false leaves
/// the trajectory unchanged.
struct RefineOutcome {
  PoseTrajectory trajectory;
  bool accepted{false};
  SafetyCertificate certificate;  // for the returned trajectory
};
RefineOutcome refine_step(const PoseTrajectory& traj,
                          const SafetyCertificate& cert,
                          const ConvexRegion& region, const ConvexBody& body,
                          const RefineConfig& cfg);

enum class GenStatus {
  ok,
  no_feasible_orientation,
  inconclusive,
  stalled,
  budget_exhausted,
};

struct GenerateResult {
  GenStatus status{GenStatus::budget_exhausted};
  std::optional<PoseTrajectory> trajectory;
  std::optional<SafetyCertificate> certificate;
  bool ok() const { return status == GenStatus::ok; }
};

/// Verify/refine loop toward an already chosen target pose.
GenerateResult generate_safe_to(const ConvexRegion& region,
                                const ConvexBody& body, const Pose& target,
                                const Pose& start, const RefineConfig& cfg,
                                int k);

/// Full pipeline within one region: target selection, straight-line
/// initialization, then at most cfg.max_iters verify/refine rounds.
GenerateResult generate_safe(const ConvexRegion& region, const ConvexBody& body,
                             const UnitDirection& e, const Pose& start,
                             const RefineConfig& cfg, int k, int n_yaw);

}  // namespace frnav
