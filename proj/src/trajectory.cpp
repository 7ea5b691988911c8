#include "frnav/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace frnav {

BezierCurve::BezierCurve(Eigen::MatrixXd control_points)
    : pts_(std::move(control_points)) {
  if (pts_.rows() < 2) {
    throw std::invalid_argument("BezierCurve: need degree >= 1");
  }
  if (!pts_.allFinite()) {
    throw std::invalid_argument("BezierCurve: non-finite control point");
  }
}

Eigen::VectorXd BezierCurve::eval(double t) const {
  Eigen::MatrixXd work = pts_;
  for (int level = static_cast<int>(work.rows()) - 1; level > 0; --level) {
    for (int i = 0; i < level; ++i) {
      work.row(i) = (1.0 - t) * work.row(i) + t * work.row(i + 1);
    }
  }
  return work.row(0);
}

double BezierCurve::max_control_step() const {
  double best = 0.0;
  for (int i = 0; i + 1 < pts_.rows(); ++i) {
    best = std::max(best, (pts_.row(i + 1) - pts_.row(i)).norm());
  }
  return best;
}

Eigen::VectorXd bernstein_basis(int k, double t) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
  b[0] = 1.0;
  for (int j = 1; j <= k; ++j) {
    for (int i = j; i > 0; --i) {
      b[i] = (1.0 - t) * b[i] + t * b[i - 1];
    }
    b[0] *= (1.0 - t);
  }
  return b;
}

Pose PoseTrajectory::pose_at(double t) const {
  const Eigen::VectorXd p = position.eval(t);
  const Eigen::VectorXd th = yaw.eval(t);
  return Pose{Vec2(p[0], p[1]), th[0]};
}

PoseTrajectory PoseTrajectory::reversed() const {
  return PoseTrajectory{
      BezierCurve(position.control_points().colwise().reverse()),
      BezierCurve(yaw.control_points().colwise().reverse())};
}

TargetResult select_target_pose(const ConvexRegion& region,
                                const ConvexBody& body, const UnitDirection& e,
                                const Pose& current, int n_yaw) {
  TargetResult out;
  const int k = region.size();

  double best_value = -std::numeric_limits<double>::infinity();
  double best_dtheta = std::numeric_limits<double>::infinity();

  for (int s = 0; s < n_yaw; ++s) {
    const double offset = wrap_to_pi(2.0 * M_PI * s / n_yaw);
    const double theta = current.heading + offset;

    LinearProgram lp;
    lp.c.resize(2);
    lp.c << e.x(), e.y();
    lp.C.resize(k, 2);
    lp.d.resize(k);
    for (int i = 0; i < k; ++i) {
      const Halfspace& h = region.halfspaces[i];
      lp.C.row(i) = h.normal.transpose();
      lp.d[i] = h.offset - support_value(body, theta, h.normal).value;
    }
    const SolveReport rep = solve_lp(lp);
    if (rep.status != SolveStatus::optimal) {
      continue;
    }
    const double value = lp.c.dot(rep.solution);
    const double dtheta = std::abs(offset);
    const bool better = value > best_value + 1e-6 ||
                        (value > best_value - 1e-6 && dtheta < best_dtheta - 1e-12);
    if (better) {
      best_value = value;
      best_dtheta = dtheta;
      out.found = true;
      out.pose = Pose{Vec2(rep.solution[0], rep.solution[1]), theta};
    }
  }
  if (out.found) {
    out.progress = e.dot(out.pose.position - current.position);
  }
  return out;
}

PoseTrajectory init_trajectory(const Pose& start, const Pose& target, int k) {
  if (k < 3) {
    throw std::invalid_argument("init_trajectory: need degree >= 3");
  }
  const double theta_target = start.heading + wrap_to_pi(target.heading - start.heading);
  Eigen::MatrixXd pos(k + 1, 2);
  Eigen::MatrixXd yaw(k + 1, 1);
  for (int i = 0; i <= k; ++i) {
    const double a = static_cast<double>(i) / k;
    pos.row(i) = ((1.0 - a) * start.position + a * target.position).transpose();
    yaw(i, 0) = (1.0 - a) * start.heading + a * theta_target;
  }
  return PoseTrajectory{BezierCurve(std::move(pos)), BezierCurve(std::move(yaw))};
}

ViolationResult violation(const PoseTrajectory& traj, const ConvexRegion& region,
                          const ConvexBody& body, double t) {
  return halfspace_violation(region, body, traj.pose_at(t));
}

LipschitzConstants lipschitz_constants(const PoseTrajectory& traj,
                                       const ConvexRegion& region,
                                       const ConvexBody& body) {
  const int k = traj.position.degree();
  const double v_p = k * traj.position.max_control_step();
  const double v_th = k * traj.yaw.max_control_step();
  const double rate = v_p + body.circumradius() * v_th;

  LipschitzConstants out;
  out.per_halfspace.resize(region.size());
  for (int i = 0; i < region.size(); ++i) {
    out.per_halfspace[i] = region.halfspaces[i].normal.norm() * rate;
    out.global = std::max(out.global, out.per_halfspace[i]);
  }
  return out;
}

double SafetyCertificate::score() const {
  switch (verdict) {
    case Verdict::safe:
      return margin;
    case Verdict::violated:
      return worst_value;
    case Verdict::inconclusive:
      return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

namespace {

struct Interval {
  double t_left, t_right;
  double center_g;
  double upper;
};

struct IntervalLess {
  bool operator()(const Interval& a, const Interval& b) const {
    if (a.upper != b.upper) return a.upper < b.upper;
    return a.t_left > b.t_left;  // earlier interval wins ties
  }
};

}  // namespace

SafetyCertificate verify_continuous(const PoseTrajectory& traj,
                                    const ConvexRegion& region,
                                    const ConvexBody& body, double min_interval,
                                    double report_margin,
                                    std::vector<IntervalRecord>* audit) {
  SafetyCertificate cert;
  const LipschitzConstants lip = lipschitz_constants(traj, region, body);

  // Per-halfspace interval bound: max_k (g_k(tc) + L_k * halfwidth).
  auto interval_bound = [&](double tl, double tr, double& center_g) {
    const double tc = 0.5 * (tl + tr);
    const double half = 0.5 * (tr - tl);
    const ViolationResult v = violation(traj, region, body, tc);
    center_g = v.worst;
    double u = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < region.size(); ++k) {
      u = std::max(u, v.per_halfspace[k] + lip.per_halfspace[k] * half);
    }
    return u;
  };

  std::priority_queue<Interval, std::vector<Interval>, IntervalLess> heap;
  {
    Interval root{0.0, 1.0, 0.0, 0.0};
    root.upper = interval_bound(0.0, 1.0, root.center_g);
    heap.push(root);
    if (audit) audit->push_back({0.0, 1.0, root.upper});
  }

  bool found_violation = false;
  double best_g = 0.0;
  double best_t = 0.0;
  bool stalled = false;
  double stall_u = 0.0;
  long examined = 0;

  while (!heap.empty()) {
    const Interval cur = heap.top();
    heap.pop();
    ++examined;

    if (found_violation && cur.upper <= best_g) {
      // The best center violation is isolated: nothing left can exceed it.
      break;
    }
    if (cur.upper <= 0.0) {
      // Max-ordered heap: everything remaining is certified by this bound.
      cert.verdict = Verdict::safe;
      cert.margin = cur.upper;
      cert.intervals_examined = examined;
      return cert;
    }
    if (cur.center_g > 0.0 && cur.center_g > best_g) {
      found_violation = true;
      best_g = cur.center_g;
      best_t = 0.5 * (cur.t_left + cur.t_right);
    }
    const double half = 0.5 * (cur.t_right - cur.t_left);
    if (half < min_interval) {
      if (!(cur.center_g > 0.0)) {
        stalled = true;
        stall_u = std::max(stall_u, cur.upper);
      }
      continue;
    }
    const double tc = 0.5 * (cur.t_left + cur.t_right);
    Interval left{cur.t_left, tc, 0.0, 0.0};
    left.upper = interval_bound(left.t_left, left.t_right, left.center_g);
    Interval right{tc, cur.t_right, 0.0, 0.0};
    right.upper = interval_bound(right.t_left, right.t_right, right.center_g);
    if (audit) {
      audit->push_back({left.t_left, left.t_right, left.upper});
      audit->push_back({right.t_left, right.t_right, right.upper});
    }
    heap.push(left);
    heap.push(right);
  }

  cert.intervals_examined = examined;
  if (found_violation) {
    cert.verdict = Verdict::violated;
    cert.worst_time = best_t;
    const ViolationResult v = violation(traj, region, body, best_t);
    cert.worst_value = v.worst;
    cert.margin = v.worst;
    for (int k = 0; k < region.size(); ++k) {
      if (v.per_halfspace[k] > -report_margin) {
        cert.violated_hyperplanes.push_back(k);
        cert.active_vertices.push_back(v.active_vertex[k]);
      }
    }
    return cert;
  }
  if (stalled) {
    cert.verdict = Verdict::inconclusive;
    cert.margin = stall_u;
    return cert;
  }
  // Heap exhausted without positive centers or stalls: every interval was
  // discharged through subdivision; treat as safe with zero margin.
  cert.verdict = Verdict::safe;
  cert.margin = 0.0;
  return cert;
}

RefineOutcome refine_step(const PoseTrajectory& traj,
                          const SafetyCertificate& cert,
                          const ConvexRegion& region, const ConvexBody& body,
                          const RefineConfig& cfg) {
  RefineOutcome out{traj, false, cert};
  if (cert.verdict != Verdict::violated) {
    return out;
  }
  const int k = traj.position.degree();
  const double tstar = cert.worst_time;
  const Eigen::VectorXd bw = bernstein_basis(k, tstar);

  // Internal control points with the largest Bernstein weights at t*.
  std::vector<int> internal;
  for (int i = 1; i < k; ++i) internal.push_back(i);
  std::stable_sort(internal.begin(), internal.end(),
                   [&](int a, int b) { return bw[a] > bw[b]; });
  const int n_sel = std::min<int>(cfg.n_ctrl_select, static_cast<int>(internal.size()));
  std::vector<int> sel(internal.begin(), internal.begin() + n_sel);
  std::sort(sel.begin(), sel.end());

  const ViolationResult at_star = violation(traj, region, body, tstar);
  const double theta_star = traj.yaw.eval(tstar)[0];
  const Mat2 dr = rotation_derivative(theta_star);

  std::vector<int> rows;
  for (int i = 0; i < region.size(); ++i) {
    if (at_star.per_halfspace[i] > -cfg.margin) {
      rows.push_back(i);
    }
  }
  if (rows.empty()) {
    return out;
  }

  const int nv = 2 * n_sel + n_sel + 1;  // positions, yaws, slack
  QuadraticProgram prog;
  prog.H = Eigen::MatrixXd::Zero(nv, nv);
  for (int i = 0; i < 2 * n_sel; ++i) prog.H(i, i) = 2.0 * cfg.w_pos;
  for (int i = 0; i < n_sel; ++i) prog.H(2 * n_sel + i, 2 * n_sel + i) = 2.0 * cfg.w_yaw;
  prog.H(nv - 1, nv - 1) = 2.0 * cfg.w_slack;
  prog.g = Eigen::VectorXd::Zero(nv);

  prog.C.setZero(static_cast<int>(rows.size()), nv);
  prog.d.resize(static_cast<int>(rows.size()));
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    const int ell = rows[r];
    const Halfspace& h = region.halfspaces[ell];
    const Vec2& vstar = body.vertices()[at_star.active_vertex[ell]];
    const double yaw_coeff = h.normal.dot(dr * vstar);
    for (int s = 0; s < n_sel; ++s) {
      const double w = bw[sel[s]];
      prog.C(r, 2 * s) = w * h.normal.x();
      prog.C(r, 2 * s + 1) = w * h.normal.y();
      prog.C(r, 2 * n_sel + s) = w * yaw_coeff;
    }
    prog.C(r, nv - 1) = -1.0;  // slack
    prog.d[r] = -at_star.per_halfspace[ell] - cfg.margin;
  }

  prog.lb = Eigen::VectorXd::Constant(nv, -cfg.trust_radius);
  prog.ub = Eigen::VectorXd::Constant(nv, cfg.trust_radius);
  prog.lb[nv - 1] = 0.0;
  prog.ub[nv - 1] = std::numeric_limits<double>::infinity();

  const SolveReport rep = solve_qp(prog);
  if (rep.status != SolveStatus::optimal) {
    return out;
  }

  const double old_score = cert.score();
  for (double alpha = 1.0; alpha >= cfg.ls_floor * (1.0 - 1e-12);
       alpha *= cfg.ls_shrink) {
    PoseTrajectory cand = traj;
    for (int s = 0; s < n_sel; ++s) {
      cand.position.control_points()(sel[s], 0) += alpha * rep.solution[2 * s];
      cand.position.control_points()(sel[s], 1) += alpha * rep.solution[2 * s + 1];
      cand.yaw.control_points()(sel[s], 0) += alpha * rep.solution[2 * n_sel + s];
    }
    const SafetyCertificate cand_cert =
        verify_continuous(cand, region, body, cfg.min_interval, cfg.margin);
    if (cand_cert.score() < old_score) {
      out.trajectory = std::move(cand);
      out.accepted = true;
      out.certificate = cand_cert;
      return out;
    }
  }
  return out;
}

GenerateResult generate_safe_to(const ConvexRegion& region,
                                const ConvexBody& body, const Pose& target,
                                const Pose& start, const RefineConfig& cfg,
                                int k) {
  GenerateResult out;
  PoseTrajectory traj = init_trajectory(start, target, k);
  SafetyCertificate cert =
      verify_continuous(traj, region, body, cfg.min_interval, cfg.margin);

  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    if (cert.verdict == Verdict::safe) {
      out.status = GenStatus::ok;
      out.trajectory = std::move(traj);
      out.certificate = std::move(cert);
      return out;
    }
    if (cert.verdict == Verdict::inconclusive) {
      out.status = GenStatus::inconclusive;
      return out;
    }
    if (iter == cfg.max_iters) {
      break;
    }
    RefineOutcome step = refine_step(traj, cert, region, body, cfg);
    if (!step.accepted) {
      out.status = GenStatus::stalled;
      return out;
    }
    traj = std::move(step.trajectory);
    cert = std::move(step.certificate);
  }
  out.status = GenStatus::budget_exhausted;
  return out;
}

GenerateResult generate_safe(const ConvexRegion& region, const ConvexBody& body,
                             const UnitDirection& e, const Pose& start,
                             const RefineConfig& cfg, int k, int n_yaw) {
  const TargetResult target = select_target_pose(region, body, e, start, n_yaw);
  if (!target.found) {
    GenerateResult out;
    out.status = GenStatus::no_feasible_orientation;
    return out;
  }
  return generate_safe_to(region, body, target.pose, start, cfg, k);
}

}  // namespace frnav
