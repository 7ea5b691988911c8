#include "frnav/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace frnav {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kFeasTol = 1e-8;
constexpr double kStatTol = 1e-7;
constexpr double kPsdClamp = 1e-9;
constexpr double kMultTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rows {
  MatrixXd C;
  VectorXd d;
};

// Box bounds become rows appended after C: finite ub rows by ascending
// variable, then finite lb rows. SolveReport indices refer to this system.
Rows expand_rows(const MatrixXd& C, const VectorXd& d, const VectorXd& lb,
                 const VectorXd& ub, int n) {
  int extra = 0;
  if (ub.size() > 0) {
    for (int i = 0; i < n; ++i) extra += std::isfinite(ub[i]) ? 1 : 0;
  }
  if (lb.size() > 0) {
    for (int i = 0; i < n; ++i) extra += std::isfinite(lb[i]) ? 1 : 0;
  }
  Rows out;
  const int m0 = static_cast<int>(C.rows());
  out.C.setZero(m0 + extra, n);
  out.d.resize(m0 + extra);
  if (m0 > 0) {
    out.C.topRows(m0) = C;
    out.d.head(m0) = d;
  }
  int r = m0;
  if (ub.size() > 0) {
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(ub[i])) {
        out.C(r, i) = 1.0;
        out.d[r] = ub[i];
        ++r;
      }
    }
  }
  if (lb.size() > 0) {
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(lb[i])) {
        out.C(r, i) = -1.0;
        out.d[r] = -lb[i];
        ++r;
      }
    }
  }
  return out;
}

struct LpCoreResult {
  SolveStatus status{SolveStatus::max_iter};
  VectorXd x;
  std::vector<int> working;
  VectorXd lambda;  // aligned with working
  int iterations{0};
};

MatrixXd gather_rows(const MatrixXd& C, const std::vector<int>& rows) {
  MatrixXd N(static_cast<int>(rows.size()), C.cols());
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    N.row(i) = C.row(rows[i]);
  }
  return N;
}

// Active-set LP maximizing c.x over Cx <= d from a feasible start. Does not
// require vertex starts: it terminates when c lies in the cone of active
// normals (least-squares multipliers all nonnegative). Lowest-index rules
// give deterministic pivoting.
LpCoreResult lp_core(const VectorXd& c, const MatrixXd& C, const VectorXd& d,
                     VectorXd x, int max_iter) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(C.rows());
  const double cnorm = std::max(1.0, c.lpNorm<Eigen::Infinity>());

  LpCoreResult res;
  std::vector<int> W;
  std::vector<char> in_w(m, 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    VectorXd p;
    MatrixXd qthin;  // orthonormal basis of span of active normals
    if (W.empty()) {
      p = c;
    } else {
      const MatrixXd nt = gather_rows(C, W).transpose();  // n x k
      Eigen::HouseholderQR<MatrixXd> qr(nt);
      qthin = qr.householderQ() * MatrixXd::Identity(n, static_cast<int>(W.size()));
      p = c - qthin * (qthin.transpose() * c);
    }

    if (p.lpNorm<Eigen::Infinity>() <= 1e-10 * cnorm) {
      // Stationary: check multipliers of the working set.
      VectorXd lam;
      if (!W.empty()) {
        const MatrixXd nt = gather_rows(C, W).transpose();
        lam = nt.householderQr().solve(c);
      }
      int drop = -1;
      int drop_row = std::numeric_limits<int>::max();
      for (int i = 0; i < static_cast<int>(W.size()); ++i) {
        if (lam[i] < -kMultTol && W[i] < drop_row) {
          drop_row = W[i];
          drop = i;
        }
      }
      if (drop < 0) {
        res.status = SolveStatus::optimal;
        res.x = std::move(x);
        res.working = W;
        res.lambda = W.empty() ? VectorXd() : lam;
        return res;
      }
      in_w[W[drop]] = 0;
      W.erase(W.begin() + drop);
      continue;
    }

    // Ratio test: nearest blocking row along p.
    const double pnorm = p.norm();
    double alpha = kInf;
    int blocker = -1;
    for (int i = 0; i < m; ++i) {
      if (in_w[i]) continue;
      const double ap = C.row(i).dot(p);
      const double rnorm = std::max(1.0, C.row(i).norm());
      if (ap > 1e-11 * rnorm * pnorm) {
        const double slack = std::max(0.0, d[i] - C.row(i).dot(x));
        const double ratio = slack / ap;
        if (ratio < alpha) {
          alpha = ratio;
          blocker = i;
        }
      }
    }
    if (blocker < 0) {
      res.status = SolveStatus::unbounded;
      res.x = std::move(x);
      res.working = W;
      return res;
    }
    x += alpha * p;
    W.push_back(blocker);
    in_w[blocker] = 1;
  }
  res.status = SolveStatus::max_iter;
  res.x = std::move(x);
  res.working = W;
  return res;
}

// Phase 1: feasible point of Cx <= d via max -t over C x - t <= d, t >= -1.
struct Phase1Result {
  bool feasible{false};
  bool clean{true};  // false when the auxiliary solve hit its cap
  VectorXd x;
};

Phase1Result find_feasible(const MatrixXd& C, const VectorXd& d) {
  const int n = static_cast<int>(C.cols());
  const int m = static_cast<int>(C.rows());
  Phase1Result out;
  double viol0 = 0.0;
  for (int i = 0; i < m; ++i) viol0 = std::max(viol0, -d[i]);
  if (viol0 <= 0.0) {
    out.feasible = true;
    out.x = VectorXd::Zero(n);
    return out;
  }
  MatrixXd ca(m + 1, n + 1);
  ca.setZero();
  ca.topLeftCorner(m, n) = C;
  ca.col(n).head(m).setConstant(-1.0);
  ca(m, n) = -1.0;
  VectorXd da(m + 1);
  da.head(m) = d;
  da[m] = 1.0;
  VectorXd c_aux = VectorXd::Zero(n + 1);
  c_aux[n] = -1.0;
  VectorXd x0 = VectorXd::Zero(n + 1);
  x0[n] = viol0 + 1e-6;
  const int cap = 50 * (n + m + 2);
  LpCoreResult aux = lp_core(c_aux, ca, da, std::move(x0), cap);
  out.clean = aux.status == SolveStatus::optimal;
  if (out.clean && aux.x[n] <= kFeasTol) {
    out.feasible = true;
    out.x = aux.x.head(n);
  }
  return out;
}

// Orthonormal elimination of Ex = f: x = x_p + Z y with E Z = 0.
struct Elimination {
  bool consistent{true};
  VectorXd x_p;
  MatrixXd Z;  // n x (n - rank)
};

Elimination eliminate(const MatrixXd& E, const VectorXd& f, int n) {
  Elimination out;
  if (E.rows() == 0) {
    out.x_p = VectorXd::Zero(n);
    out.Z = MatrixXd::Identity(n, n);
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(E);
  cod.setThreshold(1e-12);
  out.x_p = cod.solve(f);
  const double scale = std::max(1.0, f.lpNorm<Eigen::Infinity>());
  if ((E * out.x_p - f).lpNorm<Eigen::Infinity>() > kFeasTol * scale) {
    out.consistent = false;
    return out;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(E.transpose());
  qr.setThreshold(1e-12);
  const int rank = static_cast<int>(qr.rank());
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
  out.Z = q.rightCols(n - rank);
  return out;
}

// Equality-constrained LP stage used by the lexicographic refinement.
LpCoreResult lp_stage(const VectorXd& c, const MatrixXd& C, const VectorXd& d,
                      const MatrixXd& E, const VectorXd& f,
                      const VectorXd& x_start, int max_iter) {
  const int n = static_cast<int>(c.size());
  LpCoreResult out;
  const Elimination el = eliminate(E, f, n);
  if (!el.consistent) {
    out.status = SolveStatus::infeasible;
    return out;
  }
  const int nr = static_cast<int>(el.Z.cols());
  if (nr == 0) {
    out.status = SolveStatus::optimal;
    out.x = el.x_p;
    return out;
  }
  const VectorXd cr = el.Z.transpose() * c;
  const MatrixXd cz = C * el.Z;
  const VectorXd dz = d - C * el.x_p;
  VectorXd y0 = el.Z.transpose() * (x_start - el.x_p);
  LpCoreResult red = lp_core(cr, cz, dz, std::move(y0), max_iter);
  out.status = red.status;
  out.iterations = red.iterations;
  out.working = std::move(red.working);
  out.lambda = std::move(red.lambda);
  out.x = el.x_p + el.Z * red.x;
  return out;
}

std::vector<int> active_rows_at(const MatrixXd& C, const VectorXd& d,
                                const VectorXd& x) {
  std::vector<int> act;
  for (int i = 0; i < C.rows(); ++i) {
    const double scale = std::max(1.0, C.row(i).norm());
    if (std::abs(C.row(i).dot(x) - d[i]) <= 1e-7 * scale) {
      act.push_back(i);
    }
  }
  return act;
}

KktResiduals residuals_impl(const MatrixXd& H, const VectorXd& g,
                            const MatrixXd& C, const VectorXd& d,
                            const MatrixXd& E, const VectorXd& f,
                            bool maximize_linear, const VectorXd& c_lin,
                            const SolveReport& rep) {
  KktResiduals out{0.0, 0.0, 0.0, 0.0};
  const VectorXd& x = rep.solution;
  for (int i = 0; i < C.rows(); ++i) {
    out.primal = std::max(out.primal, C.row(i).dot(x) - d[i]);
  }
  out.primal = std::max(out.primal, 0.0);
  if (E.rows() > 0) {
    out.primal = std::max(out.primal, (E * x - f).lpNorm<Eigen::Infinity>());
  }
  VectorXd mu = rep.ineq_multipliers;
  if (mu.size() != C.rows()) {
    mu = VectorXd::Zero(C.rows());
  }
  VectorXd stat;
  if (maximize_linear) {
    stat = C.transpose() * mu - c_lin;
  } else {
    stat = H * x + g + C.transpose() * mu;
    if (E.rows() > 0 && rep.eq_multipliers.size() == E.rows()) {
      stat += E.transpose() * rep.eq_multipliers;
    }
  }
  out.stationarity = stat.size() > 0 ? stat.lpNorm<Eigen::Infinity>() : 0.0;
  for (int i = 0; i < C.rows(); ++i) {
    out.complementarity =
        std::max(out.complementarity, std::abs(mu[i] * (C.row(i).dot(x) - d[i])));
    out.dual = std::max(out.dual, -mu[i]);
  }
  out.dual = std::max(out.dual, 0.0);
  return out;
}

}  // namespace

SolveReport solve_lp(const LinearProgram& prog) {
  const int n = static_cast<int>(prog.c.size());
  const Rows rows = expand_rows(prog.C, prog.d, prog.lb, prog.ub, n);
  const int m = static_cast<int>(rows.C.rows());
  const int cap = 50 * (n + m + 1);

  SolveReport rep;
  rep.ineq_multipliers = VectorXd::Zero(m);

  const Phase1Result ph = find_feasible(rows.C, rows.d);
  if (!ph.feasible) {
    rep.status = ph.clean ? SolveStatus::infeasible : SolveStatus::max_iter;
    rep.solution = VectorXd::Zero(n);
    return rep;
  }

  LpCoreResult core = lp_core(prog.c, rows.C, rows.d, ph.x, cap);
  rep.iterations = core.iterations;
  rep.solution = core.x;
  if (core.status != SolveStatus::optimal) {
    rep.status = core.status;
    return rep;
  }
  for (int i = 0; i < static_cast<int>(core.working.size()); ++i) {
    rep.ineq_multipliers[core.working[i]] = std::max(0.0, core.lambda[i]);
  }

  // Lexicographic refinement on the optimal face: fix the objective, then
  // minimize coordinates in order. Coordinates unbounded on the face keep
  // their incumbent values.
  MatrixXd e_fix(1, n);
  e_fix.row(0) = prog.c.transpose();
  VectorXd f_fix(1);
  f_fix[0] = prog.c.dot(core.x);
  VectorXd x = core.x;
  for (int j = 0; j < n; ++j) {
    VectorXd obj = VectorXd::Zero(n);
    obj[j] = -1.0;
    const LpCoreResult st = lp_stage(obj, rows.C, rows.d, e_fix, f_fix, x, cap);
    if (st.status != SolveStatus::optimal) {
      continue;
    }
    x = st.x;
    MatrixXd e2(e_fix.rows() + 1, n);
    e2.topRows(e_fix.rows()) = e_fix;
    e2.row(e_fix.rows()).setZero();
    e2(e_fix.rows(), j) = 1.0;
    VectorXd f2(f_fix.size() + 1);
    f2.head(f_fix.size()) = f_fix;
    f2[f_fix.size()] = x[j];
    e_fix = std::move(e2);
    f_fix = std::move(f2);
  }
  rep.solution = x;
  rep.active_set = active_rows_at(rows.C, rows.d, x);
  rep.status = SolveStatus::optimal;
  return rep;
}

SolveReport solve_qp(const QuadraticProgram& prog) {
  const int n = static_cast<int>(prog.H.rows());
  if (prog.H.cols() != n || prog.g.size() != n) {
    throw std::invalid_argument("solve_qp: inconsistent dimensions");
  }
  if ((prog.H - prog.H.transpose()).lpNorm<Eigen::Infinity>() >
      1e-10 * std::max(1.0, prog.H.lpNorm<Eigen::Infinity>())) {
    throw std::invalid_argument("solve_qp: H not symmetric");
  }

  MatrixXd H = prog.H;
  {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -kPsdClamp * std::max(1.0, H.lpNorm<Eigen::Infinity>())) {
      throw std::invalid_argument("solve_qp: H not PSD within tolerance");
    }
    if (lmin < 0.0) {
      H = es.eigenvectors() *
          es.eigenvalues().cwiseMax(0.0).asDiagonal() *
          es.eigenvectors().transpose();
    }
  }

  const Rows rows = expand_rows(prog.C, prog.d, prog.lb, prog.ub, n);
  const int m = static_cast<int>(rows.C.rows());
  const int max_changes = 10 * (n + m + static_cast<int>(prog.E.rows()));

  SolveReport rep;
  rep.ineq_multipliers = VectorXd::Zero(m);
  rep.eq_multipliers = VectorXd::Zero(prog.E.rows());

  const Elimination el = eliminate(prog.E, prog.f, n);
  if (!el.consistent) {
    rep.status = SolveStatus::infeasible;
    rep.solution = VectorXd::Zero(n);
    return rep;
  }
  const int nr = static_cast<int>(el.Z.cols());

  const MatrixXd cz = rows.C * el.Z;
  const VectorXd dz = rows.d - rows.C * el.x_p;
  const MatrixXd hr = el.Z.transpose() * H * el.Z;
  const VectorXd gr = el.Z.transpose() * (H * el.x_p + prog.g);

  auto finish = [&](SolveStatus status, const VectorXd& y,
                    const std::vector<int>& working, const VectorXd& lam,
                    int iters) -> SolveReport& {
    rep.status = status;
    rep.iterations = iters;
    rep.solution = el.x_p + el.Z * y;
    for (int i = 0; i < static_cast<int>(working.size()); ++i) {
      rep.ineq_multipliers[working[i]] = std::max(0.0, lam[i]);
    }
    rep.active_set = active_rows_at(rows.C, rows.d, rep.solution);
    if (prog.E.rows() > 0) {
      const VectorXd rhs =
          -(H * rep.solution + prog.g + rows.C.transpose() * rep.ineq_multipliers);
      Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(prog.E.transpose());
      cod.setThreshold(1e-12);
      rep.eq_multipliers = cod.solve(rhs);
    }
    return rep;
  };

  if (nr == 0) {
    VectorXd y(0);
    const VectorXd x = el.x_p;
    double viol = 0.0;
    for (int i = 0; i < m; ++i) viol = std::max(viol, rows.C.row(i).dot(x) - rows.d[i]);
    return finish(viol <= kFeasTol ? SolveStatus::optimal : SolveStatus::infeasible,
                  y, {}, VectorXd(), 0);
  }

  const Phase1Result ph = find_feasible(cz, dz);
  if (!ph.feasible) {
    rep.status = ph.clean ? SolveStatus::infeasible : SolveStatus::max_iter;
    rep.solution = VectorXd::Zero(n);
    return rep;
  }

  VectorXd y = ph.x;
  std::vector<int> W;
  std::vector<char> in_w(m, 0);
  int iters = 0;

  while (iters < max_changes) {
    ++iters;
    const int k = static_cast<int>(W.size());
    const VectorXd grad = hr * y + gr;

    MatrixXd kkt(nr + k, nr + k);
    kkt.setZero();
    kkt.topLeftCorner(nr, nr) = hr;
    if (k > 0) {
      const MatrixXd nmat = gather_rows(cz, W);
      kkt.topRightCorner(nr, k) = nmat.transpose();
      kkt.bottomLeftCorner(k, nr) = nmat;
    }
    VectorXd rhs(nr + k);
    rhs.head(nr) = -grad;
    rhs.tail(k).setZero();

    Eigen::FullPivLU<MatrixXd> lu(kkt);
    lu.setThreshold(1e-12);
    VectorXd p;
    VectorXd lam = VectorXd::Zero(k);
    bool have_step = false;
    if (lu.isInvertible()) {
      const VectorXd sol = lu.solve(rhs);
      p = sol.head(nr);
      lam = sol.tail(k);
      have_step = true;
    } else {
      // Curvature-deficient subspace: look for an unbounded descent ray
      // u with Hr u = 0, N u = 0, grad.u < 0.
      MatrixXd stacked(nr + k, nr);
      stacked.topRows(nr) = hr;
      if (k > 0) stacked.bottomRows(k) = gather_rows(cz, W);
      Eigen::FullPivLU<MatrixXd> slu(stacked);
      slu.setThreshold(1e-12);
      const MatrixXd kern = slu.kernel();
      VectorXd ray;
      for (int c = 0; c < kern.cols(); ++c) {
        VectorXd u = kern.col(c);
        const double un = u.norm();
        if (un <= 1e-14) continue;
        u /= un;
        const double dd = grad.dot(u);
        if (std::abs(dd) > 1e-11 * std::max(1.0, grad.norm())) {
          ray = dd > 0.0 ? VectorXd(-u) : u;
          break;
        }
      }
      if (ray.size() > 0) {
        double alpha = kInf;
        int blocker = -1;
        for (int i = 0; i < m; ++i) {
          if (in_w[i]) continue;
          const double ap = cz.row(i).dot(ray);
          if (ap > 1e-11 * std::max(1.0, cz.row(i).norm())) {
            const double slack = std::max(0.0, dz[i] - cz.row(i).dot(y));
            const double ratio = slack / ap;
            if (ratio < alpha) {
              alpha = ratio;
              blocker = i;
            }
          }
        }
        if (blocker < 0) {
          rep.status = SolveStatus::unbounded;
          rep.solution = el.x_p + el.Z * y;
          rep.iterations = iters;
          return rep;
        }
        y += alpha * ray;
        W.push_back(blocker);
        in_w[blocker] = 1;
        continue;
      }
      Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(kkt);
      cod.setThreshold(1e-12);
      const VectorXd sol = cod.solve(rhs);
      p = sol.head(nr);
      lam = sol.tail(k);
      have_step = true;
    }

    if (!have_step) continue;

    if (p.lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, y.lpNorm<Eigen::Infinity>())) {
      int drop = -1;
      int drop_row = std::numeric_limits<int>::max();
      for (int i = 0; i < k; ++i) {
        if (lam[i] < -kMultTol && W[i] < drop_row) {
          drop_row = W[i];
          drop = i;
        }
      }
      if (drop < 0) {
        SolveReport& out = finish(SolveStatus::optimal, y, W, lam, iters);
        const KktResiduals res = kkt_residuals(prog, out);
        if (res.primal > kFeasTol || res.stationarity > kStatTol ||
            res.complementarity > kStatTol) {
          out.status = SolveStatus::max_iter;
        }
        return out;
      }
      in_w[W[drop]] = 0;
      W.erase(W.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    int blocker = -1;
    const double pnorm = p.norm();
    for (int i = 0; i < m; ++i) {
      if (in_w[i]) continue;
      const double ap = cz.row(i).dot(p);
      if (ap > 1e-11 * std::max(1.0, cz.row(i).norm()) * pnorm) {
        const double slack = std::max(0.0, dz[i] - cz.row(i).dot(y));
        const double ratio = slack / ap;
        if (ratio < alpha) {
          alpha = ratio;
          blocker = i;
        }
      }
    }
    y += alpha * p;
    if (blocker >= 0) {
      W.push_back(blocker);
      in_w[blocker] = 1;
    }
  }

  rep.status = SolveStatus::max_iter;
  rep.solution = el.x_p + el.Z * y;
  rep.iterations = iters;
  return rep;
}

KktResiduals kkt_residuals(const QuadraticProgram& prog, const SolveReport& rep) {
  const int n = static_cast<int>(prog.H.rows());
  const Rows rows = expand_rows(prog.C, prog.d, prog.lb, prog.ub, n);
  return residuals_impl(prog.H, prog.g, rows.C, rows.d, prog.E, prog.f, false,
                        VectorXd(), rep);
}

KktResiduals kkt_residuals(const LinearProgram& prog, const SolveReport& rep) {
  const int n = static_cast<int>(prog.c.size());
  const Rows rows = expand_rows(prog.C, prog.d, prog.lb, prog.ub, n);
  return residuals_impl(MatrixXd(), VectorXd(), rows.C, rows.d, MatrixXd(),
                        VectorXd(), true, prog.c, rep);
}

std::optional<Vec2> feasibility_check(std::span<const Halfspace> rows) {
  if (rows.empty()) {
    return std::nullopt;
  }
  const int m = static_cast<int>(rows.size());
  LinearProgram lp;
  lp.c = VectorXd::Zero(3);
  lp.c[2] = 1.0;  // maximize the common margin
  lp.C.resize(m, 3);
  lp.d.resize(m);
  for (int i = 0; i < m; ++i) {
    lp.C(i, 0) = rows[i].normal.x();
    lp.C(i, 1) = rows[i].normal.y();
    lp.C(i, 2) = rows[i].normal.norm();
    lp.d[i] = rows[i].offset;
  }
  lp.ub = VectorXd::Constant(3, kInf);
  lp.ub[2] = 1.0;  // cap: any margin beyond 1 m certifies an interior anyway
  const SolveReport rep = solve_lp(lp);
  if (rep.status != SolveStatus::optimal || rep.solution[2] <= 1e-9) {
    return std::nullopt;
  }
  return Vec2(rep.solution[0], rep.solution[1]);
}

ConvexRegion make_convex_region(std::vector<Halfspace> rows) {
  for (const Halfspace& h : rows) {
    if (!(h.normal.norm() > 1e-12)) {
      throw std::invalid_argument("make_convex_region: degenerate normal");
    }
  }
  if (!feasibility_check(rows)) {
    throw std::invalid_argument("make_convex_region: empty interior");
  }
  ConvexRegion region;
  region.halfspaces = std::move(rows);
  return region;
}

}  // namespace frnav
