#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "frnav/geometry.hpp"

namespace frnav {

/// Dense convex QP: minimize 0.5 x'Hx + g'x subject to Cx <= d, Ex = f and
/// optional box bounds. H must be symmetric (1e-10) and PSD up to a -1e-9
/// eigenvalue clamp. Problem sizes here are tiny (<= ~10 variables,
/// <= ~60 constraints), so everything is dense and deterministic.
struct QuadraticProgram {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd C;   // may have zero rows
  Eigen::VectorXd d;
  Eigen::MatrixXd E;   // may have zero rows
  Eigen::VectorXd f;
  Eigen::VectorXd lb;  // size 0 (absent) or n; -inf entries allowed
  Eigen::VectorXd ub;  // size 0 (absent) or n; +inf entries allowed
};

/// Dense LP: maximize c'x subject to Cx <= d and optional box bounds.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
};

enum class SolveStatus { optimal, infeasible, unbounded, max_iter };

/// Box bounds are expanded into extra inequality rows appended after C in a
/// fixed order (finite ub rows by ascending variable, then finite lb rows by
/// ascending variable); active_set and ineq_multipliers index that expanded
/// system.
struct SolveReport {
  SolveStatus status{SolveStatus::infeasible};
  Eigen::VectorXd solution;
  std::vector<int> active_set;
  int iterations{0};
  Eigen::VectorXd ineq_multipliers;
  Eigen::VectorXd eq_multipliers;
};

/// Primal active-set QP. Equalities are eliminated through an orthonormal
/// nullspace basis, so they hold to linear-algebra precision. Deterministic:
/// lowest-index rules for entering/leaving constraints.
SolveReport solve_qp(const QuadraticProgram& prog);

/// Active-set vertex pursuit for LPs. When the optimal face is not a single
/// point the lexicographically smallest optimal vertex is returned
/// (coordinates fixed one at a time on the optimal face); coordinates
/// unbounded on that face are left at their incumbent values.
SolveReport solve_lp(const LinearProgram& prog);

/// KKT residuals recomputed from the raw program data. Kept free of solver
/// internals so it can certify reports independently.
struct KktResiduals {
  double primal;           // max inequality violation / equality residual
  double stationarity;     // |Hx + g + C'mu + E'nu| or |C'mu - c|, inf-norm
  double complementarity;  // max |mu_i * slack_i|
  double dual;             // max(0, -min mu)
};
KktResiduals kkt_residuals(const QuadraticProgram& prog, const SolveReport& report);
KktResiduals kkt_residuals(const LinearProgram& prog, const SolveReport& report);

/// Strict interior point of the halfspace intersection (margin 1e-9 in
/// distance units), or nullopt when none exists. Solved as an auxiliary LP
/// maximizing the common margin.
std::optional<Vec2> feasibility_check(std::span<const Halfspace> rows);

/// Validated region constructor; throws std::invalid_argument when the
/// interior is empty.
ConvexRegion make_convex_region(std::vector<Halfspace> rows);

}  // namespace frnav
