#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace ismpc::qp {

/// Dense convex QP
///
///   min  1/2 x'Hx + c'x
///   s.t. A_eq x = b_eq,  lower <= A_in x <= upper
///
/// Infinite entries in `ineq_lower` / `ineq_upper` mark absent sides.
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear_cost;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ineq_matrix;
  Eigen::VectorXd ineq_lower;
  Eigen::VectorXd ineq_upper;

  /// Unconstrained problem with a zero cost over `n` variables.
  static QpProblem Empty(Eigen::Index n);

  Eigen::Index num_variables() const { return hessian.rows(); }
  Eigen::Index num_equalities() const { return eq_matrix.rows(); }
  Eigen::Index num_inequalities() const { return ineq_matrix.rows(); }

  /// Throws std::invalid_argument on inconsistent dimensions, an asymmetric
  /// Hessian or crossed bounds.
  void validate() const;

  double objective(const Eigen::VectorXd& x) const;
};

enum class QpStatus { Optimal, Infeasible, MaxIter };

std::string_view to_string(QpStatus status);

/// One side of a constraint row held in the active set.
struct ActiveConstraint {
  enum class Kind { Equality, Lower, Upper };
  Kind kind;
  Eigen::Index row;
  bool operator==(const ActiveConstraint&) const = default;
};

struct QpSolution {
  Eigen::VectorXd primal;
  double objective = 0.0;
  QpStatus status = QpStatus::Infeasible;
  double kkt_residual = 0.0;
  Eigen::VectorXd eq_multipliers;
  /// Signed: positive when the lower side is active, negative for the upper.
  Eigen::VectorXd ineq_multipliers;
  std::vector<ActiveConstraint> active_set;
  int iterations = 0;
};

struct SolverSettings {
  double tolerance = 1e-8;
  /// Active-set changes before giving up; 0 selects 10 * (n + m_in).
  int max_iterations = 0;
  double regularization = 1e-10;
};

/// Dual active-set solver (Goldfarb-Idnani). Starts from the unconstrained
/// minimizer and adds violated constraints one at a time while keeping dual
/// feasibility, so an infeasible problem is detected when a violated
/// constraint can be neither added nor made reachable by dropping others.
///
/// The instance owns its factorization workspace; use one per thread.
class ActiveSetSolver {
 public:
  explicit ActiveSetSolver(SolverSettings settings = {});

  QpSolution solve(const QpProblem& problem);

  const SolverSettings& settings() const { return settings_; }

 private:
  bool add_to_factorization(Eigen::Index q);
  void drop_from_factorization(Eigen::Index position, Eigen::Index& q);
  Eigen::VectorXd normal(const QpProblem& p, const ActiveConstraint& c) const;
  double rhs(const QpProblem& p, const ActiveConstraint& c) const;
  void finalize(const QpProblem& p, QpSolution& sol, Eigen::Index q) const;

  SolverSettings settings_;
  Eigen::MatrixXd J_;
  Eigen::MatrixXd R_;
  Eigen::VectorXd d_;
  std::vector<ActiveConstraint> active_;
  Eigen::VectorXd u_;
};

/// Convenience wrapper around a temporary ActiveSetSolver.
QpSolution solve(const QpProblem& problem, double tol = 1e-8, int max_iter = 0);

/// True iff every equality residual is within `tol` and every inequality row
/// lies in [lower - tol, upper + tol].
bool check_feasible(const QpProblem& problem, const Eigen::VectorXd& point, double tol);

/// Max-norm KKT residual (stationarity, primal feasibility, dual sign and
/// complementarity) of a candidate primal/dual pair.
double kkt_residual(const QpProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& eq_multipliers, const Eigen::VectorXd& ineq_multipliers);

}  // namespace ismpc::qp
