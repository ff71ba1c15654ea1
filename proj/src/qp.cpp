#include "ismpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ismpc::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// A new normal whose component outside the active span (in the metric of
// H^{-1}) is below this fraction is treated as linearly dependent.
constexpr double kDependence = 1e-13;

bool is_diagonal(const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

// Columns (j, j+1) <- (c a + s b, -s a + c b).
void rotate_columns(Eigen::MatrixXd& m, Eigen::Index j, double c, double s) {
  double* a = m.col(j).data();
  double* b = m.col(j + 1).data();
  const Eigen::Index rows = m.rows();
  for (Eigen::Index k = 0; k < rows; ++k) {
    const double u = a[k];
    const double v = b[k];
    a[k] = c * u + s * v;
    b[k] = c * v - s * u;
  }
}

}  // namespace

QpProblem QpProblem::Empty(Eigen::Index n) {
  QpProblem p;
  p.hessian = Eigen::MatrixXd::Zero(n, n);
  p.linear_cost = Eigen::VectorXd::Zero(n);
  p.eq_matrix.resize(0, n);
  p.eq_rhs.resize(0);
  p.ineq_matrix.resize(0, n);
  p.ineq_lower.resize(0);
  p.ineq_upper.resize(0);
  return p;
}

void QpProblem::validate() const {
  const Eigen::Index n = hessian.rows();
  if (hessian.cols() != n || linear_cost.size() != n) {
    throw std::invalid_argument("QpProblem: cost dimensions mismatch");
  }
  if (eq_matrix.cols() != n || eq_rhs.size() != eq_matrix.rows()) {
    throw std::invalid_argument("QpProblem: equality dimensions mismatch");
  }
  if (ineq_matrix.cols() != n || ineq_lower.size() != ineq_matrix.rows() ||
      ineq_upper.size() != ineq_matrix.rows()) {
    throw std::invalid_argument("QpProblem: inequality dimensions mismatch");
  }
  const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  if (n > 0 && (hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("QpProblem: hessian is not symmetric");
  }
  for (Eigen::Index i = 0; i < ineq_lower.size(); ++i) {
    if (ineq_lower[i] > ineq_upper[i]) {
      throw std::invalid_argument("QpProblem: ineq_lower exceeds ineq_upper at row " + std::to_string(i));
    }
  }
}

double QpProblem::objective(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(hessian * x) + linear_cost.dot(x);
}

std::string_view to_string(QpStatus status) {
  switch (status) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

ActiveSetSolver::ActiveSetSolver(SolverSettings settings) : settings_(settings) {}

Eigen::VectorXd ActiveSetSolver::normal(const QpProblem& p, const ActiveConstraint& c) const {
  switch (c.kind) {
    case ActiveConstraint::Kind::Equality: return p.eq_matrix.row(c.row).transpose();
    case ActiveConstraint::Kind::Lower: return p.ineq_matrix.row(c.row).transpose();
    case ActiveConstraint::Kind::Upper: return -p.ineq_matrix.row(c.row).transpose();
  }
  return {};
}

double ActiveSetSolver::rhs(const QpProblem& p, const ActiveConstraint& c) const {
  switch (c.kind) {
    case ActiveConstraint::Kind::Equality: return p.eq_rhs[c.row];
    case ActiveConstraint::Kind::Lower: return p.ineq_lower[c.row];
    case ActiveConstraint::Kind::Upper: return -p.ineq_upper[c.row];
  }
  return 0.0;
}

// Appends the normal whose transformed image is in d_ as column q of R,
// rotating J so that J' N stays upper triangular.
bool ActiveSetSolver::add_to_factorization(Eigen::Index q) {
  const Eigen::Index n = J_.rows();
  for (Eigen::Index j = n - 1; j > q; --j) {
    const double a = d_[j - 1];
    const double b = d_[j];
    if (b == 0.0) continue;
    const double h = std::hypot(a, b);
    const double c = a / h;
    const double s = b / h;
    d_[j - 1] = h;
    d_[j] = 0.0;
    rotate_columns(J_, j - 1, c, s);
  }
  R_.col(q).head(q + 1) = d_.head(q + 1);
  return std::abs(d_[q]) > 0.0;
}

void ActiveSetSolver::drop_from_factorization(Eigen::Index position, Eigen::Index& q) {
  for (Eigen::Index j = position; j + 1 < q; ++j) {
    R_.col(j) = R_.col(j + 1);
  }
  R_.col(q - 1).setZero();
  active_.erase(active_.begin() + position);
  for (Eigen::Index j = position; j + 1 < q; ++j) u_[j] = u_[j + 1];
  --q;
  // R is now upper Hessenberg from `position`; restore the triangle.
  for (Eigen::Index j = position; j < q; ++j) {
    const double a = R_(j, j);
    const double b = R_(j + 1, j);
    if (b == 0.0) continue;
    const double h = std::hypot(a, b);
    const double c = a / h;
    const double s = b / h;
    for (Eigen::Index k = j; k < q; ++k) {
      const double r1 = R_(j, k);
      const double r2 = R_(j + 1, k);
      R_(j, k) = c * r1 + s * r2;
      R_(j + 1, k) = -s * r1 + c * r2;
    }
    R_(j + 1, j) = 0.0;
    rotate_columns(J_, j, c, s);
  }
}

QpSolution ActiveSetSolver::solve(const QpProblem& p) {
  p.validate();
  const Eigen::Index n = p.num_variables();
  const Eigen::Index me = p.num_equalities();
  const Eigen::Index mi = p.num_inequalities();
  const double tol = settings_.tolerance;
  const int max_iter = settings_.max_iterations > 0 ? settings_.max_iterations
                                                    : static_cast<int>(10 * (n + mi));

  QpSolution sol;
  sol.primal = Eigen::VectorXd::Zero(n);
  active_.clear();
  u_ = Eigen::VectorXd::Zero(n + 1);
  R_ = Eigen::MatrixXd::Zero(n, n + 1);
  d_ = Eigen::VectorXd::Zero(n);

  // J = L^{-T} with H + eps I = L L'.
  if (is_diagonal(p.hessian)) {
    J_ = (p.hessian.diagonal().array() + settings_.regularization).rsqrt().matrix().asDiagonal();
  } else {
    Eigen::MatrixXd h = p.hessian;
    h.diagonal().array() += settings_.regularization;
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("QpProblem: hessian is not positive semidefinite");
    }
    J_ = llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
  }
  if (n > 0 && !J_.allFinite()) {
    throw std::invalid_argument("QpProblem: hessian is not positive semidefinite");
  }

  Eigen::VectorXd x = -(J_ * (J_.transpose() * p.linear_cost));
  Eigen::VectorXd z(n);
  Eigen::VectorXd r(n + 1);
  Eigen::Index q = 0;
  int iterations = 0;

  auto fail = [&](QpStatus status) {
    sol.status = status;
    sol.primal = x;
    sol.iterations = iterations;
    finalize(p, sol, q);
    return sol;
  };

  // Equalities first; their multipliers are free in sign.
  for (Eigen::Index i = 0; i < me; ++i) {
    const ActiveConstraint c{ActiveConstraint::Kind::Equality, i};
    const Eigen::VectorXd np = normal(p, c);
    d_.noalias() = J_.transpose() * np;
    z.noalias() = J_.rightCols(n - q) * d_.tail(n - q);
    if (q > 0) {
      r.head(q) = R_.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d_.head(q));
    }
    const double residual = rhs(p, c) - np.dot(x);
    const double curvature = d_.tail(n - q).squaredNorm();
    if (curvature <= kDependence * d_.squaredNorm()) {
      // Dependent row: consistent rows are redundant, inconsistent ones infeasible.
      if (std::abs(residual) <= tol * (1.0 + std::abs(rhs(p, c)))) continue;
      return fail(QpStatus::Infeasible);
    }
    const double t = residual / curvature;
    x += t * z;
    if (q > 0) u_.head(q) -= t * r.head(q);
    u_[q] = t;
    active_.push_back(c);
    if (!add_to_factorization(q)) return fail(QpStatus::Infeasible);
    ++q;
  }

  // One-sided inequality constraints n'x >= b in fixed order.
  std::vector<ActiveConstraint> sides;
  sides.reserve(static_cast<std::size_t>(2 * mi));
  for (Eigen::Index i = 0; i < mi; ++i) {
    if (std::isfinite(p.ineq_lower[i])) sides.push_back({ActiveConstraint::Kind::Lower, i});
    if (std::isfinite(p.ineq_upper[i])) sides.push_back({ActiveConstraint::Kind::Upper, i});
  }
  // Membership flags per side, and normals stored as contiguous columns.
  std::vector<char> lower_on(static_cast<std::size_t>(mi), 0);
  std::vector<char> upper_on(static_cast<std::size_t>(mi), 0);
  auto flag = [&](const ActiveConstraint& c) -> char& {
    return c.kind == ActiveConstraint::Kind::Lower ? lower_on[static_cast<std::size_t>(c.row)]
                                                   : upper_on[static_cast<std::size_t>(c.row)];
  };
  const Eigen::MatrixXd normals = p.ineq_matrix.transpose();

  Eigen::VectorXd ax(mi);
  while (true) {
    ax.noalias() = p.ineq_matrix * x;
    double worst = -tol;
    const ActiveConstraint* chosen = nullptr;
    for (const auto& c : sides) {
      const double slack = c.kind == ActiveConstraint::Kind::Lower ? ax[c.row] - p.ineq_lower[c.row]
                                                                   : p.ineq_upper[c.row] - ax[c.row];
      if (slack < worst && !flag(c)) {
        worst = slack;
        chosen = &c;
      }
    }
    if (chosen == nullptr) break;

    const ActiveConstraint cp = *chosen;
    const Eigen::VectorXd np = cp.kind == ActiveConstraint::Kind::Lower ? Eigen::VectorXd(normals.col(cp.row))
                                                                        : Eigen::VectorXd(-normals.col(cp.row));
    const double bp = rhs(p, cp);
    double up = 0.0;

    while (true) {
      if (++iterations > max_iter) return fail(QpStatus::MaxIter);
      const double slack = np.dot(x) - bp;
      d_.noalias() = J_.transpose() * np;
      z.noalias() = J_.rightCols(n - q) * d_.tail(n - q);
      if (q > 0) {
        r.head(q) = R_.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d_.head(q));
      }

      // Partial step: the first active inequality whose multiplier hits zero.
      double t1 = kInf;
      Eigen::Index drop = -1;
      for (Eigen::Index j = 0; j < q; ++j) {
        if (active_[j].kind == ActiveConstraint::Kind::Equality || r[j] <= 0.0) continue;
        const double ratio = u_[j] / r[j];
        if (ratio < t1 || (ratio == t1 && drop >= 0 && active_[j].row < active_[drop].row)) {
          t1 = ratio;
          drop = j;
        }
      }
      // Full step: makes the chosen constraint active.
      const double curvature = d_.tail(n - q).squaredNorm();
      const bool dependent = curvature <= kDependence * d_.squaredNorm();
      const double t2 = dependent ? kInf : -slack / curvature;
      const double t = std::min(t1, t2);

      if (!std::isfinite(t)) return fail(QpStatus::Infeasible);

      if (!dependent) x += t * z;
      if (q > 0) u_.head(q) -= t * r.head(q);
      up += t;

      if (t == t2) {
        active_.push_back(cp);
        flag(cp) = 1;
        if (!add_to_factorization(q)) return fail(QpStatus::Infeasible);
        u_[q] = up;
        ++q;
        break;
      }
      flag(active_[drop]) = 0;
      drop_from_factorization(drop, q);
    }
  }

  sol.status = QpStatus::Optimal;
  sol.primal = x;
  sol.iterations = iterations;
  finalize(p, sol, q);
  return sol;
}

void ActiveSetSolver::finalize(const QpProblem& p, QpSolution& sol, Eigen::Index q) const {
  sol.objective = p.objective(sol.primal);
  sol.eq_multipliers = Eigen::VectorXd::Zero(p.num_equalities());
  sol.ineq_multipliers = Eigen::VectorXd::Zero(p.num_inequalities());
  sol.active_set.assign(active_.begin(), active_.begin() + q);
  for (Eigen::Index j = 0; j < q; ++j) {
    const auto& c = active_[j];
    switch (c.kind) {
      case ActiveConstraint::Kind::Equality: sol.eq_multipliers[c.row] = u_[j]; break;
      case ActiveConstraint::Kind::Lower: sol.ineq_multipliers[c.row] = u_[j]; break;
      case ActiveConstraint::Kind::Upper: sol.ineq_multipliers[c.row] = -u_[j]; break;
    }
  }
  sol.kkt_residual = kkt_residual(p, sol.primal, sol.eq_multipliers, sol.ineq_multipliers);
}

QpSolution solve(const QpProblem& problem, double tol, int max_iter) {
  ActiveSetSolver solver(SolverSettings{tol, max_iter, 1e-10});
  return solver.solve(problem);
}

bool check_feasible(const QpProblem& problem, const Eigen::VectorXd& point, double tol) {
  if (point.size() != problem.num_variables()) {
    throw std::invalid_argument("check_feasible: point dimension mismatch");
  }
  if (problem.num_equalities() > 0 &&
      (problem.eq_matrix * point - problem.eq_rhs).cwiseAbs().maxCoeff() > tol) {
    return false;
  }
  if (problem.num_inequalities() > 0) {
    const Eigen::VectorXd ax = problem.ineq_matrix * point;
    for (Eigen::Index i = 0; i < ax.size(); ++i) {
      if (ax[i] < problem.ineq_lower[i] - tol || ax[i] > problem.ineq_upper[i] + tol) return false;
    }
  }
  return true;
}

double kkt_residual(const QpProblem& p, const Eigen::VectorXd& x, const Eigen::VectorXd& eq_mult,
                    const Eigen::VectorXd& ineq_mult) {
  Eigen::VectorXd grad = p.hessian * x + p.linear_cost;
  if (p.num_equalities() > 0) grad -= p.eq_matrix.transpose() * eq_mult;
  if (p.num_inequalities() > 0) grad -= p.ineq_matrix.transpose() * ineq_mult;
  double res = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
  if (p.num_equalities() > 0) {
    res = std::max(res, (p.eq_matrix * x - p.eq_rhs).cwiseAbs().maxCoeff());
  }
  if (p.num_inequalities() > 0) {
    const Eigen::VectorXd ax = p.ineq_matrix * x;
    for (Eigen::Index i = 0; i < ax.size(); ++i) {
      const double lo = p.ineq_lower[i];
      const double hi = p.ineq_upper[i];
      res = std::max(res, lo - ax[i]);
      res = std::max(res, ax[i] - hi);
      const double lam = ineq_mult[i];
      if (lam > 0.0) {
        // Lower side active: multiplier must pair with a tight lower bound.
        res = std::max(res, std::isfinite(lo) ? lam * std::abs(ax[i] - lo) : lam);
      } else if (lam < 0.0) {
        res = std::max(res, std::isfinite(hi) ? -lam * std::abs(hi - ax[i]) : -lam);
      }
    }
  }
  return res;
}

}  // namespace ismpc::qp
