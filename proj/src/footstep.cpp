#include "ismpc/footstep.hpp"

#include "ismpc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ismpc::footstep {

Eigen::Matrix2d rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

double ReferenceVelocity::magnitude() const { return std::hypot(vx, vy); }

ReferenceSchedule::ReferenceSchedule(std::vector<Knot> knots) : knots_(std::move(knots)) {
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    const auto& k = knots_[i];
    if (!std::isfinite(k.time) || !std::isfinite(k.velocity.vx) || !std::isfinite(k.velocity.vy) ||
        !std::isfinite(k.velocity.omega)) {
      throw std::invalid_argument("ReferenceSchedule: non-finite knot " + std::to_string(i));
    }
    if (i > 0 && !(k.time > knots_[i - 1].time)) {
      throw std::invalid_argument("ReferenceSchedule: knot times must be strictly increasing");
    }
  }
}

ReferenceVelocity ReferenceSchedule::at(double t) const {
  ReferenceVelocity v;
  for (const auto& k : knots_) {
    if (k.time > t) break;
    v = k.velocity;
  }
  return v;
}

void CruiseParams::validate() const {
  if (!(alpha > 0.0) || !(ts_bar > 0.0) || !(v_bar >= 0.0)) {
    throw std::invalid_argument("CruiseParams: alpha and ts_bar must be positive");
  }
  if (std::abs(v_bar - ls_bar / ts_bar) > 1e-9) {
    throw std::invalid_argument("CruiseParams: v_bar must equal ls_bar / ts_bar");
  }
}

void KinematicLimits::validate() const {
  if (!(theta_max > 0.0) || !(ell > 0.0) || !(da_x > 0.0) || !(da_y > 0.0)) {
    throw std::invalid_argument("KinematicLimits: all limits must be positive");
  }
}

void FootstepPlan::validate() const {
  if (!(ss_fraction > 0.0) || ss_fraction > 1.0) {
    throw std::invalid_argument("FootstepPlan: ss_fraction must be in (0, 1]");
  }
  for (std::size_t j = 1; j < steps.size(); ++j) {
    if (steps[j].side == steps[j - 1].side) {
      throw std::invalid_argument("FootstepPlan: sides must alternate (step " + std::to_string(j) + ")");
    }
    if (!(steps[j].timestamp > steps[j - 1].timestamp)) {
      throw std::invalid_argument("FootstepPlan: timestamps must increase (step " + std::to_string(j) + ")");
    }
  }
}

double FootstepPlan::duration(std::size_t j) const {
  if (j + 1 >= steps.size()) return std::numeric_limits<double>::infinity();
  return steps[j + 1].timestamp - steps[j].timestamp;
}

double FootstepPlan::landing_time(std::size_t j) const {
  if (j == 0) return -std::numeric_limits<double>::infinity();
  return steps[j - 1].timestamp + ss_fraction * duration(j - 1);
}

double step_duration(double v, const CruiseParams& cruise) {
  if (!(v >= 0.0)) throw std::invalid_argument("step_duration: v must be non-negative");
  return cruise.ts_bar * (cruise.alpha + cruise.v_bar) / (cruise.alpha + v);
}

std::vector<double> generate_timing(const ReferenceSchedule& ref, double last_step_time,
                                    double preview_end, const CruiseParams& cruise) {
  constexpr double kSlack = 1e-9;
  std::vector<double> out;
  double t = last_step_time;
  while (true) {
    t += step_duration(ref.at(t).magnitude(), cruise);
    if (t > preview_end + kSlack) break;
    out.push_back(t);
  }
  return out;
}

namespace {

Pose2 arc(const Pose2& p, const ReferenceVelocity& v, double dt) {
  Pose2 q;
  const double th1 = p.theta + v.omega * dt;
  if (std::abs(v.omega * dt) < 1e-12) {
    const double c = std::cos(p.theta);
    const double s = std::sin(p.theta);
    q.x = p.x + (v.vx * c - v.vy * s) * dt;
    q.y = p.y + (v.vx * s + v.vy * c) * dt;
  } else {
    const double ds = std::sin(th1) - std::sin(p.theta);
    const double dc = std::cos(th1) - std::cos(p.theta);
    q.x = p.x + (v.vx * ds + v.vy * dc) / v.omega;
    q.y = p.y + (-v.vx * dc + v.vy * ds) / v.omega;
  }
  q.theta = th1;
  return q;
}

}  // namespace

Pose2 integrate_template(const ReferenceSchedule& ref, const Pose2& initial, double t0, double t1) {
  if (t1 < t0) throw std::invalid_argument("integrate_template: t1 < t0");
  Pose2 p = initial;
  double t = t0;
  for (const auto& k : ref.knots()) {
    if (k.time <= t) continue;
    if (k.time >= t1) break;
    p = arc(p, ref.at(t), k.time - t);
    t = k.time;
  }
  return arc(p, ref.at(t), t1 - t);
}

double integrate_omega(const ReferenceSchedule& ref, double t0, double t1) {
  return integrate_template(ref, Pose2{}, t0, t1).theta;
}

std::vector<double> solve_orientation_qp(const std::vector<double>& omega_integrals, double theta0,
                                         const KinematicLimits& limits) {
  const auto f = static_cast<Eigen::Index>(omega_integrals.size());
  if (f == 0) return {};
  // Increment operator D: (D theta)_j = theta^j - theta^{j-1}, theta^0 fixed.
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(f, f);
  for (Eigen::Index j = 1; j < f; ++j) d(j, j - 1) = -1.0;
  Eigen::VectorXd target(f);
  for (Eigen::Index j = 0; j < f; ++j) target[j] = omega_integrals[j];
  target[0] += theta0;

  qp::QpProblem p = qp::QpProblem::Empty(f);
  p.hessian = 2.0 * d.transpose() * d;
  p.linear_cost = -2.0 * d.transpose() * target;
  p.ineq_matrix = d;
  p.ineq_lower = Eigen::VectorXd::Constant(f, -limits.theta_max);
  p.ineq_upper = Eigen::VectorXd::Constant(f, limits.theta_max);
  p.ineq_lower[0] += theta0;
  p.ineq_upper[0] += theta0;

  const auto sol = qp::solve(p);
  if (sol.status != qp::QpStatus::Optimal) {
    throw PlanningError("orientation QP failed: " + std::string(qp::to_string(sol.status)));
  }
  return {sol.primal.data(), sol.primal.data() + f};
}

std::vector<Eigen::Vector2d> solve_placement_qp(const std::vector<Eigen::Vector2d>& deltas,
                                                const Eigen::Vector2d& start_foot, double theta0,
                                                const std::vector<double>& orientations, Side start_side,
                                                const KinematicLimits& limits) {
  const auto f = static_cast<Eigen::Index>(deltas.size());
  if (static_cast<Eigen::Index>(orientations.size()) != f) {
    throw std::invalid_argument("solve_placement_qp: one orientation per step required");
  }
  if (f == 0) return {};
  const Eigen::Index n = 2 * f;
  // Variables interleaved as (x^1, y^1, x^2, y^2, ...).
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 2; i < n; ++i) d(i, i - 2) = -1.0;
  Eigen::VectorXd target(n);
  for (Eigen::Index j = 0; j < f; ++j) target.segment<2>(2 * j) = deltas[j];
  target.head<2>() += start_foot;

  qp::QpProblem p = qp::QpProblem::Empty(n);
  p.hessian = 2.0 * d.transpose() * d;
  p.linear_cost = -2.0 * d.transpose() * target;
  p.ineq_matrix = Eigen::MatrixXd::Zero(n, n);
  p.ineq_lower.resize(n);
  p.ineq_upper.resize(n);
  Side side = start_side;
  for (Eigen::Index j = 0; j < f; ++j) {
    const double prev_theta = j == 0 ? theta0 : orientations[j - 1];
    const Eigen::Matrix2d rt = rotation(prev_theta).transpose();
    side = opposite(side);
    const Eigen::Vector2d center(0.0, sign(side) * limits.ell);
    const Eigen::Vector2d half(limits.da_x / 2.0, limits.da_y / 2.0);
    p.ineq_matrix.block<2, 2>(2 * j, 2 * j) = rt;
    Eigen::Vector2d offset = Eigen::Vector2d::Zero();
    if (j > 0) {
      p.ineq_matrix.block<2, 2>(2 * j, 2 * (j - 1)) = -rt;
    } else {
      offset = rt * start_foot;
    }
    p.ineq_lower.segment<2>(2 * j) = center - half + offset;
    p.ineq_upper.segment<2>(2 * j) = center + half + offset;
  }

  const auto sol = qp::solve(p);
  if (sol.status != qp::QpStatus::Optimal) {
    throw PlanningError("footstep placement QP failed: " + std::string(qp::to_string(sol.status)));
  }
  std::vector<Eigen::Vector2d> out(static_cast<std::size_t>(f));
  for (Eigen::Index j = 0; j < f; ++j) out[j] = sol.primal.segment<2>(2 * j);
  return out;
}

bool kinematically_admissible(const Pose2& previous, Side previous_side, const Eigen::Vector2d& next,
                              const KinematicLimits& limits, double tol) {
  const Eigen::Vector2d rel = rotation(previous.theta).transpose() * (next - previous.position());
  const Eigen::Vector2d center(0.0, sign(opposite(previous_side)) * limits.ell);
  return std::abs(rel.x() - center.x()) <= limits.da_x / 2.0 + tol &&
         std::abs(rel.y() - center.y()) <= limits.da_y / 2.0 + tol;
}

std::vector<Footstep> generate_candidates(const CandidateRequest& request) {
  const auto& ref = request.reference;
  const auto& support = request.support;
  const double half_ell = request.limits.ell / 2.0;
  const std::vector<double> times =
      generate_timing(ref, support.timestamp, request.preview_end, request.cruise);
  if (times.empty()) return {};

  const Eigen::Vector2d lateral(0.0, half_ell);
  Pose2 path{support.pose.x, support.pose.y, support.pose.theta};
  const Eigen::Vector2d center0 =
      support.pose.position() - sign(support.side) * rotation(support.pose.theta) * lateral;
  path.x = center0.x();
  path.y = center0.y();

  std::vector<double> omega(times.size());
  std::vector<Pose2> path_at(times.size());
  double t_prev = support.timestamp;
  Pose2 p = path;
  for (std::size_t j = 0; j < times.size(); ++j) {
    omega[j] = integrate_omega(ref, t_prev, times[j]);
    p = integrate_template(ref, p, t_prev, times[j]);
    path_at[j] = p;
    t_prev = times[j];
  }
  const std::vector<double> theta = solve_orientation_qp(omega, support.pose.theta, request.limits);

  // Targets keep each foot ell/2 off the template path on its own side.
  std::vector<Eigen::Vector2d> deltas(times.size());
  Side side = support.side;
  Eigen::Vector2d prev_offset = sign(side) * rotation(support.pose.theta) * lateral;
  Eigen::Vector2d prev_path = center0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    side = opposite(side);
    const Eigen::Vector2d offset = sign(side) * rotation(theta[j]) * lateral;
    deltas[j] = path_at[j].position() - prev_path + offset - prev_offset;
    prev_offset = offset;
    prev_path = path_at[j].position();
  }
  const auto pos = solve_placement_qp(deltas, support.pose.position(), support.pose.theta, theta,
                                      support.side, request.limits);

  std::vector<Footstep> out(times.size());
  side = support.side;
  for (std::size_t j = 0; j < times.size(); ++j) {
    side = opposite(side);
    out[j] = Footstep{Pose2{pos[j].x(), pos[j].y(), theta[j]}, side, times[j]};
  }
  return out;
}

}  // namespace ismpc::footstep
