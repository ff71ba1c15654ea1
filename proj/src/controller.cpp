#include "ismpc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ismpc::controller {

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::IsMpc: return "ismpc";
    case ControllerKind::StandardMpc: return "standard";
  }
  return "unknown";
}

void MpcConfig::validate() const {
  if (horizon_c < 1) throw std::invalid_argument("MpcConfig: control horizon must be at least one sample");
  if (preview_p < horizon_c) throw std::invalid_argument("MpcConfig: preview horizon shorter than control horizon");
  if (!(zmp_dims.x() > 0.0) || !(zmp_dims.y() > 0.0)) {
    throw std::invalid_argument("MpcConfig: ZMP region dimensions must be positive");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("MpcConfig: beta must be positive");
  if (!(centering_weight >= 0.0)) throw std::invalid_argument("MpcConfig: centering weight must be non-negative");
  if (!(tolerance > 0.0)) throw std::invalid_argument("MpcConfig: tolerance must be positive");
  limits.validate();
}

Eigen::Index Layout::foot(int axis, std::size_t step) const {
  const auto it = std::find(free_steps.begin(), free_steps.end(), step);
  if (it == free_steps.end()) return -1;
  const auto j = static_cast<std::size_t>(it - free_steps.begin());
  return static_cast<Eigen::Index>(2 * horizon + axis * free_steps.size() + j);
}

namespace {

void append(RowBlock& block, const RowBlock& more) {
  if (more.matrix.rows() == 0) return;
  if (block.matrix.rows() == 0) {
    block = more;
    return;
  }
  RowBlock out;
  out.matrix.resize(block.matrix.rows() + more.matrix.rows(), block.matrix.cols());
  out.matrix << block.matrix, more.matrix;
  out.lower.resize(out.matrix.rows());
  out.lower << block.lower, more.lower;
  out.upper.resize(out.matrix.rows());
  out.upper << block.upper, more.upper;
  block = std::move(out);
}

Eigen::Vector2d axis_row(double theta, int r) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return r == 0 ? Eigen::Vector2d(c, s) : Eigen::Vector2d(-s, c);
}

}  // namespace

RowBlock build_zmp_constraints(const std::vector<schedule::Region>& regions, const Eigen::Vector2d& current_zmp,
                               double delta, const footstep::FootstepPlan& plan, const Layout& layout) {
  const auto count = static_cast<Eigen::Index>(regions.size());
  RowBlock b;
  b.matrix = Eigen::MatrixXd::Zero(2 * count, layout.size());
  b.lower.resize(2 * count);
  b.upper.resize(2 * count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& reg = regions[static_cast<std::size_t>(i)];
    // Known part of z_i - c_i.
    Eigen::Vector2d known = current_zmp - reg.offset;
    for (const auto& [step, w] : reg.weights) {
      if (layout.foot(0, step) < 0) known -= w * plan.steps.at(step).pose.position();
    }
    for (int r = 0; r < 2; ++r) {
      const Eigen::Index row = 2 * i + r;
      const Eigen::Vector2d n = axis_row(reg.theta, r);
      for (Eigen::Index l = 0; l <= i; ++l) {
        b.matrix(row, layout.vel(0, static_cast<std::size_t>(l))) = delta * n.x();
        b.matrix(row, layout.vel(1, static_cast<std::size_t>(l))) = delta * n.y();
      }
      for (const auto& [step, w] : reg.weights) {
        const Eigen::Index cx = layout.foot(0, step);
        if (cx < 0) continue;
        b.matrix(row, cx) -= w * n.x();
        b.matrix(row, layout.foot(1, step)) -= w * n.y();
      }
      const double k = n.dot(known);
      b.lower[row] = -reg.half_dims[r] - k;
      b.upper[row] = reg.half_dims[r] - k;
    }
  }
  return b;
}

RowBlock build_kinematic_constraints(const footstep::FootstepPlan& plan, const footstep::KinematicLimits& limits,
                                     const Layout& layout) {
  const auto count = static_cast<Eigen::Index>(layout.free_steps.size());
  RowBlock b;
  b.matrix = Eigen::MatrixXd::Zero(2 * count, layout.size());
  b.lower.resize(2 * count);
  b.upper.resize(2 * count);
  const Eigen::Vector2d half(limits.da_x / 2.0, limits.da_y / 2.0);
  for (Eigen::Index j = 0; j < count; ++j) {
    const std::size_t step = layout.free_steps[static_cast<std::size_t>(j)];
    if (step == 0) throw std::invalid_argument("build_kinematic_constraints: the first plan step cannot be free");
    const auto& prev = plan.steps.at(step - 1);
    const Eigen::Vector2d center(0.0, footstep::sign(plan.steps.at(step).side) * limits.ell);
    Eigen::Vector2d known = Eigen::Vector2d::Zero();
    if (layout.foot(0, step - 1) < 0) known = -prev.pose.position();
    for (int r = 0; r < 2; ++r) {
      const Eigen::Index row = 2 * j + r;
      const Eigen::Vector2d n = axis_row(prev.pose.theta, r);
      b.matrix(row, layout.foot(0, step)) += n.x();
      b.matrix(row, layout.foot(1, step)) += n.y();
      if (layout.foot(0, step - 1) >= 0) {
        b.matrix(row, layout.foot(0, step - 1)) -= n.x();
        b.matrix(row, layout.foot(1, step - 1)) -= n.y();
      }
      const double k = n.dot(known);
      b.lower[row] = center[r] - half[r] - k;
      b.upper[row] = center[r] + half[r] - k;
    }
  }
  return b;
}

std::pair<tails::Tail, tails::Tail> make_tails(const lip::PlanarState& state,
                                               const footstep::FootstepPlan& candidates,
                                               const lip::LipParams& params, const MpcConfig& config) {
  switch (config.tail) {
    case tails::TailKind::Truncated: return {tails::Tail::Truncated(), tails::Tail::Truncated()};
    case tails::TailKind::Periodic:
      return {tails::Tail::Periodic(config.horizon_c), tails::Tail::Periodic(config.horizon_c)};
    case tails::TailKind::Anticipative: {
      auto [px, py] = schedule::anticipative_preview(candidates, state.time, params.sample_time(),
                                                     config.horizon_c, config.preview_p);
      return {tails::Tail::Anticipative(std::move(px), config.residual),
              tails::Tail::Anticipative(std::move(py), config.residual)};
    }
  }
  return {};
}

namespace {

/// Affine expressions of the extended-LIP state over the horizon, one axis.
struct AxisPrediction {
  Eigen::MatrixXd com_vel;  // row i: xdot_c at sample i (i = 0..C-1)
  Eigen::VectorXd com_vel0;
};

AxisPrediction predict_axis(const lip::LipAxisState& s, const lip::LipParams& params, std::size_t horizon) {
  const double eta = params.eta();
  const double delta = params.sample_time();
  const double ch = std::cosh(eta * delta);
  const double sh = std::sinh(eta * delta);
  const auto c = static_cast<Eigen::Index>(horizon);
  AxisPrediction out{Eigen::MatrixXd::Zero(c, c), Eigen::VectorXd::Zero(c)};
  // e = x_c - x_z and its derivative, as affine rows in v.
  Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(c);
  Eigen::RowVectorXd dxc = Eigen::RowVectorXd::Zero(c);
  double e0 = s.com_pos - s.zmp_pos;
  double dxc0 = s.com_vel;
  for (Eigen::Index i = 0; i < c; ++i) {
    out.com_vel.row(i) = dxc;
    out.com_vel0[i] = dxc0;
    Eigen::RowVectorXd de = dxc;
    de[i] -= 1.0;
    const double de0 = dxc0;
    const Eigen::RowVectorXd e_next = e * ch + de * (sh / eta);
    const double e0_next = e0 * ch + de0 * (sh / eta);
    Eigen::RowVectorXd dxc_next = e * (eta * sh) + de * ch;
    dxc_next[i] += 1.0;
    dxc0 = e0 * eta * sh + de0 * ch;
    dxc = dxc_next;
    e = e_next;
    e0 = e0_next;
  }
  return out;
}

}  // namespace

AssembledProblem assemble_qp(const lip::PlanarState& state, const footstep::FootstepPlan& candidates,
                             std::size_t first_free, const lip::LipParams& params, const MpcConfig& config) {
  config.validate();
  candidates.validate();
  const std::size_t horizon = config.horizon_c;
  const double delta = params.sample_time();

  AssembledProblem out;
  out.regions = schedule::region_schedule(candidates, state.time, delta, horizon, config.zmp_dims);
  out.layout.horizon = horizon;
  if (!config.footsteps_fixed) {
    std::set<std::size_t> used;
    for (const auto& reg : out.regions) {
      for (const auto& [step, w] : reg.weights) {
        if (step >= std::max<std::size_t>(first_free, 1) && w != 0.0) used.insert(step);
      }
    }
    if (!used.empty()) {
      // Intermediate steps are included too so kinematic rows chain.
      for (std::size_t j = std::max<std::size_t>(first_free, 1); j <= *used.rbegin(); ++j) {
        out.layout.free_steps.push_back(j);
      }
    }
  }
  const Layout& layout = out.layout;
  const Eigen::Index n = layout.size();
  const auto c = static_cast<Eigen::Index>(horizon);

  qp::QpProblem& p = out.qp;
  p = qp::QpProblem::Empty(n);
  const lip::LipAxisState axes[2] = {state.x_axis, state.y_axis};

  if (config.kind == ControllerKind::IsMpc) {
    p.hessian.diagonal().head(2 * c).setConstant(2.0);
  } else {
    const double eta2 = params.eta() * params.eta();
    for (int a = 0; a < 2; ++a) {
      // jerk_i = eta^2 (xdot_c^i - v_i)
      const AxisPrediction pred = predict_axis(axes[a], params, horizon);
      Eigen::MatrixXd jm = eta2 * pred.com_vel;
      jm.diagonal().array() -= eta2;
      const Eigen::VectorXd j0 = eta2 * pred.com_vel0;
      p.hessian.block(a * c, a * c, c, c) += 2.0 * jm.transpose() * jm;
      p.linear_cost.segment(a * c, c) += 2.0 * jm.transpose() * j0;
    }
    if (config.centering_weight > 0.0) {
      // Lower-triangular integrator: z_i = z_k + delta * sum_{l<i} v_l.
      const Eigen::MatrixXd integ =
          delta * Eigen::MatrixXd::Ones(c, c).triangularView<Eigen::Lower>().toDenseMatrix();
      for (int a = 0; a < 2; ++a) {
        Eigen::VectorXd r0(c);
        for (Eigen::Index i = 0; i < c; ++i) {
          r0[i] = axes[a].zmp_pos - out.regions[static_cast<std::size_t>(i)].center(candidates)[a];
        }
        p.hessian.block(a * c, a * c, c, c) += 2.0 * config.centering_weight * integ.transpose() * integ;
        p.linear_cost.segment(a * c, c) += 2.0 * config.centering_weight * integ.transpose() * r0;
      }
    }
  }
  for (const std::size_t step : layout.free_steps) {
    const Eigen::Vector2d target = candidates.steps[step].pose.position();
    for (int a = 0; a < 2; ++a) {
      const Eigen::Index col = layout.foot(a, step);
      p.hessian(col, col) = 2.0 * config.beta;
      p.linear_cost[col] = -2.0 * config.beta * target[a];
    }
  }

  RowBlock rows = build_zmp_constraints(out.regions, {state.x_axis.zmp_pos, state.y_axis.zmp_pos}, delta,
                                        candidates, layout);
  if (!layout.free_steps.empty()) append(rows, build_kinematic_constraints(candidates, config.limits, layout));
  p.ineq_matrix = rows.matrix;
  p.ineq_lower = rows.lower;
  p.ineq_upper = rows.upper;

  if (config.kind == ControllerKind::IsMpc) {
    const auto [tx, ty] = make_tails(state, candidates, params, config);
    const tails::Tail* tail[2] = {&tx, &ty};
    p.eq_matrix = Eigen::MatrixXd::Zero(2, n);
    p.eq_rhs.resize(2);
    for (int a = 0; a < 2; ++a) {
      const lip::DecomposedState d = lip::decompose(axes[a], params);
      if (config.form == ConstraintForm::StabilityRow) {
        tails::StabilityRow row = tails::build_stability_row(*tail[a], params, horizon);
        p.eq_matrix.block(a, a * c, 1, c) = row.coeffs.transpose();
        p.eq_rhs[a] = row.rhs(d);
        out.stability.push_back(std::move(row));
      } else {
        const tails::AffineRow row = tails::terminal_row(*tail[a], params, horizon, d);
        p.eq_matrix.block(a, a * c, 1, c) = row.coeffs.transpose();
        p.eq_rhs[a] = row.constant;
      }
    }
  }
  return out;
}

Controller::Controller(lip::LipParams params, MpcConfig config)
    : params_(params), config_(std::move(config)), solver_(qp::SolverSettings{config_.tolerance, 0, 1e-10}) {
  config_.validate();
}

MpcIterationResult Controller::iterate(const lip::PlanarState& state, const footstep::FootstepPlan& candidates,
                                       std::size_t first_free) {
  const AssembledProblem problem = assemble_qp(state, candidates, first_free, params_, config_);
  const qp::QpSolution sol = solver_.solve(problem.qp);

  MpcIterationResult res;
  res.status = sol.status;
  res.objective = sol.objective;
  res.iterations = sol.iterations;
  res.active_constraints = sol.active_set.size();
  res.solution = sol.primal;
  res.next_state = state;
  if (sol.status != qp::QpStatus::Optimal) return res;

  const Layout& layout = problem.layout;
  res.first_inputs = {sol.primal[layout.vel(0, 0)], sol.primal[layout.vel(1, 0)]};
  for (const std::size_t step : layout.free_steps) {
    res.planned_footsteps.emplace_back(
        step, Eigen::Vector2d(sol.primal[layout.foot(0, step)], sol.primal[layout.foot(1, step)]));
  }
  res.next_state.x_axis = lip::step_exact(state.x_axis, res.first_inputs.x(), params_);
  res.next_state.y_axis = lip::step_exact(state.y_axis, res.first_inputs.y(), params_);
  res.next_state.time = state.time + params_.sample_time();
  return res;
}

}  // namespace ismpc::controller
