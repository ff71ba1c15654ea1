#pragma once

#include "ismpc/footstep.hpp"
#include "ismpc/lip.hpp"
#include "ismpc/qp.hpp"
#include "ismpc/schedule.hpp"
#include "ismpc/tails.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace ismpc::controller {

enum class ControllerKind { IsMpc, StandardMpc };
/// How the stability condition enters the QP: as the stability row on the
/// controlled velocities, or as the equivalent terminal constraint on x_u.
enum class ConstraintForm { StabilityRow, Terminal };

std::string_view to_string(ControllerKind kind);

struct MpcConfig {
  ControllerKind kind = ControllerKind::IsMpc;
  std::size_t horizon_c = 100;
  std::size_t preview_p = 100;
  Eigen::Vector2d zmp_dims{0.04, 0.04};
  footstep::KinematicLimits limits;
  double beta = 1e4;
  tails::TailKind tail = tails::TailKind::Periodic;
  tails::Residual residual = tails::Residual::Truncated;
  bool footsteps_fixed = true;
  ConstraintForm form = ConstraintForm::StabilityRow;
  /// Standard MPC only: weight of an extra cost pulling the ZMP to the
  /// region centers.
  double centering_weight = 0.0;
  double tolerance = 1e-8;

  /// Throws std::invalid_argument on inconsistent horizons or non-positive
  /// dimensions/weights.
  void validate() const;
};

/// Stacked inequality rows lower <= A x <= upper.
struct RowBlock {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Decision vector layout (Xdot_z, Ydot_z, X_f, Y_f).
struct Layout {
  std::size_t horizon = 0;
  /// Plan indices of the footsteps that are decision variables.
  std::vector<std::size_t> free_steps;

  Eigen::Index size() const { return static_cast<Eigen::Index>(2 * horizon + 2 * free_steps.size()); }
  Eigen::Index vel(int axis, std::size_t i) const {
    return static_cast<Eigen::Index>(axis * horizon + i);
  }
  /// Column of a plan step, or -1 if the step is not a decision variable.
  Eigen::Index foot(int axis, std::size_t step) const;
};

/// Two rows per sample i = 1..C bounding R^T (z_i - c_i) by the half
/// dimensions, with z_i = z_k + delta * sum_{l<i} zdot_l.
RowBlock build_zmp_constraints(const std::vector<schedule::Region>& regions, const Eigen::Vector2d& current_zmp,
                               double delta, const footstep::FootstepPlan& plan, const Layout& layout);

/// Two rows per free footstep bounding its displacement from the previous
/// one in the previous foot's frame.
RowBlock build_kinematic_constraints(const footstep::FootstepPlan& plan, const footstep::KinematicLimits& limits,
                                     const Layout& layout);

struct AssembledProblem {
  qp::QpProblem qp;
  Layout layout;
  std::vector<schedule::Region> regions;
  /// Stability rows used (IS-MPC only), per axis.
  std::vector<tails::StabilityRow> stability;
};

/// Builds the per-iteration QP. Footsteps with plan index >= first_free that
/// the horizon references become decision variables unless footsteps are
/// fixed.
AssembledProblem assemble_qp(const lip::PlanarState& state, const footstep::FootstepPlan& candidates,
                             std::size_t first_free, const lip::LipParams& params, const MpcConfig& config);

/// Tail per axis for the current iteration (anticipative previews are taken
/// from the region centers of the candidate plan).
std::pair<tails::Tail, tails::Tail> make_tails(const lip::PlanarState& state,
                                               const footstep::FootstepPlan& candidates,
                                               const lip::LipParams& params, const MpcConfig& config);

struct MpcIterationResult {
  qp::QpStatus status = qp::QpStatus::Infeasible;
  Eigen::Vector2d first_inputs = Eigen::Vector2d::Zero();
  /// (plan index, position) of the decision footsteps.
  std::vector<std::pair<std::size_t, Eigen::Vector2d>> planned_footsteps;
  lip::PlanarState next_state;
  double objective = 0.0;
  int iterations = 0;
  std::size_t active_constraints = 0;
  Eigen::VectorXd solution;
};

class Controller {
 public:
  Controller(lip::LipParams params, MpcConfig config);

  /// One receding-horizon step. On Optimal the first velocity sample of each
  /// axis is applied over one sample time; otherwise next_state == state.
  MpcIterationResult iterate(const lip::PlanarState& state, const footstep::FootstepPlan& candidates,
                             std::size_t first_free = 1);

  const MpcConfig& config() const { return config_; }
  const lip::LipParams& params() const { return params_; }

 private:
  lip::LipParams params_;
  MpcConfig config_;
  qp::ActiveSetSolver solver_;
};

}  // namespace ismpc::controller
