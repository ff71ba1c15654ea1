#pragma once

#include "ismpc/footstep.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace ismpc::schedule {

enum class SupportPhase { InitialDouble, Single, Double };

std::string_view to_string(SupportPhase phase);

struct PhaseInfo {
  SupportPhase phase = SupportPhase::Single;
  /// Support foot; in double support the foot being left.
  std::size_t step = 0;
  /// Progress of the transfer toward step + 1, in [0, 1].
  double sigma = 0.0;
};

/// Phase of `plan` at time `t`. Sample instants are compared with a 1e-9
/// slack so that boundaries falling on the sampling grid are stable.
PhaseInfo phase_at(const footstep::FootstepPlan& plan, double t);

/// ZMP admissible region at one sample: a rectangle with known orientation
/// whose center is affine in the footstep positions,
///   center = offset + sum_j weight_j * p_j.
struct Region {
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  std::vector<std::pair<std::size_t, double>> weights;  // (plan step, weight)
  double theta = 0.0;
  Eigen::Vector2d half_dims = Eigen::Vector2d::Zero();

  /// Center with every referenced footstep at its position in `plan`.
  Eigen::Vector2d center(const footstep::FootstepPlan& plan) const;
};

/// Region at time t: the support foot in single support, a rectangle moving
/// linearly from one foot to the next in double support (orientation
/// interpolated too), and before the first step the bounding box of both
/// initial feet when a partner foot is given.
Region region_at(const footstep::FootstepPlan& plan, double t, const Eigen::Vector2d& zmp_dims);

/// Regions at t_k + i delta for i = 1..count.
std::vector<Region> region_schedule(const footstep::FootstepPlan& plan, double t_k, double delta,
                                    std::size_t count, const Eigen::Vector2d& zmp_dims);

/// Region centers at t_k + i delta for i = first..last (inclusive), every
/// footstep at its plan position.
std::vector<Eigen::Vector2d> centered_zmp(const footstep::FootstepPlan& plan, double t_k, double delta,
                                          std::size_t first, std::size_t last);

/// Anticipative preview samples C..P-1 per axis: velocities of the
/// piecewise-linear ZMP through the region centers.
std::pair<std::vector<double>, std::vector<double>> anticipative_preview(const footstep::FootstepPlan& plan,
                                                                         double t_k, double delta,
                                                                         std::size_t control,
                                                                         std::size_t preview);

/// Regular straight gait: feet at y = +-lateral/2, the first swing foot
/// lands `step_length` ahead of the starting line and every later step adds
/// `step_length`. steps[0] is the right foot supporting from `first_time`;
/// the left foot stands beside it as initial partner.
footstep::FootstepPlan regular_plan(std::size_t num_steps, double step_length, double lateral,
                                    double first_time, double step_time, double ss_fraction);

}  // namespace ismpc::schedule
