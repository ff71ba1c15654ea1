#pragma once

#include "ismpc/footstep.hpp"
#include "ismpc/lip.hpp"
#include "ismpc/schedule.hpp"
#include "ismpc/tails.hpp"

#include <vector>

namespace ismpc::feasibility {

/// Admissible range [lower, upper] of the unstable coordinate at `time`.
struct FeasibilityInterval {
  double lower = 0.0;
  double upper = 0.0;
  double time = 0.0;

  double width() const { return upper - lower; }
};

/// Continuous piecewise-linear function of the time elapsed since t_k,
/// through (knots[i], values[i]); constant before the first knot and after
/// the last one.
struct PiecewiseLinear {
  std::vector<double> knots;
  std::vector<double> values;

  static PiecewiseLinear Constant(double value) { return {{0.0}, {value}}; }

  double at(double t) const;
  /// Throws std::invalid_argument on size mismatch, empty or non-increasing knots.
  void validate() const;
};

/// eta * int_a^b e^{-eta tau} f(tau) d tau in closed form; `b` may be +inf.
double weighted_integral(const PiecewiseLinear& f, double a, double b, double eta);

/// ZMP bounds over the control horizon, times relative to t_k.
struct ZmpBoundProfile {
  PiecewiseLinear lower;
  PiecewiseLinear upper;
};

/// Feasibility interval of one axis for a tail given as an absolute ZMP
/// position profile after the control horizon (held constant past its last
/// knot).
FeasibilityInterval feasibility_interval(const ZmpBoundProfile& bounds, const PiecewiseLinear& tail,
                                         const lip::LipParams& params, double tc, double time = 0.0);

/// min(x_u - lower, upper - x_u); non-negative iff x_u is admissible.
double feasibility_margin(double unstable, const FeasibilityInterval& interval);

/// ZMP trajectory over [0, tc] that meets both the bounds and the stability
/// condition for a feasible x_u: a fixed blend of the two bounds (the upper
/// bound shifted down when the width is constant).
/// Throws std::invalid_argument when x_u lies outside the interval.
PiecewiseLinear witness_trajectory(double unstable, const ZmpBoundProfile& bounds,
                                   const FeasibilityInterval& interval, const lip::LipParams& params, double tc);

/// Smallest preview horizon for which the anticipative tail is guaranteed
/// recursively feasible; never below tc.
double recursive_feasibility_preview_bound(double eta, double tc, double v_max, double dz);

/// Largest per-axis ZMP speed implied by moving between consecutive
/// footsteps during double support.
double plan_max_zmp_speed(const footstep::FootstepPlan& plan);

/// Exact admissible range of x_u for the sampled QP on one axis: the ZMP at
/// samples 1..C within [lower_i, upper_i], starting from `zmp_start`, under
/// the stability row.
FeasibilityInterval sampled_interval(const std::vector<double>& lower, const std::vector<double>& upper,
                                     double zmp_start, const tails::StabilityRow& row,
                                     const lip::LipParams& params, double time = 0.0);

struct AxisIntervals {
  FeasibilityInterval x;
  FeasibilityInterval y;
  /// Set when some region is rotated, so per-axis bounds are an outer box.
  bool approximate = false;
};

/// Per-axis bounds at samples 1..C from the region schedule (outer box of
/// rotated regions).
void axis_bounds(const std::vector<schedule::Region>& regions, const footstep::FootstepPlan& plan, int axis,
                 std::vector<double>& lower, std::vector<double>& upper, bool& approximate);

/// Continuous-time intervals at times t_k = k delta for k = 0..count-1 with
/// the plan's region bounds and a centered anticipative tail over
/// [Tc, Tp] (truncated afterwards). A truncated tail holds the region center
/// at Tc instead. Periodic tails have no fixed position profile and are
/// rejected.
std::vector<AxisIntervals> track_regions(const footstep::FootstepPlan& plan, tails::TailKind tail,
                                         const lip::LipParams& params, std::size_t control,
                                         std::size_t preview, const Eigen::Vector2d& zmp_dims,
                                         std::size_t count);

}  // namespace ismpc::feasibility
