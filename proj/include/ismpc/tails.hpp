#pragma once

#include "ismpc/lip.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ismpc::tails {

enum class TailKind { Truncated, Periodic, Anticipative };
enum class Residual { Truncated, Periodic };

/// Conjectured ZMP velocities after the control horizon, per axis.
///
/// Periodic: the C controlled samples repeat forever (the replication
/// period must equal C). Anticipative: `preview` holds the samples
/// C..P-1, followed by zeros (truncated residual) or by repetitions of the
/// preview itself (periodic residual, period P - C).
struct Tail {
  TailKind kind = TailKind::Truncated;
  std::size_t period_samples = 0;
  std::vector<double> preview;
  Residual residual = Residual::Truncated;

  static Tail Truncated() { return {}; }
  static Tail Periodic(std::size_t period) { return {TailKind::Periodic, period, {}, Residual::Truncated}; }
  static Tail Anticipative(std::vector<double> preview, Residual residual = Residual::Truncated) {
    return {TailKind::Anticipative, 0, std::move(preview), residual};
  }
};

std::string to_string(TailKind kind);

/// Linear equality on the C controlled ZMP velocities:
///   coeffs . v = state_gain * (x_u - x_z) + offset
struct StabilityRow {
  Eigen::VectorXd coeffs;
  double state_gain = 0.0;
  double offset = 0.0;

  double rhs(const lip::DecomposedState& current) const {
    return state_gain * (current.unstable - current.zmp_pos) + offset;
  }
};

/// Throws std::invalid_argument on a periodic tail whose period differs
/// from `horizon`, or non-finite preview samples.
StabilityRow build_stability_row(const Tail& tail, const lip::LipParams& params, std::size_t horizon);

/// Closed-form sum over the anticipative tail, sum_{i >= C} w^i v_i with
/// w = exp(-eta delta). Zero for the truncated tail; undefined (throws) for
/// the periodic one, whose tail depends on the decision variables.
double anticipative_tail_sum(const Tail& tail, const lip::LipParams& params, std::size_t horizon);

/// Value that the unstable coordinate must take at the end of the control
/// horizon. `current_offset` is x_u - x_z at the current sample and is used
/// by the periodic tail only.
double terminal_constraint_value(const Tail& tail, const lip::LipParams& params, std::size_t horizon,
                                 double zmp_at_c, double current_offset = 0.0);

/// Affine expression coeffs . v + constant.
struct AffineRow {
  Eigen::VectorXd coeffs;
  double constant = 0.0;
};

/// x_u at sample C as an affine function of the C controlled velocities,
/// built by chaining the one-sample unstable-coordinate propagation.
AffineRow unstable_at_horizon(const lip::DecomposedState& current, const lip::LipParams& params,
                              std::size_t horizon);

/// Terminal constraint in the form coeffs . v = constant.
AffineRow terminal_row(const Tail& tail, const lip::LipParams& params, std::size_t horizon,
                       const lip::DecomposedState& current);

/// Per-sample velocities of a piecewise-linear ZMP through `centers`, i.e.
/// finite differences of consecutive samples divided by delta.
std::vector<double> differentiate_samples(const std::vector<double>& centers, double delta);

struct PropertyCheck {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  bool pass = false;
};

/// Quadrature checks of the exponentially weighted integral
/// eta * int_0^inf e^{-eta t} x_z(t) dt on step, ramp, shifted and combined
/// inputs, each within `tol`.
std::vector<PropertyCheck> verify_exponential_weighting_properties(const lip::LipParams& params,
                                                                   double tol = 1e-6);

}  // namespace ismpc::tails
