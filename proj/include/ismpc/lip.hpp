#pragma once

#include <cstddef>
#include <vector>

namespace ismpc::lip {

/// Parameters of the linear inverted pendulum. The natural frequency is
/// always derived from gravity and CoM height.
class LipParams {
 public:
  LipParams(double gravity, double com_height, double sample_time);

  /// HRP-4-like defaults: g = 9.81, h_c = 0.78, delta = 0.01.
  static LipParams Default() { return LipParams(9.81, 0.78, 0.01); }

  double gravity() const { return gravity_; }
  double com_height() const { return com_height_; }
  double sample_time() const { return sample_time_; }
  double eta() const { return eta_; }

 private:
  double gravity_;
  double com_height_;
  double sample_time_;
  double eta_;
};

/// Per-axis state of the LIP with dynamic extension: CoM position and
/// velocity plus ZMP position.
struct LipAxisState {
  double com_pos = 0.0;
  double com_vel = 0.0;
  double zmp_pos = 0.0;

  bool operator==(const LipAxisState&) const = default;
};

struct PlanarState {
  LipAxisState x_axis;
  LipAxisState y_axis;
  double time = 0.0;
};

/// State in stable/unstable coordinates. `unstable` is the divergent
/// component of motion (capture point).
struct DecomposedState {
  double stable = 0.0;
  double unstable = 0.0;
  double zmp_pos = 0.0;
};

DecomposedState decompose(const LipAxisState& state, const LipParams& params);
LipAxisState recompose(const DecomposedState& d, const LipParams& params);

/// Exact one-sample propagation under a constant ZMP velocity.
LipAxisState step_exact(const LipAxisState& state, double zmp_vel, const LipParams& params);

/// Exact propagation over an arbitrary duration `tau` under a constant ZMP
/// velocity; `step_exact` is the special case tau = sample_time.
LipAxisState propagate(const LipAxisState& state, double zmp_vel, double tau,
                       const LipParams& params);

/// Linear ZMP segment x_z(t_k + s) = start + slope * s over one sample.
struct ZmpSegment {
  double start = 0.0;
  double slope = 0.0;
};

/// Advances the unstable coordinate across one sample interval in closed form.
double propagate_unstable(double unstable, const ZmpSegment& segment, const LipParams& params);

enum class SuffixKind { Zero, Periodic };

/// An unbounded sequence of per-sample ZMP velocities: a finite prefix
/// followed either by zeros or by infinite repetition of `cycle`.
struct VelocitySequence {
  std::vector<double> prefix;
  SuffixKind suffix = SuffixKind::Zero;
  std::vector<double> cycle;

  static VelocitySequence Finite(std::vector<double> prefix);
  static VelocitySequence Constant(double velocity);
  static VelocitySequence Repeating(std::vector<double> prefix, std::vector<double> cycle);

  /// Velocity at sample `i` (0-based).
  double at(std::size_t i) const;
  /// The same sequence advanced by one sample.
  VelocitySequence shifted() const;
  /// Throws std::invalid_argument if the descriptor is not finitely summable.
  void validate() const;
};

/// Closed-form weighted sum sum_i e^{-i eta delta} v_i over the whole sequence.
double discounted_sum(const VelocitySequence& seq, const LipParams& params);

/// Value of the unstable coordinate that keeps the CoM bounded with respect
/// to the piecewise-linear ZMP generated by `seq` from `zmp_start`.
double stable_initialization(const VelocitySequence& seq, double zmp_start, const LipParams& params);

}  // namespace ismpc::lip
