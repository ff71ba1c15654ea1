#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ismpc::footstep {

enum class Side { Left, Right };

inline Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }
/// +1 for the left foot, -1 for the right one.
inline double sign(Side s) { return s == Side::Left ? 1.0 : -1.0; }

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
};

Eigen::Matrix2d rotation(double theta);

struct ReferenceVelocity {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  double magnitude() const;
};

/// Piecewise-constant reference velocity. Each knot holds from its start
/// time until the next one; before the first knot the velocity is zero.
class ReferenceSchedule {
 public:
  struct Knot {
    double time;
    ReferenceVelocity velocity;
  };

  ReferenceSchedule() = default;
  /// Throws std::invalid_argument unless knot times are strictly increasing
  /// and all values are finite.
  explicit ReferenceSchedule(std::vector<Knot> knots);

  static ReferenceSchedule Constant(ReferenceVelocity v) { return ReferenceSchedule({{0.0, v}}); }

  ReferenceVelocity at(double t) const;
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
};

struct CruiseParams {
  double v_bar = 0.15;
  double ts_bar = 0.8;
  double ls_bar = 0.12;
  double alpha = 0.1;

  /// Throws std::invalid_argument unless v_bar = ls_bar / ts_bar and alpha > 0.
  void validate() const;
};

struct KinematicLimits {
  double theta_max = 3.14159265358979323846 / 8.0;
  double ell = 0.18;
  double da_x = 0.3;
  double da_y = 0.07;

  void validate() const;
};

struct Footstep {
  Pose2 pose;
  Side side = Side::Right;
  /// Start of the single support phase on this foot.
  double timestamp = 0.0;
};

/// Footstep sequence with timing. Step j is the support foot from
/// steps[j].timestamp for a single-support fraction of the interval up to
/// steps[j+1].timestamp; the remainder is double support moving toward j+1.
/// The last step is held forever.
struct FootstepPlan {
  std::vector<Footstep> steps;
  double ss_fraction = 0.8;
  /// Pose of the other foot while standing before steps[0].timestamp.
  std::optional<Pose2> initial_partner;

  /// Throws std::invalid_argument on non-alternating sides, non-increasing
  /// timestamps or an out-of-range single-support fraction.
  void validate() const;
  double duration(std::size_t j) const;
  /// Instant at which foot j touches down (end of the previous single support).
  double landing_time(std::size_t j) const;
};

class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Step duration from the reference speed through the cruise parameters.
double step_duration(double v, const CruiseParams& cruise);

/// Timestamps t^1, t^2, ... following `last_step_time`, each spaced by the
/// duration at the start of the previous step, up to and including
/// `preview_end`. The first timestamp past `preview_end` is discarded.
std::vector<double> generate_timing(const ReferenceSchedule& ref, double last_step_time,
                                    double preview_end, const CruiseParams& cruise);

/// Exact integration of the omnidirectional template model over [t0, t1].
Pose2 integrate_template(const ReferenceSchedule& ref, const Pose2& initial, double t0, double t1);

/// Integral of the reference angular velocity over [t0, t1].
double integrate_omega(const ReferenceSchedule& ref, double t0, double t1);

/// Orientations theta^1..theta^F closest to the integrated steering with the
/// per-step rotation bounded by theta_max.
std::vector<double> solve_orientation_qp(const std::vector<double>& omega_integrals, double theta0,
                                         const KinematicLimits& limits);

/// Positions f^1..f^F tracking the displacement targets under the
/// kinematic boxes. `start_side` is the side of the support foot f^0.
/// Throws PlanningError when the boxes cannot be met.
std::vector<Eigen::Vector2d> solve_placement_qp(const std::vector<Eigen::Vector2d>& deltas,
                                                const Eigen::Vector2d& start_foot, double theta0,
                                                const std::vector<double>& orientations, Side start_side,
                                                const KinematicLimits& limits);

/// True iff f^j lies in the kinematic box of f^{j-1} within `tol`.
bool kinematically_admissible(const Pose2& previous, Side previous_side, const Eigen::Vector2d& next,
                              const KinematicLimits& limits, double tol = 1e-8);

struct CandidateRequest {
  ReferenceSchedule reference;
  /// Current support foot; its timestamp is t^0.
  Footstep support;
  double preview_end = 0.0;
  CruiseParams cruise;
  KinematicLimits limits;
};

/// Candidate footsteps 1..F (excluding the support foot) with timing,
/// orientations and positions. The template robot starts midway between the
/// feet: the support foot shifted by ell/2 toward the swing side.
std::vector<Footstep> generate_candidates(const CandidateRequest& request);

}  // namespace ismpc::footstep
