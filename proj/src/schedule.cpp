#include "ismpc/schedule.hpp"

#include "ismpc/tails.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ismpc::schedule {

namespace {
constexpr double kSlack = 1e-9;
}

std::string_view to_string(SupportPhase phase) {
  switch (phase) {
    case SupportPhase::InitialDouble: return "initial_double";
    case SupportPhase::Single: return "single";
    case SupportPhase::Double: return "double";
  }
  return "unknown";
}

PhaseInfo phase_at(const footstep::FootstepPlan& plan, double t) {
  if (plan.steps.empty()) throw std::invalid_argument("phase_at: empty footstep plan");
  const auto& steps = plan.steps;
  if (t + kSlack < steps.front().timestamp) {
    return {plan.initial_partner ? SupportPhase::InitialDouble : SupportPhase::Single, 0, 0.0};
  }
  // Last step whose single support has started.
  std::size_t j = 0;
  while (j + 1 < steps.size() && steps[j + 1].timestamp <= t + kSlack) ++j;
  if (j + 1 == steps.size()) return {SupportPhase::Single, j, 0.0};
  const double duration = plan.duration(j);
  const double ss = plan.ss_fraction * duration;
  const double s = t - steps[j].timestamp;
  if (s < ss - kSlack) return {SupportPhase::Single, j, 0.0};
  const double ds = duration - ss;
  const double sigma = ds > 0.0 ? std::clamp((s - ss) / ds, 0.0, 1.0) : 1.0;
  return {SupportPhase::Double, j, sigma};
}

Eigen::Vector2d Region::center(const footstep::FootstepPlan& plan) const {
  Eigen::Vector2d c = offset;
  for (const auto& [j, w] : weights) c += w * plan.steps.at(j).pose.position();
  return c;
}

Region region_at(const footstep::FootstepPlan& plan, double t, const Eigen::Vector2d& zmp_dims) {
  const PhaseInfo ph = phase_at(plan, t);
  const auto& steps = plan.steps;
  Region r;
  r.half_dims = zmp_dims / 2.0;
  switch (ph.phase) {
    case SupportPhase::Single:
      r.weights = {{ph.step, 1.0}};
      r.theta = steps[ph.step].pose.theta;
      break;
    case SupportPhase::Double: {
      const auto& a = steps[ph.step].pose;
      const auto& b = steps[ph.step + 1].pose;
      r.weights = {{ph.step, 1.0 - ph.sigma}, {ph.step + 1, ph.sigma}};
      r.theta = (1.0 - ph.sigma) * a.theta + ph.sigma * b.theta;
      break;
    }
    case SupportPhase::InitialDouble: {
      // Bounding box of both foot rectangles in the frame of the first support.
      const auto& s = steps.front().pose;
      const Eigen::Vector2d rel =
          footstep::rotation(s.theta).transpose() * (plan.initial_partner->position() - s.position());
      const Eigen::Vector2d h = zmp_dims / 2.0;
      const Eigen::Vector2d lo = (-h).cwiseMin(rel - h);
      const Eigen::Vector2d hi = h.cwiseMax(rel + h);
      r.weights = {{0, 1.0}};
      r.offset = footstep::rotation(s.theta) * (0.5 * (lo + hi));
      r.theta = s.theta;
      r.half_dims = 0.5 * (hi - lo);
      break;
    }
  }
  return r;
}

std::vector<Region> region_schedule(const footstep::FootstepPlan& plan, double t_k, double delta,
                                    std::size_t count, const Eigen::Vector2d& zmp_dims) {
  std::vector<Region> out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    out.push_back(region_at(plan, t_k + static_cast<double>(i) * delta, zmp_dims));
  }
  return out;
}

std::vector<Eigen::Vector2d> centered_zmp(const footstep::FootstepPlan& plan, double t_k, double delta,
                                          std::size_t first, std::size_t last) {
  std::vector<Eigen::Vector2d> out;
  for (std::size_t i = first; i <= last; ++i) {
    const double t = t_k + static_cast<double>(i) * delta;
    out.push_back(region_at(plan, t, Eigen::Vector2d::Zero()).center(plan));
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> anticipative_preview(const footstep::FootstepPlan& plan,
                                                                         double t_k, double delta,
                                                                         std::size_t control,
                                                                         std::size_t preview) {
  if (preview < control) throw std::invalid_argument("anticipative_preview: preview shorter than control horizon");
  if (preview == control) return {};
  const auto centers = centered_zmp(plan, t_k, delta, control, preview);
  std::vector<double> cx(centers.size());
  std::vector<double> cy(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    cx[i] = centers[i].x();
    cy[i] = centers[i].y();
  }
  return {tails::differentiate_samples(cx, delta), tails::differentiate_samples(cy, delta)};
}

footstep::FootstepPlan regular_plan(std::size_t num_steps, double step_length, double lateral,
                                    double first_time, double step_time, double ss_fraction) {
  footstep::FootstepPlan plan;
  plan.ss_fraction = ss_fraction;
  plan.initial_partner = footstep::Pose2{0.0, lateral / 2.0, 0.0};
  footstep::Side side = footstep::Side::Right;
  for (std::size_t j = 0; j < num_steps; ++j) {
    const double x = static_cast<double>(j) * step_length;
    plan.steps.push_back({{x, footstep::sign(side) * lateral / 2.0, 0.0}, side,
                          first_time + static_cast<double>(j) * step_time});
    side = footstep::opposite(side);
  }
  return plan;
}

}  // namespace ismpc::schedule
