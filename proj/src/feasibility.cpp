#include "ismpc/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ismpc::feasibility {

void PiecewiseLinear::validate() const {
  if (knots.empty() || knots.size() != values.size()) {
    throw std::invalid_argument("PiecewiseLinear: knots and values must be non-empty and of equal size");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1])) throw std::invalid_argument("PiecewiseLinear: knots must increase");
  }
}

double PiecewiseLinear::at(double t) const {
  if (t <= knots.front()) return values.front();
  if (t >= knots.back()) return values.back();
  const auto it = std::upper_bound(knots.begin(), knots.end(), t);
  const auto i = static_cast<std::size_t>(it - knots.begin());
  const double s = (t - knots[i - 1]) / (knots[i] - knots[i - 1]);
  return values[i - 1] + s * (values[i] - values[i - 1]);
}

double weighted_integral(const PiecewiseLinear& f, double a, double b, double eta) {
  f.validate();
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double k : f.knots) {
    if (k > a && k < b) cuts.push_back(k);
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double fa = f.at(lo);
    const double ea = std::exp(-eta * lo);
    if (std::isinf(hi)) {
      total += fa * ea;
      continue;
    }
    const double eb = std::exp(-eta * hi);
    const double slope = (f.at(hi) - fa) / (hi - lo);
    total += fa * (ea - eb) + slope * ((ea - eb) / eta - (hi - lo) * eb);
  }
  return total;
}

FeasibilityInterval feasibility_interval(const ZmpBoundProfile& bounds, const PiecewiseLinear& tail,
                                         const lip::LipParams& params, double tc, double time) {
  const double eta = params.eta();
  const double inf = std::numeric_limits<double>::infinity();
  const double tail_part = weighted_integral(tail, tc, inf, eta);
  return {weighted_integral(bounds.lower, 0.0, tc, eta) + tail_part,
          weighted_integral(bounds.upper, 0.0, tc, eta) + tail_part, time};
}

double feasibility_margin(double unstable, const FeasibilityInterval& interval) {
  return std::min(unstable - interval.lower, interval.upper - unstable);
}

PiecewiseLinear witness_trajectory(double unstable, const ZmpBoundProfile& bounds,
                                   const FeasibilityInterval& interval, const lip::LipParams& /*params*/,
                                   double /*tc*/) {
  if (feasibility_margin(unstable, interval) < 0.0) {
    throw std::invalid_argument("witness_trajectory: state outside the feasibility interval");
  }
  // The weighted integral is affine in the blend, so the blend that hits
  // x_u stays between the bounds. With constant width this is the upper
  // bound shifted down.
  const double lambda = interval.width() > 0.0 ? (unstable - interval.lower) / interval.width() : 1.0;
  std::vector<double> knots = bounds.lower.knots;
  knots.insert(knots.end(), bounds.upper.knots.begin(), bounds.upper.knots.end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  PiecewiseLinear out;
  out.knots = knots;
  for (double t : knots) out.values.push_back(lambda * bounds.upper.at(t) + (1.0 - lambda) * bounds.lower.at(t));
  return out;
}

double recursive_feasibility_preview_bound(double eta, double tc, double v_max, double dz) {
  if (!(eta > 0.0) || !(v_max > 0.0) || !(dz > 0.0)) {
    throw std::invalid_argument("recursive_feasibility_preview_bound: eta, v_max and dz must be positive");
  }
  return tc + std::max(0.0, std::log(2.0 * v_max / (eta * dz)) / eta);
}

double plan_max_zmp_speed(const footstep::FootstepPlan& plan) {
  double v = 0.0;
  for (std::size_t j = 0; j + 1 < plan.steps.size(); ++j) {
    const double tds = (1.0 - plan.ss_fraction) * plan.duration(j);
    const Eigen::Vector2d d = (plan.steps[j + 1].pose.position() - plan.steps[j].pose.position()).cwiseAbs();
    if (tds > 0.0) v = std::max(v, d.maxCoeff() / tds);
  }
  return v;
}

FeasibilityInterval sampled_interval(const std::vector<double>& lower, const std::vector<double>& upper,
                                     double zmp_start, const tails::StabilityRow& row,
                                     const lip::LipParams& params, double time) {
  const std::size_t c = lower.size();
  if (c == 0 || upper.size() != c || static_cast<std::size_t>(row.coeffs.size()) != c) {
    throw std::invalid_argument("sampled_interval: bounds and row must cover the same horizon");
  }
  // sum_i coeffs_i v_i = (1/delta) (sum_{i=1}^{C} a_i z_i - z_0) with
  // a_i = coeffs_{i-1} - coeffs_i (coeffs_C = 0), all positive.
  double lmin = -zmp_start;
  double lmax = -zmp_start;
  for (std::size_t i = 0; i < c; ++i) {
    const double next = i + 1 < c ? row.coeffs[static_cast<Eigen::Index>(i + 1)] : 0.0;
    const double a = row.coeffs[static_cast<Eigen::Index>(i)] - next;
    lmin += a * lower[i];
    lmax += a * upper[i];
  }
  const double delta = params.sample_time();
  lmin /= delta;
  lmax /= delta;
  return {zmp_start + (lmin - row.offset) / row.state_gain, zmp_start + (lmax - row.offset) / row.state_gain,
          time};
}

void axis_bounds(const std::vector<schedule::Region>& regions, const footstep::FootstepPlan& plan, int axis,
                 std::vector<double>& lower, std::vector<double>& upper, bool& approximate) {
  lower.resize(regions.size());
  upper.resize(regions.size());
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto& r = regions[i];
    const double c = std::abs(std::cos(r.theta));
    const double s = std::abs(std::sin(r.theta));
    if (std::min(c, s) > 1e-12) approximate = true;
    const double h = axis == 0 ? c * r.half_dims.x() + s * r.half_dims.y() : s * r.half_dims.x() + c * r.half_dims.y();
    const double center = r.center(plan)[axis];
    lower[i] = center - h;
    upper[i] = center + h;
  }
}

std::vector<AxisIntervals> track_regions(const footstep::FootstepPlan& plan, tails::TailKind tail,
                                         const lip::LipParams& params, std::size_t control,
                                         std::size_t preview, const Eigen::Vector2d& zmp_dims,
                                         std::size_t count) {
  if (tail == tails::TailKind::Periodic) {
    throw std::invalid_argument("track_regions: the periodic tail has no fixed position profile");
  }
  const double delta = params.sample_time();
  const double tc = static_cast<double>(control) * delta;
  std::vector<AxisIntervals> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double tk = static_cast<double>(k) * delta;
    AxisIntervals ai;
    for (int axis = 0; axis < 2; ++axis) {
      ZmpBoundProfile bounds;
      for (std::size_t i = 0; i <= control; ++i) {
        const auto reg = schedule::region_at(plan, tk + static_cast<double>(i) * delta, zmp_dims);
        const double c = std::abs(std::cos(reg.theta));
        const double s = std::abs(std::sin(reg.theta));
        if (std::min(c, s) > 1e-12) ai.approximate = true;
        const double h = axis == 0 ? c * reg.half_dims.x() + s * reg.half_dims.y()
                                   : s * reg.half_dims.x() + c * reg.half_dims.y();
        const double center = reg.center(plan)[axis];
        const double t = static_cast<double>(i) * delta;
        bounds.lower.knots.push_back(t);
        bounds.lower.values.push_back(center - h);
        bounds.upper.knots.push_back(t);
        bounds.upper.values.push_back(center + h);
      }
      PiecewiseLinear tail_profile;
      const std::size_t last = tail == tails::TailKind::Anticipative ? std::max(preview, control) : control;
      const auto centers = schedule::centered_zmp(plan, tk, delta, control, last);
      for (std::size_t i = 0; i < centers.size(); ++i) {
        tail_profile.knots.push_back(static_cast<double>(control + i) * delta);
        tail_profile.values.push_back(centers[i][axis]);
      }
      const auto interval = feasibility_interval(bounds, tail_profile, params, tc, tk);
      (axis == 0 ? ai.x : ai.y) = interval;
    }
    out.push_back(ai);
  }
  return out;
}

}  // namespace ismpc::feasibility
