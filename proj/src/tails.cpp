#include "ismpc/tails.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ismpc::tails {

namespace {

double decay(const lip::LipParams& params) { return std::exp(-params.eta() * params.sample_time()); }

void check_preview(const Tail& tail) {
  for (double v : tail.preview) {
    if (!std::isfinite(v)) throw std::invalid_argument("Tail: non-finite preview sample");
  }
}

}  // namespace

std::string to_string(TailKind kind) {
  switch (kind) {
    case TailKind::Truncated: return "truncated";
    case TailKind::Periodic: return "periodic";
    case TailKind::Anticipative: return "anticipative";
  }
  return "unknown";
}

double anticipative_tail_sum(const Tail& tail, const lip::LipParams& params, std::size_t horizon) {
  switch (tail.kind) {
    case TailKind::Truncated: return 0.0;
    case TailKind::Periodic:
      throw std::invalid_argument("anticipative_tail_sum: periodic tail depends on the controlled samples");
    case TailKind::Anticipative: break;
  }
  check_preview(tail);
  const double w = decay(params);
  double weight = std::pow(w, static_cast<double>(horizon));
  double sum = 0.0;
  for (double v : tail.preview) {
    sum += weight * v;
    weight *= w;
  }
  if (tail.residual == Residual::Periodic && !tail.preview.empty()) {
    // Later copies of the preview are scaled by w^{P-C} each.
    const double rep = std::pow(w, static_cast<double>(tail.preview.size()));
    sum += sum * rep / (1.0 - rep);
  }
  return sum;
}

StabilityRow build_stability_row(const Tail& tail, const lip::LipParams& params, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("build_stability_row: empty control horizon");
  const double eta = params.eta();
  const double w = decay(params);
  StabilityRow row;
  row.coeffs.resize(static_cast<Eigen::Index>(horizon));
  double weight = 1.0;
  for (std::size_t i = 0; i < horizon; ++i) {
    row.coeffs[static_cast<Eigen::Index>(i)] = weight;
    weight *= w;
  }
  const double gain = eta / (1.0 - w);
  switch (tail.kind) {
    case TailKind::Truncated:
      row.state_gain = gain;
      break;
    case TailKind::Periodic:
      if (tail.period_samples != horizon) {
        throw std::invalid_argument("build_stability_row: periodic tail needs period equal to the control horizon");
      }
      // The tail adds w^C / (1 - w^C) times the controlled sum.
      row.state_gain = gain * (1.0 - std::pow(w, static_cast<double>(horizon)));
      break;
    case TailKind::Anticipative:
      row.state_gain = gain;
      row.offset = -anticipative_tail_sum(tail, params, horizon);
      break;
  }
  return row;
}

double terminal_constraint_value(const Tail& tail, const lip::LipParams& params, std::size_t horizon,
                                 double zmp_at_c, double current_offset) {
  switch (tail.kind) {
    case TailKind::Truncated: return zmp_at_c;
    case TailKind::Periodic:
      if (tail.period_samples != horizon) {
        throw std::invalid_argument("terminal_constraint_value: periodic tail needs period equal to the control horizon");
      }
      return zmp_at_c + current_offset;
    case TailKind::Anticipative: {
      const double eta = params.eta();
      const double w = decay(params);
      const double rescale = std::exp(eta * params.sample_time() * static_cast<double>(horizon));
      return zmp_at_c + (1.0 - w) / eta * rescale * anticipative_tail_sum(tail, params, horizon);
    }
  }
  return zmp_at_c;
}

AffineRow unstable_at_horizon(const lip::DecomposedState& current, const lip::LipParams& params,
                              std::size_t horizon) {
  const double eta = params.eta();
  const double delta = params.sample_time();
  const double growth = std::exp(eta * delta);
  const double ramp = delta - (growth - 1.0) / eta;
  const auto c = static_cast<Eigen::Index>(horizon);
  AffineRow xu{Eigen::VectorXd::Zero(c), current.unstable};
  AffineRow z{Eigen::VectorXd::Zero(c), current.zmp_pos};
  for (Eigen::Index i = 0; i < c; ++i) {
    xu.coeffs = growth * xu.coeffs - (growth - 1.0) * z.coeffs;
    xu.constant = growth * xu.constant - (growth - 1.0) * z.constant;
    xu.coeffs[i] += ramp;
    z.coeffs[i] += delta;
  }
  return xu;
}

AffineRow terminal_row(const Tail& tail, const lip::LipParams& params, std::size_t horizon,
                       const lip::DecomposedState& current) {
  // x_u^C - x_z^C = target, where x_z^C = z0 + delta * sum(v).
  const AffineRow xu = unstable_at_horizon(current, params, horizon);
  const double target = terminal_constraint_value(tail, params, horizon, 0.0,
                                                  current.unstable - current.zmp_pos);
  AffineRow row;
  row.coeffs = xu.coeffs.array() - params.sample_time();
  row.constant = target + current.zmp_pos - xu.constant;
  return row;
}

std::vector<double> differentiate_samples(const std::vector<double>& centers, double delta) {
  if (centers.size() < 2) return {};
  std::vector<double> out(centers.size() - 1);
  for (std::size_t i = 0; i + 1 < centers.size(); ++i) out[i] = (centers[i + 1] - centers[i]) / delta;
  return out;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (b <= a) return 0.0;
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

std::vector<PropertyCheck> verify_exponential_weighting_properties(const lip::LipParams& params, double tol) {
  const double eta = params.eta();
  const double end = 20.0 / eta;
  const double shift = 0.5;
  auto integrand = [&](const std::function<double(double)>& xz) {
    return [&, xz](double t) { return eta * std::exp(-eta * t) * xz(t); };
  };
  // Inputs are given separately before and after the shift so that a jump
  // at the shift never lands inside one Simpson panel.
  auto weighted2 = [&](const std::function<double(double)>& before, const std::function<double(double)>& after) {
    return simpson(integrand(before), 0.0, shift, 20000) + simpson(integrand(after), shift, end, 200000);
  };
  auto weighted = [&](const std::function<double(double)>& xz) { return weighted2(xz, xz); };
  auto zero = [](double) { return 0.0; };
  auto step = [](double) { return 1.0; };
  auto ramp = [](double t) { return t; };
  auto delayed_ramp = [&](double t) { return t - shift; };
  const double a = 0.3;
  const double b = -1.7;
  auto combo = [&](double t) { return a * step(t) + b * ramp(t); };

  const double i_step = weighted(step);
  const double i_ramp = weighted(ramp);
  std::vector<PropertyCheck> out;
  auto add = [&](std::string name, double computed, double expected) {
    out.push_back({std::move(name), computed, expected, std::abs(computed - expected) <= tol});
  };
  add("linearity (0.3 step - 1.7 ramp)", weighted(combo), a * i_step + b * i_ramp);
  add("unit step", i_step, 1.0);
  add("unit ramp", i_ramp, 1.0 / eta);
  add("step delayed by 0.5 s", weighted2(zero, step), std::exp(-eta * shift));
  add("ramp delayed by 0.5 s", weighted2(zero, delayed_ramp), std::exp(-eta * shift) / eta);
  return out;
}

}  // namespace ismpc::tails
