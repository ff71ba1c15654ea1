#include "ismpc/lip.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ismpc::lip {

LipParams::LipParams(double gravity, double com_height, double sample_time)
    : gravity_(gravity), com_height_(com_height), sample_time_(sample_time) {
  if (!(gravity > 0.0) || !(com_height > 0.0) || !(sample_time > 0.0) || !std::isfinite(gravity) ||
      !std::isfinite(com_height) || !std::isfinite(sample_time)) {
    throw std::invalid_argument("LipParams: gravity, com_height and sample_time must be positive");
  }
  eta_ = std::sqrt(gravity_ / com_height_);
}

DecomposedState decompose(const LipAxisState& state, const LipParams& params) {
  const double eta = params.eta();
  return {state.com_pos - state.com_vel / eta, state.com_pos + state.com_vel / eta, state.zmp_pos};
}

LipAxisState recompose(const DecomposedState& d, const LipParams& params) {
  return {0.5 * (d.stable + d.unstable), 0.5 * params.eta() * (d.unstable - d.stable), d.zmp_pos};
}

LipAxisState propagate(const LipAxisState& state, double zmp_vel, double tau,
                       const LipParams& params) {
  // e = x_c - x_z obeys e'' = eta^2 e because the ZMP is linear in time.
  const double eta = params.eta();
  const double ch = std::cosh(eta * tau);
  const double sh = std::sinh(eta * tau);
  const double e0 = state.com_pos - state.zmp_pos;
  const double de0 = state.com_vel - zmp_vel;
  const double e = e0 * ch + de0 * sh / eta;
  const double de = e0 * eta * sh + de0 * ch;
  const double zmp = state.zmp_pos + zmp_vel * tau;
  return {zmp + e, zmp_vel + de, zmp};
}

LipAxisState step_exact(const LipAxisState& state, double zmp_vel, const LipParams& params) {
  return propagate(state, zmp_vel, params.sample_time(), params);
}

double propagate_unstable(double unstable, const ZmpSegment& segment, const LipParams& params) {
  const double eta = params.eta();
  const double delta = params.sample_time();
  const double growth = std::exp(eta * delta);
  return growth * unstable - (growth - 1.0) * segment.start +
         segment.slope * (delta - (growth - 1.0) / eta);
}

VelocitySequence VelocitySequence::Finite(std::vector<double> prefix) {
  return {std::move(prefix), SuffixKind::Zero, {}};
}

VelocitySequence VelocitySequence::Constant(double velocity) {
  return {{}, SuffixKind::Periodic, {velocity}};
}

VelocitySequence VelocitySequence::Repeating(std::vector<double> prefix, std::vector<double> cycle) {
  return {std::move(prefix), SuffixKind::Periodic, std::move(cycle)};
}

double VelocitySequence::at(std::size_t i) const {
  if (i < prefix.size()) return prefix[i];
  if (suffix == SuffixKind::Zero || cycle.empty()) return 0.0;
  return cycle[(i - prefix.size()) % cycle.size()];
}

VelocitySequence VelocitySequence::shifted() const {
  VelocitySequence out = *this;
  if (!out.prefix.empty()) {
    out.prefix.erase(out.prefix.begin());
  } else if (out.suffix == SuffixKind::Periodic && !out.cycle.empty()) {
    out.cycle.push_back(out.cycle.front());
    out.cycle.erase(out.cycle.begin());
  }
  return out;
}

void VelocitySequence::validate() const {
  for (double v : prefix) {
    if (!std::isfinite(v)) throw std::invalid_argument("VelocitySequence: non-finite prefix sample");
  }
  if (suffix == SuffixKind::Periodic) {
    if (cycle.empty()) throw std::invalid_argument("VelocitySequence: periodic suffix with empty cycle");
    for (double v : cycle) {
      if (!std::isfinite(v)) throw std::invalid_argument("VelocitySequence: non-finite cycle sample");
    }
  }
}

double discounted_sum(const VelocitySequence& seq, const LipParams& params) {
  seq.validate();
  const double w = std::exp(-params.eta() * params.sample_time());
  double sum = 0.0;
  double weight = 1.0;
  for (double v : seq.prefix) {
    sum += weight * v;
    weight *= w;
  }
  if (seq.suffix == SuffixKind::Periodic) {
    // Each repetition of the cycle is the previous one discounted by w^m.
    double cycle_sum = 0.0;
    double cw = 1.0;
    for (double v : seq.cycle) {
      cycle_sum += cw * v;
      cw *= w;
    }
    sum += weight * cycle_sum / (1.0 - cw);
  }
  return sum;
}

double stable_initialization(const VelocitySequence& seq, double zmp_start, const LipParams& params) {
  const double eta = params.eta();
  const double w = std::exp(-eta * params.sample_time());
  return zmp_start + (1.0 - w) / eta * discounted_sum(seq, params);
}

}  // namespace ismpc::lip
