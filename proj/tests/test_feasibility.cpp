#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ismpc/feasibility.hpp"
#include "ismpc/schedule.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace ismpc;
using feasibility::PiecewiseLinear;

namespace {

PiecewiseLinear random_pwl(oracle::Rng& rng) {
  PiecewiseLinear f;
  double t = rng.uniform(0.0, 0.3);
  const int n = rng.integer(1, 6);
  for (int i = 0; i < n; ++i) {
    f.knots.push_back(t);
    f.values.push_back(rng.uniform(-0.2, 0.2));
    t += rng.uniform(0.01, 0.5);
  }
  return f;
}

// Simpson on each knot interval so kinks sit on panel edges.
double quad(const PiecewiseLinear& f, double a, double b, double eta) {
  std::vector<double> cuts = {a};
  for (double k : f.knots) {
    if (k > a && k < b) cuts.push_back(k);
  }
  cuts.push_back(b);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    acc += oracle::simpson([&](double t) { return eta * std::exp(-eta * t) * f.at(t); }, cuts[i], cuts[i + 1], 20000);
  }
  return acc;
}

}  // namespace

TEST_CASE("piecewise linear evaluation") {
  const PiecewiseLinear f{{0.0, 1.0}, {0.0, 2.0}};
  CHECK(f.at(-1.0) == 0.0);
  CHECK(f.at(0.5) == doctest::Approx(1.0));
  CHECK(f.at(3.0) == 2.0);
  CHECK_THROWS(PiecewiseLinear{{0.0, 0.0}, {1.0, 2.0}}.validate());
  CHECK_THROWS(PiecewiseLinear{{0.0}, {1.0, 2.0}}.validate());
}

TEST_CASE("weighted integral against quadrature") {
  oracle::Rng rng(31);
  for (int n = 0; n < 100; ++n) {
    const auto f = random_pwl(rng);
    const double eta = rng.uniform(2.0, 6.0);
    const double a = rng.uniform(0.0, 1.0);
    const double b = a + rng.uniform(0.0, 2.0);
    CHECK(std::abs(feasibility::weighted_integral(f, a, b, eta) - quad(f, a, b, eta)) < 1e-10);
    const double tail = quad(f, a, 40.0 / eta + 3.0, eta);
    CHECK(std::abs(feasibility::weighted_integral(f, a, INFINITY, eta) - tail) < 1e-10);
  }
}

TEST_CASE("interval width for constant bounds") {
  const lip::LipParams p(9.81, 9.81 / (3.5464 * 3.5464), 0.01);
  feasibility::ZmpBoundProfile b{PiecewiseLinear::Constant(-0.02), PiecewiseLinear::Constant(0.02)};
  const auto iv = feasibility::feasibility_interval(b, PiecewiseLinear::Constant(0.0), p, 0.5);
  CHECK(iv.width() == doctest::Approx(0.033209).epsilon(3e-5));
  CHECK(std::abs(iv.width() - 0.04 * (1.0 - std::exp(-3.5464 * 0.5))) < 1e-9);
  CHECK(iv.lower == doctest::Approx(-iv.upper));

  oracle::Rng rng(32);
  for (int n = 0; n < 50; ++n) {
    const lip::LipParams q(9.81, rng.uniform(0.2, 2.0), 0.01);
    const double d = rng.uniform(0.005, 0.2);
    const double tc = rng.uniform(0.1, 2.0);
    const double c = rng.uniform(-1, 1);
    feasibility::ZmpBoundProfile bb{PiecewiseLinear::Constant(c - d / 2), PiecewiseLinear::Constant(c + d / 2)};
    const auto w = feasibility::feasibility_interval(bb, PiecewiseLinear::Constant(c + rng.uniform(-1, 1)), q, tc);
    CHECK(std::abs(w.width() - d * (1.0 - std::exp(-q.eta() * tc))) < 1e-9);
  }
}

TEST_CASE("witness trajectory is admissible and stable") {
  oracle::Rng rng(33);
  const auto p = lip::LipParams::Default();
  for (int n = 0; n < 50; ++n) {
    const double tc = rng.uniform(0.3, 1.5);
    auto lo = random_pwl(rng);
    auto hi = lo;
    for (auto& v : hi.values) v += rng.uniform(0.01, 0.05);
    const auto tail = random_pwl(rng);
    const feasibility::ZmpBoundProfile b{lo, hi};
    const auto iv = feasibility::feasibility_interval(b, tail, p, tc);
    const double xu = iv.lower + rng.uniform(0.0, 1.0) * iv.width();
    const auto wt = feasibility::witness_trajectory(xu, b, iv, p, tc);
    // inside the bounds on a fine grid
    for (int i = 0; i <= 400; ++i) {
      const double t = tc * i / 400.0;
      CHECK(wt.at(t) >= lo.at(t) - 1e-12);
      CHECK(wt.at(t) <= hi.at(t) + 1e-12);
    }
    // stability condition: weighted witness over [0, tc] plus the tail
    const double lhs = quad(wt, 0.0, tc, p.eta()) + quad(tail, tc, 40.0 / p.eta() + 3.0, p.eta());
    CHECK(std::abs(lhs - xu) < 1e-9);
    CHECK(feasibility::feasibility_margin(xu, iv) >= 0.0);
    CHECK_THROWS(feasibility::witness_trajectory(iv.upper + 1e-3, b, iv, p, tc));
  }
}

TEST_CASE("recursive feasibility preview bound") {
  CHECK(feasibility::recursive_feasibility_preview_bound(3.5464, 0.8, 1.0, 0.04) ==
        doctest::Approx(0.8 + std::log(2.0 / (3.5464 * 0.04)) / 3.5464).epsilon(1e-12));
  CHECK(feasibility::recursive_feasibility_preview_bound(3.5464, 0.8, 1.0, 0.04) == doctest::Approx(1.546).epsilon(1e-3));
  // the logarithm goes negative for slow tails: never below tc
  CHECK(feasibility::recursive_feasibility_preview_bound(3.5464, 0.8, 0.01, 0.04) == 0.8);
  // grows with eta and v_max, shrinks with dz
  const double base = feasibility::recursive_feasibility_preview_bound(3.0, 0.5, 1.0, 0.04);
  CHECK(feasibility::recursive_feasibility_preview_bound(3.0, 0.5, 2.0, 0.04) > base);
  CHECK(feasibility::recursive_feasibility_preview_bound(3.0, 0.5, 1.0, 0.08) < base);
}

TEST_CASE("max ZMP speed of a regular plan") {
  const auto plan = schedule::regular_plan(10, 0.1, 0.18, 0.5, 0.5, 0.8);
  CHECK(feasibility::plan_max_zmp_speed(plan) == doctest::Approx(1.8));
}

TEST_CASE("sampled interval against extreme ZMP trajectories") {
  // The QP's row is monotone in every z_i, so pushing all samples to their
  // upper (lower) bound yields the largest (smallest) admissible x_u.
  oracle::Rng rng(34);
  const auto p = lip::LipParams::Default();
  for (auto kind : {tails::TailKind::Truncated, tails::TailKind::Periodic}) {
    for (int n = 0; n < 30; ++n) {
      const std::size_t c = static_cast<std::size_t>(rng.integer(10, 120));
      const tails::Tail tail = kind == tails::TailKind::Periodic ? tails::Tail::Periodic(c) : tails::Tail::Truncated();
      const auto row = tails::build_stability_row(tail, p, c);
      std::vector<double> lo(c), hi(c);
      for (std::size_t i = 0; i < c; ++i) {
        lo[i] = rng.uniform(-0.1, 0.1);
        hi[i] = lo[i] + rng.uniform(0.0, 0.05);
      }
      const double z0 = rng.uniform(-0.1, 0.1);
      auto extreme = [&](const std::vector<double>& z) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(c));
        double prev = z0;
        for (std::size_t i = 0; i < c; ++i) {
          v[i] = (z[i] - prev) / p.sample_time();
          prev = z[i];
        }
        return z0 + (row.coeffs.dot(v) - row.offset) / row.state_gain;
      };
      const auto iv = feasibility::sampled_interval(lo, hi, z0, row, p);
      CHECK(std::abs(iv.lower - extreme(lo)) < 1e-10);
      CHECK(std::abs(iv.upper - extreme(hi)) < 1e-10);
    }
  }
}

TEST_CASE("tracked intervals while standing") {
  footstep::FootstepPlan plan;
  plan.steps = {{{0.0, 0.0, 0.0}, footstep::Side::Right, 0.0}};
  const auto p = lip::LipParams::Default();
  const auto iv = feasibility::track_regions(plan, tails::TailKind::Truncated, p, 50, 50, {0.04, 0.04}, 5);
  REQUIRE(iv.size() == 5);
  for (const auto& a : iv) {
    CHECK(std::abs(a.x.width() - 0.04 * (1.0 - std::exp(-p.eta() * 0.5))) < 1e-9);
    CHECK(a.x.lower < 0.0);
    CHECK(a.x.upper > 0.0);
    CHECK_FALSE(a.approximate);
  }
  CHECK_THROWS(feasibility::track_regions(plan, tails::TailKind::Periodic, p, 50, 50, {0.04, 0.04}, 5));
}
