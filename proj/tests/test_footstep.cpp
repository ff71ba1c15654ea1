#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ismpc/footstep.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace ismpc::footstep;

namespace {

// Midpoint rule with tiny steps on the template, split at the knots so that
// the velocity is constant inside every step.
Pose2 euler_template(const ReferenceSchedule& ref, Pose2 p, double t0, double t1, int n = 20000) {
  std::vector<double> cuts = {t0};
  for (const auto& k : ref.knots()) {
    if (k.time > t0 && k.time < t1) cuts.push_back(k.time);
  }
  cuts.push_back(t1);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double h = (cuts[c + 1] - cuts[c]) / n;
    const auto v = ref.at(0.5 * (cuts[c] + cuts[c + 1]));
    for (int i = 0; i < n; ++i) {
      const double th = p.theta + 0.5 * v.omega * h;
      p.x += (v.vx * std::cos(th) - v.vy * std::sin(th)) * h;
      p.y += (v.vx * std::sin(th) + v.vy * std::cos(th)) * h;
      p.theta += v.omega * h;
    }
  }
  return p;
}

ReferenceSchedule random_schedule(oracle::Rng& rng) {
  std::vector<ReferenceSchedule::Knot> knots;
  double t = 0.0;
  const int n = rng.integer(1, 4);
  for (int i = 0; i < n; ++i) {
    knots.push_back({t, {rng.uniform(-0.3, 0.3), rng.uniform(-0.1, 0.1), rng.uniform(-0.5, 0.5)}});
    t += rng.uniform(0.3, 2.0);
  }
  return ReferenceSchedule(knots);
}

}  // namespace

TEST_CASE("timing rule reference values") {
  const CruiseParams c;
  CHECK(step_duration(0.15, c) == 0.8);
  CHECK(step_duration(0.30, c) == 0.5);
  CHECK(step_duration(0.0, c) == 2.0);
  // monotone decreasing in the speed
  double prev = step_duration(0.0, c);
  for (double v = 0.01; v < 1.0; v += 0.01) {
    const double d = step_duration(v, c);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("cruise and limits validation") {
  CHECK_NOTHROW(CruiseParams{}.validate());
  CHECK_THROWS(CruiseParams{0.2, 0.8, 0.12, 0.1}.validate());
  CHECK_THROWS(CruiseParams{0.15, 0.8, 0.12, 0.0}.validate());
  CHECK_NOTHROW(KinematicLimits{}.validate());
  CHECK_THROWS(KinematicLimits{-0.1, 0.18, 0.3, 0.07}.validate());
}

TEST_CASE("reference schedule") {
  const ReferenceSchedule s({{1.0, {0.1, 0, 0}}, {2.0, {0.3, 0, 0.2}}});
  CHECK(s.at(0.5).vx == 0.0);
  CHECK(s.at(1.0).vx == 0.1);
  CHECK(s.at(1.99).vx == 0.1);
  CHECK(s.at(5.0).omega == 0.2);
  CHECK_THROWS(ReferenceSchedule({{1.0, {}}, {1.0, {}}}));
  CHECK(ReferenceVelocity{0.3, 0.4, 1.0}.magnitude() == doctest::Approx(0.5));
}

TEST_CASE("timing generation") {
  const CruiseParams c;
  const auto ts = generate_timing(ReferenceSchedule::Constant({0.15, 0, 0}), 1.0, 4.2, c);
  REQUIRE(ts.size() == 4);
  for (std::size_t j = 0; j < ts.size(); ++j) CHECK(ts[j] == doctest::Approx(1.0 + 0.8 * (j + 1)));
  // duration taken from the speed at the start of each step
  const ReferenceSchedule change({{0.0, {0.15, 0, 0}}, {1.5, {0.3, 0, 0}}});
  const auto t2 = generate_timing(change, 0.0, 3.0, c);
  REQUIRE(t2.size() == 4);
  CHECK(t2[0] == doctest::Approx(0.8));
  CHECK(t2[1] == doctest::Approx(1.6));
  CHECK(t2[2] == doctest::Approx(2.1));
  CHECK(t2[3] == doctest::Approx(2.6));
  CHECK(generate_timing(change, 0.0, 0.5, c).empty());
}

TEST_CASE("template integration against Euler") {
  oracle::Rng rng(3);
  for (int n = 0; n < 20; ++n) {
    const auto ref = random_schedule(rng);
    const Pose2 start{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-3, 3)};
    const double t0 = rng.uniform(0.0, 1.0);
    const double t1 = t0 + rng.uniform(0.0, 4.0);
    const Pose2 a = integrate_template(ref, start, t0, t1);
    const Pose2 b = euler_template(ref, start, t0, t1);
    CHECK(std::abs(a.x - b.x) < 1e-6);
    CHECK(std::abs(a.y - b.y) < 1e-6);
    CHECK(std::abs(a.theta - b.theta) < 1e-9);
    CHECK(integrate_omega(ref, t0, t1) == doctest::Approx(b.theta - start.theta).epsilon(1e-9));
  }
  CHECK_THROWS(integrate_template(ReferenceSchedule{}, {}, 1.0, 0.0));
}

TEST_CASE("orientation QP") {
  const KinematicLimits lim;
  // within limits: follows the integrated steering exactly
  const auto a = solve_orientation_qp({0.1, 0.2, -0.1}, 0.5, lim);
  REQUIRE(a.size() == 3);
  CHECK(a[0] == doctest::Approx(0.6));
  CHECK(a[1] == doctest::Approx(0.8));
  CHECK(a[2] == doctest::Approx(0.7));
  // large steering is clipped step by step
  oracle::Rng rng(4);
  for (int n = 0; n < 50; ++n) {
    std::vector<double> om(static_cast<std::size_t>(rng.integer(1, 8)));
    for (auto& o : om) o = rng.uniform(-1.0, 1.0);
    const double th0 = rng.uniform(-3, 3);
    const auto th = solve_orientation_qp(om, th0, lim);
    double prev = th0;
    for (double t : th) {
      CHECK(std::abs(t - prev) <= lim.theta_max + 1e-9);
      prev = t;
    }
  }
}

TEST_CASE("placement QP") {
  const KinematicLimits lim;
  // straight walking with admissible deltas: exact tracking
  std::vector<Eigen::Vector2d> deltas = {{0.1, 0.18}, {0.1, -0.18}, {0.1, 0.18}};
  const auto p = solve_placement_qp(deltas, {0.0, -0.09}, 0.0, {0.0, 0.0, 0.0}, Side::Right, lim);
  REQUIRE(p.size() == 3);
  CHECK((p[0] - Eigen::Vector2d(0.1, 0.09)).norm() < 1e-9);
  CHECK((p[2] - Eigen::Vector2d(0.3, 0.09)).norm() < 1e-9);
  CHECK_THROWS_AS(solve_placement_qp(deltas, {0, 0}, 0.0, {0.0}, Side::Right, lim), std::invalid_argument);

  // random targets: every step admissible w.r.t. its predecessor
  oracle::Rng rng(5);
  for (int n = 0; n < 50; ++n) {
    const std::size_t f = static_cast<std::size_t>(rng.integer(1, 6));
    std::vector<Eigen::Vector2d> d(f);
    std::vector<double> th(f);
    for (std::size_t j = 0; j < f; ++j) {
      d[j] = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
      th[j] = (j ? th[j - 1] : 0.0) + rng.uniform(-0.3, 0.3);
    }
    const Side s0 = rng.coin() ? Side::Left : Side::Right;
    const auto pos = solve_placement_qp(d, {0.0, 0.0}, 0.0, th, s0, lim);
    Pose2 prev{0.0, 0.0, 0.0};
    Side side = s0;
    for (std::size_t j = 0; j < f; ++j) {
      CHECK(kinematically_admissible(prev, side, pos[j], lim));
      prev = {pos[j].x(), pos[j].y(), th[j]};
      side = opposite(side);
    }
  }
}

TEST_CASE("kinematic admissibility box") {
  const KinematicLimits lim;
  const Pose2 right{0.0, -0.09, 0.0};
  CHECK(kinematically_admissible(right, Side::Right, {0.0, 0.09}, lim));
  CHECK(kinematically_admissible(right, Side::Right, {0.15, 0.09 + 0.035}, lim));
  CHECK_FALSE(kinematically_admissible(right, Side::Right, {0.16, 0.09}, lim));
  CHECK_FALSE(kinematically_admissible(right, Side::Right, {0.0, -0.09}, lim));
  // rotated frame
  const Pose2 turned{0.0, 0.0, 3.14159265358979 / 2};
  CHECK(kinematically_admissible(turned, Side::Right, {-0.18, 0.0}, lim));
}

TEST_CASE("candidate generation for straight walking") {
  CandidateRequest req;
  req.reference = ReferenceSchedule::Constant({0.15, 0.0, 0.0});
  req.support = Footstep{{0.0, -0.09, 0.0}, Side::Right, 0.0};
  req.preview_end = 3.2;
  const auto c = generate_candidates(req);
  REQUIRE(c.size() == 4);
  Pose2 prev = req.support.pose;
  Side side = req.support.side;
  for (std::size_t j = 0; j < c.size(); ++j) {
    CHECK(c[j].side == opposite(side));
    CHECK(c[j].timestamp == doctest::Approx(0.8 * (j + 1)));
    CHECK(c[j].pose.theta == doctest::Approx(0.0));
    // feet ell/2 either side of the path, advancing 0.12 per step
    CHECK(c[j].pose.y == doctest::Approx(sign(c[j].side) * req.limits.ell / 2));
    CHECK(c[j].pose.x == doctest::Approx(0.12 * (j + 1)));
    CHECK(kinematically_admissible(prev, side, c[j].pose.position(), req.limits));
    prev = c[j].pose;
    side = c[j].side;
  }
}

TEST_CASE("candidate generation while turning stays admissible") {
  oracle::Rng rng(6);
  for (int n = 0; n < 20; ++n) {
    CandidateRequest req;
    req.reference = random_schedule(rng);
    req.support = Footstep{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-3, 3)},
                           rng.coin() ? Side::Left : Side::Right, 0.0};
    req.preview_end = 4.0;
    const auto c = generate_candidates(req);
    Pose2 prev = req.support.pose;
    Side side = req.support.side;
    for (const auto& s : c) {
      CHECK(kinematically_admissible(prev, side, s.pose.position(), req.limits));
      CHECK(std::abs(s.pose.theta - prev.theta) <= req.limits.theta_max + 1e-9);
      prev = s.pose;
      side = s.side;
    }
  }
}

TEST_CASE("footstep plan validation and timing") {
  FootstepPlan p;
  p.steps = {{{0, -0.09, 0}, Side::Right, 0.5}, {{0.1, 0.09, 0}, Side::Left, 1.0}};
  CHECK_NOTHROW(p.validate());
  CHECK(p.duration(0) == doctest::Approx(0.5));
  CHECK(p.landing_time(1) == doctest::Approx(0.9));
  p.steps[1].side = Side::Right;
  CHECK_THROWS(p.validate());
  p.steps[1].side = Side::Left;
  p.steps[1].timestamp = 0.5;
  CHECK_THROWS(p.validate());
  p.steps[1].timestamp = 1.0;
  p.ss_fraction = 1.5;
  CHECK_THROWS(p.validate());
}
