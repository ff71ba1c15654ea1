#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ismpc/controller.hpp"
#include "ismpc/schedule.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace ismpc;
using controller::ConstraintForm;
using controller::ControllerKind;
using controller::MpcConfig;

namespace {

footstep::FootstepPlan gait() { return schedule::regular_plan(30, 0.1, 0.18, 0.5, 0.5, 0.8); }

MpcConfig config(std::size_t c, tails::TailKind tail = tails::TailKind::Periodic) {
  MpcConfig cfg;
  cfg.horizon_c = c;
  cfg.preview_p = tail == tails::TailKind::Anticipative ? 2 * c : c;
  cfg.tail = tail;
  return cfg;
}

// Roll out the ZMP over the horizon from the decision vector.
std::vector<Eigen::Vector2d> zmp_rollout(const lip::PlanarState& s, const Eigen::VectorXd& x,
                                         const controller::Layout& l, double delta) {
  std::vector<Eigen::Vector2d> out;
  Eigen::Vector2d z(s.x_axis.zmp_pos, s.y_axis.zmp_pos);
  for (std::size_t i = 0; i < l.horizon; ++i) {
    z += delta * Eigen::Vector2d(x[l.vel(0, i)], x[l.vel(1, i)]);
    out.push_back(z);
  }
  return out;
}

bool inside(const schedule::Region& r, const footstep::FootstepPlan& plan, const Eigen::Vector2d& z, double tol) {
  const Eigen::Vector2d local = footstep::rotation(r.theta).transpose() * (z - r.center(plan));
  return std::abs(local.x()) <= r.half_dims.x() + tol && std::abs(local.y()) <= r.half_dims.y() + tol;
}

}  // namespace

TEST_CASE("layout indexing") {
  controller::Layout l{10, {3, 4}};
  CHECK(l.size() == 24);
  CHECK(l.vel(0, 0) == 0);
  CHECK(l.vel(1, 9) == 19);
  CHECK(l.foot(0, 3) == 20);
  CHECK(l.foot(0, 4) == 21);
  CHECK(l.foot(1, 3) == 22);
  CHECK(l.foot(1, 5) == -1);
}

TEST_CASE("config validation") {
  MpcConfig c = config(50);
  CHECK_NOTHROW(c.validate());
  c.preview_p = 40;
  CHECK_THROWS(c.validate());
  c = config(50);
  c.zmp_dims = {0.0, 0.04};
  CHECK_THROWS(c.validate());
  c = config(0);
  CHECK_THROWS(c.validate());
}

TEST_CASE("assembled IS-MPC problem shape") {
  const auto p = lip::LipParams::Default();
  const auto plan = gait();
  const lip::PlanarState s{};
  const auto a = controller::assemble_qp(s, plan, 1, p, config(100));
  CHECK(a.qp.num_variables() == 200);
  CHECK(a.qp.num_equalities() == 2);
  CHECK(a.qp.num_inequalities() == 200);
  CHECK(a.regions.size() == 100);
  CHECK(a.stability.size() == 2);
  CHECK_NOTHROW(a.qp.validate());

  auto std_cfg = config(100);
  std_cfg.kind = ControllerKind::StandardMpc;
  const auto b = controller::assemble_qp(s, plan, 1, p, std_cfg);
  CHECK(b.qp.num_equalities() == 0);
  CHECK(b.stability.empty());
}

TEST_CASE("solution keeps the ZMP in its regions and meets the stability row") {
  const auto p = lip::LipParams::Default();
  const auto plan = gait();
  controller::Controller ctl(p, config(100));
  lip::PlanarState s{};
  for (int k = 0; k < 150; ++k) {
    const auto a = controller::assemble_qp(s, plan, 1, p, ctl.config());
    const auto r = ctl.iterate(s, plan);
    REQUIRE(r.status == qp::QpStatus::Optimal);
    const auto zs = zmp_rollout(s, r.solution, a.layout, p.sample_time());
    for (std::size_t i = 0; i < zs.size(); ++i) CHECK(inside(a.regions[i], plan, zs[i], 1e-8));
    for (int ax = 0; ax < 2; ++ax) {
      const auto& row = a.stability[ax];
      const auto d = lip::decompose(ax ? s.y_axis : s.x_axis, p);
      CHECK(std::abs(row.coeffs.dot(r.solution.segment(ax * 100, 100)) - row.rhs(d)) < 1e-8);
    }
    // the applied input is the first sample, propagated exactly
    CHECK(r.next_state.x_axis == lip::step_exact(s.x_axis, r.first_inputs.x(), p));
    CHECK(r.next_state.y_axis == lip::step_exact(s.y_axis, r.first_inputs.y(), p));
    CHECK(r.next_state.time == doctest::Approx(s.time + p.sample_time()));
    s = r.next_state;
  }
}

TEST_CASE("stability row and terminal constraint give the same solution") {
  const auto p = lip::LipParams::Default();
  const auto plan = gait();
  oracle::Rng rng(11);
  for (auto tail : {tails::TailKind::Truncated, tails::TailKind::Periodic, tails::TailKind::Anticipative}) {
    for (int n = 0; n < 10; ++n) {
      lip::PlanarState s;
      s.time = 0.01 * rng.integer(0, 300);
      const auto c = schedule::region_at(plan, s.time, {0.04, 0.04}).center(plan);
      s.x_axis = {c.x() + rng.uniform(-0.02, 0.02), rng.uniform(-0.05, 0.05), c.x() + rng.uniform(-0.01, 0.01)};
      s.y_axis = {c.y() + rng.uniform(-0.02, 0.02), rng.uniform(-0.05, 0.05), c.y() + rng.uniform(-0.01, 0.01)};
      auto cfg = config(80, tail);
      const auto a = controller::assemble_qp(s, plan, 1, p, cfg);
      cfg.form = ConstraintForm::Terminal;
      const auto b = controller::assemble_qp(s, plan, 1, p, cfg);
      const auto sa = qp::solve(a.qp);
      const auto sb = qp::solve(b.qp);
      CAPTURE(tails::to_string(tail));
      REQUIRE(sa.status == sb.status);
      if (sa.status == qp::QpStatus::Optimal) CHECK((sa.primal - sb.primal).norm() < 1e-6);
    }
  }
}

TEST_CASE("standard MPC cost is the squared CoM jerk") {
  const auto p = lip::LipParams::Default();
  const auto plan = gait();
  auto cfg = config(40);
  cfg.kind = ControllerKind::StandardMpc;
  lip::PlanarState s;
  s.x_axis = {0.01, 0.1, 0.0};
  s.y_axis = {-0.02, 0.05, 0.01};
  const auto a = controller::assemble_qp(s, plan, 1, p, cfg);
  const double eta2 = p.eta() * p.eta();
  auto jerk_cost = [&](const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (int ax = 0; ax < 2; ++ax) {
      lip::LipAxisState st = ax ? s.y_axis : s.x_axis;
      for (std::size_t i = 0; i < 40; ++i) {
        const double v = x[a.layout.vel(ax, i)];
        const double j = eta2 * (st.com_vel - v);
        acc += j * j;
        st = lip::step_exact(st, v, p);
      }
    }
    return acc;
  };
  oracle::Rng rng(12);
  const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(80, [&] { return rng.uniform(-0.3, 0.3); });
  for (int n = 0; n < 10; ++n) {
    const Eigen::VectorXd x1 = Eigen::VectorXd::NullaryExpr(80, [&] { return rng.uniform(-0.3, 0.3); });
    const double lhs = a.qp.objective(x1) - a.qp.objective(x0);
    const double rhs = jerk_cost(x1) - jerk_cost(x0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("free footsteps respect the kinematic boxes") {
  const auto p = lip::LipParams::Default();
  auto plan = gait();
  // perturb the candidates; the MPC may move them
  for (std::size_t j = 1; j < plan.steps.size(); ++j) plan.steps[j].pose.x += 0.02 * std::sin(j);
  auto cfg = config(100);
  cfg.footsteps_fixed = false;
  controller::Controller ctl(p, cfg);
  lip::PlanarState s{};
  s.time = 0.6;
  s.x_axis.zmp_pos = 0.0;
  s.y_axis = {-0.05, 0.0, -0.09};
  const auto a = controller::assemble_qp(s, plan, 1, p, cfg);
  REQUIRE_FALSE(a.layout.free_steps.empty());
  CHECK(a.layout.free_steps.front() == 1);
  const auto r = ctl.iterate(s, plan, 1);
  REQUIRE(r.status == qp::QpStatus::Optimal);
  REQUIRE(r.planned_footsteps.size() == a.layout.free_steps.size());
  footstep::Pose2 prev = plan.steps[0].pose;
  auto side = plan.steps[0].side;
  for (const auto& [idx, pos] : r.planned_footsteps) {
    CHECK(footstep::kinematically_admissible(prev, side, pos, cfg.limits, 1e-7));
    prev = {pos.x(), pos.y(), plan.steps[idx].pose.theta};
    side = footstep::opposite(side);
  }
}

TEST_CASE("failed iteration keeps the state") {
  const auto p = lip::LipParams::Default();
  const auto plan = gait();
  controller::Controller ctl(p, config(80, tails::TailKind::Truncated));
  lip::PlanarState s{};
  s.x_axis = {0.0, 2.0, 0.0};  // far outside the feasibility region
  const auto r = ctl.iterate(s, plan);
  CHECK(r.status == qp::QpStatus::Infeasible);
  CHECK(r.next_state.x_axis == s.x_axis);
  CHECK(r.next_state.time == s.time);
}
