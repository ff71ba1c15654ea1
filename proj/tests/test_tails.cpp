#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ismpc/lip.hpp"
#include "ismpc/tails.hpp"
#include "oracles.hpp"
#include "tail_oracles.hpp"

#include <cmath>

using namespace ismpc;
using tails::Residual;
using tails::Tail;
using tails::TailKind;

using oracle::random_case;

TEST_CASE("stability row gains") {
  const auto p = lip::LipParams::Default();
  const auto tr = tails::build_stability_row(Tail::Truncated(), p, 100);
  CHECK(tr.state_gain == doctest::Approx(101.7836784).epsilon(1e-9));
  CHECK(tr.offset == 0.0);
  const auto pe = tails::build_stability_row(Tail::Periodic(100), p, 100);
  CHECK(pe.state_gain == doctest::Approx(98.8494223).epsilon(1e-9));
  const double w = std::exp(-p.eta() * p.sample_time());
  for (int i = 0; i < 100; ++i) CHECK(tr.coeffs[i] == doctest::Approx(std::pow(w, i)).epsilon(1e-13));
  CHECK((tr.coeffs - pe.coeffs).norm() == 0.0);
  CHECK_THROWS_AS(tails::build_stability_row(Tail::Periodic(50), p, 100), std::invalid_argument);
  CHECK_THROWS_AS(tails::build_stability_row(Tail::Anticipative({0.1, NAN}), p, 100), std::invalid_argument);
}

TEST_CASE("stability row against quadrature of the weighted ZMP") {
  oracle::Rng rng(21);
  for (TailKind kind : {TailKind::Truncated, TailKind::Periodic, TailKind::Anticipative}) {
    for (int n = 0; n < 30; ++n) {
      const auto p = lip::LipParams(9.81, rng.uniform(0.3, 1.6), 0.01);
      const std::size_t c = static_cast<std::size_t>(rng.integer(5, 120));
      const auto cs = random_case(rng, kind, c);
      const double z0 = rng.uniform(-0.2, 0.2);
      const double xu = oracle::weighted_zmp(oracle::materialize(cs.tail, cs.v, 6000), z0, p);
      const auto row = tails::build_stability_row(cs.tail, p, c);
      const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(cs.v.data(), c);
      CAPTURE(tails::to_string(kind));
      CHECK(std::abs(row.coeffs.dot(v) - row.rhs({0.0, xu, z0})) < 1e-8);
    }
  }
}

TEST_CASE("terminal constraint against simulated horizon") {
  oracle::Rng rng(22);
  for (TailKind kind : {TailKind::Truncated, TailKind::Periodic, TailKind::Anticipative}) {
    for (int n = 0; n < 30; ++n) {
      const auto p = lip::LipParams(9.81, rng.uniform(0.3, 1.6), 0.01);
      const std::size_t c = static_cast<std::size_t>(rng.integer(5, 120));
      const auto cs = random_case(rng, kind, c);
      const double z0 = rng.uniform(-0.2, 0.2);
      const double xu = oracle::weighted_zmp(oracle::materialize(cs.tail, cs.v, 6000), z0, p);
      // simulate the full state over the horizon
      lip::LipAxisState s = lip::recompose({0.0, xu, z0}, p);
      for (double vi : cs.v) s = lip::step_exact(s, vi, p);
      const auto end = lip::decompose(s, p);
      const double target = tails::terminal_constraint_value(cs.tail, p, c, end.zmp_pos, xu - z0);
      CAPTURE(tails::to_string(kind));
      CHECK(std::abs(end.unstable - target) < 1e-8);

      const lip::DecomposedState now{0.0, xu, z0};
      const auto term = tails::terminal_row(cs.tail, p, c, now);
      const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(cs.v.data(), c);
      CHECK(std::abs(term.coeffs.dot(v) - term.constant) < 1e-8);

      const auto xc = tails::unstable_at_horizon(now, p, c);
      CHECK(std::abs(xc.coeffs.dot(v) + xc.constant - end.unstable) < 1e-10);
    }
  }
}

TEST_CASE("anticipative tail sum against brute force") {
  oracle::Rng rng(23);
  const auto p = lip::LipParams::Default();
  const double w = std::exp(-p.eta() * p.sample_time());
  for (int n = 0; n < 40; ++n) {
    const std::size_t c = static_cast<std::size_t>(rng.integer(1, 100));
    const auto cs = random_case(rng, TailKind::Anticipative, c);
    const auto seq = oracle::materialize(cs.tail, cs.v, 50000);
    double brute = 0.0;
    for (std::size_t i = c; i < seq.size(); ++i) brute += std::pow(w, static_cast<double>(i)) * seq[i];
    CHECK(std::abs(tails::anticipative_tail_sum(cs.tail, p, c) - brute) < 1e-10);
  }
  CHECK(tails::anticipative_tail_sum(Tail::Truncated(), p, 10) == 0.0);
  CHECK_THROWS(tails::anticipative_tail_sum(Tail::Periodic(10), p, 10));
}

TEST_CASE("differentiate samples") {
  const auto v = tails::differentiate_samples({0.0, 0.01, 0.03, 0.03}, 0.01);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(2.0));
  CHECK(v[2] == doctest::Approx(0.0));
}

TEST_CASE("exponential weighting properties") {
  for (double h : {0.3, 0.78, 1.6}) {
    const auto checks = tails::verify_exponential_weighting_properties(lip::LipParams(9.81, h, 0.01));
    CHECK(checks.size() >= 4);
    for (const auto& c : checks) {
      CAPTURE(c.name);
      CHECK(c.pass);
      CHECK(std::abs(c.computed - c.expected) <= 1e-6);
    }
  }
}
