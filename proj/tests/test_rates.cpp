#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "zdr/sampling.hpp"
#include "zdr/rates.hpp"

using namespace zdr;

namespace {

RateSchedule sched(double eta, double psi, double m_r = 0.4, double m_eps = 0.4, double xi = 0.05) {
  RateSchedule s;
  s.eta = eta;
  s.psi = psi;
  s.xi = xi;
  s.m_r = m_r;
  s.m_eps = m_eps;
  return s;
}

SmoothnessOrders orders(double upper, double lower) { return {upper, lower, 1.0, 1.0, 1.0}; }

}  // namespace

TEST_CASE("schedule values") {
  const auto v = schedule_values(sched(0.21, 0.01), 10000);
  // 0.4 * 10^-0.84 and 0.4 * 10^-0.04
  CHECK(v.r == doctest::Approx(0.0578176).epsilon(1e-5));
  CHECK(v.eps == doctest::Approx(0.364804).epsilon(1e-5));
  const auto one = schedule_values(sched(0.21, 0.01, 0.2, 0.7), 1);
  CHECK(one.r == 0.2);
  CHECK(one.eps == 0.7);
  CHECK_THROWS_AS(schedule_values(sched(0.21, 0.01), 0), std::invalid_argument);
}

TEST_CASE("infeasible schedules report the minimal valid n") {
  // 2r > eps at n = 1 (0.8 > 0.4); valid once n^0.2 >= 2.
  const auto s = sched(0.21, 0.01);
  try {
    schedule_values(s, 1);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    REQUIRE(e.minimal_n().has_value());
    const auto n = *e.minimal_n();
    CHECK_NOTHROW(schedule_values(s, n));
    CHECK_THROWS_AS(schedule_values(s, n - 1), InfeasibleError);
    CHECK(std::string(e.what()).find("2 r(n) <= eps(n)") != std::string::npos);
  }
  // eps >= 1 forever when psi is tiny and M_eps large.
  CHECK_THROWS_AS(schedule_values(sched(0.1, 0.1, 0.1, 1e30), 5), InfeasibleError);
  // psi = eta and 2 M_r > M_eps: never valid.
  CHECK_FALSE(minimal_valid_n(sched(0.2, 0.2, 0.4, 0.5)).has_value());
}

TEST_CASE("schedule hypotheses") {
  CHECK_NOTHROW(sched(0.21, 0.01).validate(2));
  CHECK_THROWS_AS(sched(0.5, 0.01).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(sched(0.21, 0.3).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(sched(0.21, 0.01, 0.4, 0.4, 0.09).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(sched(0.21, 0.01, -1.0).validate(2), std::invalid_argument);
}

TEST_CASE("single-component conditions") {
  const auto rep = check_theorem1(2, 1, orders(4, 4), sched(0.21, 0.01));
  CHECK(rep.condition_a_value == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(rep.condition_a_holds);
  CHECK(rep.condition_b_value == doctest::Approx(-0.05).epsilon(1e-12));
  CHECK(rep.condition_b_holds);
  CHECK(rep.xi_condition_holds);

  // psi exactly at (1 - 2 eta d) / (2 K): A is 0 and fails.
  const double psi = (1.0 - 2.0 * 0.21 * 2.0) / 8.0;
  const auto edge = check_theorem1(2, 1, orders(4, 4), sched(0.21, psi));
  CHECK(edge.condition_a_value == 0.0);
  CHECK_FALSE(edge.condition_a_holds);

  const auto weak = check_theorem1(2, 1, orders(4, 0.1), sched(0.21, 0.01));
  CHECK(weak.condition_b_value == doctest::Approx(0.769).epsilon(1e-12));
  CHECK_FALSE(weak.condition_b_holds);

  CHECK_THROWS_AS(check_theorem1(2, 2, orders(4, 4), sched(0.21, 0.01)), std::invalid_argument);
}

TEST_CASE("multi-component conditions") {
  const auto s = sched(0.21, 0.01);
  const auto one = check_corollary1(2, {{1, 4, 4}}, s);
  const auto thm = check_theorem1(2, 1, orders(4, 4), s);
  CHECK(one.condition_a_value == thm.condition_a_value);
  CHECK(one.condition_b_value == thm.condition_b_value);

  const auto two = check_corollary1(2, {{1, 4, 4}, {1, 8, 4}}, s);
  CHECK(two.condition_a_value == 0.0);
  CHECK_FALSE(two.condition_a_holds);
  CHECK(two.binding_a == 1);

  const auto mixed = check_corollary1(2, {{0, 4, 4}, {1, 4, 4}}, s);
  CHECK(mixed.binding_b == 1);
  CHECK(mixed.condition_b_value == doctest::Approx(-0.05).epsilon(1e-12));
  CHECK_THROWS_AS(check_corollary1(2, {}, s), std::invalid_argument);
}

TEST_CASE("condition values are affine in (eta, psi)") {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t d = 1 + g() % 3;
    const int d0 = static_cast<int>(g() % d);
    const double eta = u(g) / d, psi = u(g) * eta, ku = 0.5 + 5 * u(g), kl = 0.5 + 5 * u(g);
    const auto rep = check_theorem1(d, d0, orders(ku, kl), sched(eta, psi));
    REQUIRE(rep.condition_a_value == doctest::Approx(1 - 2 * eta * d - 2 * ku * psi).epsilon(1e-12));
    REQUIRE(rep.condition_b_value == doctest::Approx(1 + d0 * eta - kl * eta - d * eta).epsilon(1e-12));
  }
}

TEST_CASE("ball volume") {
  CHECK(ball_volume(2, 0.1) == doctest::Approx(std::numbers::pi * 0.01).epsilon(1e-14));
  CHECK(ball_volume(1, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ball_volume(3, 1.0) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(ball_volume(2, 0.0), std::invalid_argument);
}

TEST_CASE("Hoeffding bound") {
  CHECK(hoeffding_bound(100, 0.1) == doctest::Approx(1.0 - 2.0 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(hoeffding_bound(1e9, 0.1) == 1.0);
  CHECK(hoeffding_bound(1, 0.1) == 0.0);
  double prev = 0.0;
  for (double n = 1; n < 1e5; n *= 1.7) {
    const double h = hoeffding_bound(n, 0.05);
    CHECK(h >= prev);
    prev = h;
  }
  prev = 0.0;
  for (double gm = 0.001; gm < 1.0; gm *= 1.5) {
    const double h = hoeffding_bound(300, gm);
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("ball mass bounds: scaling") {
  const auto o = orders(4, 2);
  CHECK(inside_ball_mass_upper(o, 2, 0.01) / inside_ball_mass_upper(o, 2, 0.005) == doctest::Approx(16.0));
  auto o2 = o;
  o2.upper_constant *= 2.0;
  CHECK(inside_ball_mass_upper(o2, 2, 0.05) == doctest::Approx(2.0 * inside_ball_mass_upper(o, 2, 0.05)));
  CHECK(outside_ball_mass_lower(o, 1, 0.1, 0.3, 1.0, true) ==
        doctest::Approx(0.5 * outside_ball_mass_lower(o, 1, 0.1, 0.3, 1.0, false)));
  // m_f below L (eps - r)^K picks the m_f branch.
  CHECK(outside_ball_mass_lower(o, 2, 0.1, 0.3, 1e-6, false) ==
        doctest::Approx(2.0 * outside_ball_mass_lower(o, 2, 0.1, 0.3, 5e-7, false)));
  CHECK_THROWS_AS(outside_ball_mass_lower(o, 2, 0.1, 0.1, 1.0, false), std::invalid_argument);
}

TEST_CASE("outside-nonempty bound") {
  CHECK(outside_nonempty_prob_bound(0.01, 1e6) == doctest::Approx(1.0));
  CHECK(outside_nonempty_prob_bound(0.1, 100) == 0.0);
  CHECK_THROWS_AS(outside_nonempty_prob_bound(0.001, 100), std::invalid_argument);
}

TEST_CASE("analytic bounds bracket quadrature ball masses") {
  struct Case {
    const char* id;
    std::size_t d0;
    RateSchedule s;
  };
  for (const Case& c : {Case{"powerlaw4_segment", 1, sched(0.21, 0.01)}, Case{"f_quadratic", 0, sched(0.4, 0.01)}}) {
    const auto m = catalog_model(c.id);
    const auto o = smoothness_orders(m);
    const std::size_t d = m.dim();
    const auto rep = check_theorem1(d, static_cast<int>(c.d0), o, c.s);
    REQUIRE(rep.condition_a_holds);
    REQUIRE(rep.condition_b_holds);
    const Box region = *m.support().box();
    std::mt19937_64 g(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double r : {0.02, 0.05}) {
      const double eps = 4.0 * r;
      const double m_f = min_outside_neighborhood(m, eps, region).value;
      int inside = 0, outside = 0;
      while (inside < 25 || outside < 25) {
        std::vector<double> x(d);
        for (std::size_t k = 0; k < d; ++k) x[k] = region.lower()[k] + region.side(k) * u(g);
        const Ball b{Point(x), r};
        const double dist = m.zero_set()->distance(x);
        bool clipped = false;
        for (std::size_t k = 0; k < d; ++k) {
          clipped = clipped || x[k] - r < region.lower()[k] || x[k] + r > region.upper()[k];
        }
        if (dist < r && inside < 25) {
          ++inside;
          CHECK(ball_probability(m, b) <= inside_ball_mass_upper(o, d, r));
        } else if (dist >= eps && outside < 25) {
          ++outside;
          CHECK(ball_probability(m, b) >= outside_ball_mass_lower(o, d, r, eps, m_f, clipped));
        }
      }
    }
  }
}

TEST_CASE("outside-nonempty bound against Monte Carlo") {
  struct Case {
    const char* id;
    Ball ball;
  };
  for (const Case& c : {Case{"f_quadratic", Ball(Point{0.9}, 0.1)}, Case{"powerlaw4_segment", Ball(Point{0.9, 0.5}, 0.05)}}) {
    const auto m = catalog_model(c.id);
    const double p = ball_probability(m, c.ball);
    const std::size_t n = 1000, trials = 10000;
    std::size_t nonempty = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto b = sample(m, n, derive_trial_seed(77, t));
      for (std::size_t i = 0; i < n; ++i) {
        if (c.ball.contains(b.point(i))) {
          ++nonempty;
          break;
        }
      }
    }
    CHECK(static_cast<double>(nonempty) / trials >= outside_nonempty_prob_bound(p, n));
  }
}
