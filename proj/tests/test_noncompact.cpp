#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "zdr/covering.hpp"
#include "zdr/noncompact.hpp"
#include "zdr/quadrature.hpp"

using namespace zdr;

namespace {

// Slope of y against log x by least squares.
double loglinear_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    sx += lx;
    sy += y[i];
    sxx += lx * lx;
    sxy += lx * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const std::vector<double> kNs{1e3, 3e3, 1e4, 3e4, 1e5, 3e5, 1e6};

}  // namespace

TEST_CASE("solve_B examples") {
  const auto poly = catalog_model("polytail_1_3");
  const auto exp_tail = catalog_model("exptail_1_3");
  CHECK(solve_B(poly, 0.1).b == doctest::Approx(4.0 / 0.7).epsilon(1e-10));
  CHECK(solve_B(exp_tail, 0.1).b == doctest::Approx(1.0 - 0.5 * std::log(0.25)).epsilon(1e-10));
  CHECK(solve_B(exp_tail, 0.1).b == doctest::Approx(1.693147).epsilon(1e-6));
  CHECK_THROWS_AS(solve_B(poly, 4.0 / 7.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_B(exp_tail, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(solve_B(catalog_model("f_quadratic"), 0.1), std::invalid_argument);
}

TEST_CASE("closed form and bisection agree; tail mass is conserved") {
  for (const char* id : {"polytail_1_3", "exptail_1_3"}) {
    const auto m = catalog_model(id);
    for (double delta : {0.3, 0.1, 0.01, 0.001}) {
      const auto res = solve_B(m, delta);
      REQUIRE(res.closed_form.has_value());
      CHECK(std::abs(*res.closed_form - res.b) <= 1e-8);
      // 2 * integral of f over (B, inf), with x = B / u mapping it onto (0, 1).
      const double b = res.b;
      auto g = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = b / u;
        return m.evaluate(std::span<const double>(&x, 1)) * b / (u * u);
      };
      const double mass = 2.0 * integrate_interval(g, 0.0, 1.0, 1e-13, 1e-16).value;
      CHECK(std::abs(mass - delta) <= 1e-8);
    }
  }
}

TEST_CASE("truncation schedule construction") {
  const auto poly = catalog_model("polytail_1_3");
  const auto s = build_truncation_schedule(poly, 0.3, 0.1);
  CHECK(s.gamma1() == doctest::Approx(1.0 / 3.0));
  CHECK(s.psi() == doctest::Approx(0.3));
  CHECK(s.psi() <= s.eta() + 1e-15);
  CHECK(s.m_delta() == doctest::Approx(2.0 / 7.0));
  CHECK(s.delta_exponent() == doctest::Approx(0.05));

  // A larger xi forces gamma1 = xi / eta above gamma.
  const auto s2 = build_truncation_schedule(poly, 0.1, 0.2);
  CHECK(s2.gamma1() == doctest::Approx(2.0));
  CHECK(s2.psi() == doctest::Approx(0.1));

  CHECK_THROWS_AS(build_truncation_schedule(poly, 0.3, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(build_truncation_schedule(poly, 1.2, 0.1), std::invalid_argument);
  CHECK_NOTHROW(build_truncation_schedule(poly, 0.4, 0.05));
  CHECK_THROWS_AS(build_truncation_schedule(poly, 0.3, 0.1, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(build_truncation_schedule(catalog_model("g_twobumps"), 0.3, 0.1), std::invalid_argument);

  const auto e = build_truncation_schedule(catalog_model("exptail_1_3"), 0.3, 0.1);
  CHECK(e.m_delta() == doctest::Approx(0.2));
  CHECK(e.delta_exponent() == doctest::Approx(0.1));
}

TEST_CASE("schedule monotonicity and growth orders") {
  for (const char* id : {"polytail_1_3", "exptail_1_3"}) {
    const auto s = build_truncation_schedule(catalog_model(id), 0.3, 0.1);
    std::vector<double> bs;
    for (std::size_t i = 0; i < kNs.size(); ++i) {
      bs.push_back(s.B(kNs[i]));
      if (i > 0) {
        CHECK(s.delta(kNs[i]) < s.delta(kNs[i - 1]));
        CHECK(s.eps(kNs[i]) < s.eps(kNs[i - 1]));
        CHECK(bs[i] > bs[i - 1]);
      }
    }
    if (std::string(id) == "polytail_1_3") {
      // B ~ n^(xi / 2) for chi = -2.
      CHECK(std::abs(loglog_slope(kNs, bs) - 0.05) <= 0.05);
    } else {
      // B grows like log n: linear in log n with slope a / |beta|.
      CHECK(std::abs(loglinear_slope(kNs, bs) - 0.1 / 2.0) <= 0.05);
      CHECK(loglog_slope(kNs, bs) < 0.05);
    }
  }
}

TEST_CASE("N1 is where the eps-neighborhood first fits inside the truncation") {
  for (const char* id : {"polytail_1_3", "exptail_1_3"}) {
    const auto s = build_truncation_schedule(catalog_model(id), 0.3, 0.1);
    const auto n1 = s.threshold_n1();
    CHECK(s.eps(static_cast<double>(n1)) < s.B(static_cast<double>(n1)));
    if (n1 > 1) CHECK(s.eps(static_cast<double>(n1 - 1)) >= s.B(static_cast<double>(n1 - 1)));
    for (double n : {2.0 * n1, 10.0 * n1, 1e3 * n1}) CHECK(s.eps(n) < s.B(n));
  }
}

TEST_CASE("m(f, n) decays like n^-xi") {
  for (const char* id : {"polytail_1_3", "exptail_1_3"}) {
    const auto s = build_truncation_schedule(catalog_model(id), 0.3, 0.1);
    CHECK(std::abs(validate_m_decay(s, kNs) + 0.1) <= 0.02);
    for (double n : kNs) CHECK(s.m_value(n) > 0.0);
  }
  const auto s = build_truncation_schedule(catalog_model("polytail_1_3"), 0.3, 0.1);
  CHECK_THROWS_AS(validate_m_decay(s, std::vector<double>{1e3, 1e4}), std::invalid_argument);
}

TEST_CASE("compact density with a flat minimum has m-slope 0") {
  RateSchedule rs;
  rs.eta = 0.3;
  rs.psi = 0.05;
  rs.xi = 0.1;
  rs.m_r = 0.1;
  rs.m_eps = 0.9;
  CHECK(std::abs(validate_m_decay(catalog_model("g_twobumps"), rs, kNs)) < 1e-12);
  CHECK(std::abs(validate_m_decay(catalog_model("h_parabolic"), rs, kNs)) < 1e-12);
}

TEST_CASE("binomial containment bound") {
  CHECK(binomial_containment_bound(1e4, 0.1) == doctest::Approx(1.0 - 2.0 * std::exp(-25.0)));
  CHECK(binomial_containment_bound(100, 1e-6) == 0.0);
  CHECK(binomial_containment_bound_sharp(1e3, 0.1) >= binomial_containment_bound(1e3, 0.1));
  CHECK_THROWS_AS(binomial_containment_bound(10, 0.0), std::invalid_argument);

  std::mt19937_64 g(12);
  std::binomial_distribution<int> bin(1000, 0.9);
  int inside = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const int k = bin(g);
    inside += k >= 850 && k <= 950;
  }
  CHECK(static_cast<double>(inside) / trials >= binomial_containment_bound(1000, 0.1));
  CHECK(static_cast<double>(inside) / trials >= binomial_containment_bound_sharp(1000, 0.1));
}

TEST_CASE("truncated detection keeps inside balls emptier than outside balls") {
  // Qualitative only: for gamma = 1/3 in one dimension no (eta, psi) satisfies
  // both sufficient conditions, so no numeric rate is claimed.
  const auto m = catalog_model("polytail_1_3");
  const auto s = build_truncation_schedule(m, 0.3, 0.1);
  const double n = 1e4;
  const double b = s.B(n), eps = s.eps(n), r = 1e-4;
  REQUIRE(eps < b);
  const auto cc = classify_covering(build_grid_covering(Box::cube(1, -b, b), r), *m.zero_set(), eps);
  REQUIRE(cc.count(BallClass::EpsInside) > 0);
  REQUIRE(cc.count(BallClass::EpsOutside) > 0);
  double in_frac = 0.0, out_frac = 0.0;
  int event_b = 0;
  const int seeds = 20;
  for (int k = 0; k < seeds; ++k) {
    const auto occ = count_occupancy(cc, sample(m, static_cast<std::size_t>(n), derive_trial_seed(404, k)));
    in_frac += occ[BallClass::EpsInside].fraction / seeds;
    out_frac += occ[BallClass::EpsOutside].fraction / seeds;
    event_b += occ.event_b;
  }
  CHECK(in_frac < out_frac);
  CHECK(event_b >= seeds / 2);
}
