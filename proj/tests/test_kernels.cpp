#include <doctest.h>

#include <cmath>
#include <random>

#include "zdr/kernels.hpp"

using namespace zdr;

TEST_CASE("center distances match the serial reference") {
  const ZeroSet s{ZeroSetPrimitive::segment(Point{0.5, 0.25}, Point{0.5, 0.75}), ZeroSetPrimitive::point(Point{0.1, 0.1})};
  const auto c = build_grid_covering(Box::cube(2, 0.0, 1.0), 0.013);
  const auto ref = kernels::center_distances_serial(c, s);
  for (int t : {1, 2, 4}) {
    kernels::set_threads(t);
    CHECK(kernels::center_distances(c, s) == ref);
  }
}

TEST_CASE("points per ball match the brute-force reference") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-0.1, 1.1);
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto c = build_grid_covering(Box::cube(d, 0.0, 1.0), d == 3 ? 0.15 : 0.07);
    std::vector<double> coords;
    for (int i = 0; i < 3000; ++i) {
      for (std::size_t k = 0; k < d; ++k) coords.push_back(u(g));
    }
    // Lattice points and exact ball-boundary points.
    for (std::size_t i = 0; i < c.size(); i += 7) {
      const auto ctr = c.center(i);
      coords.insert(coords.end(), ctr.begin(), ctr.end());
      std::vector<double> edge(ctr.begin(), ctr.end());
      edge[0] += c.radius();
      coords.insert(coords.end(), edge.begin(), edge.end());
    }
    const auto ref = kernels::points_per_ball_serial(c, coords);
    for (int t : {1, 3, 8}) {
      kernels::set_threads(t);
      REQUIRE(kernels::points_per_ball(c, coords) == ref);
    }
  }
}

TEST_CASE("grid minimum matches the serial reference") {
  const auto m = catalog_model("example2");
  const double ref = kernels::grid_minimum_serial(m, 0.1, Box::cube(2, 0.0, 1.0), 0.002);
  CHECK(std::isfinite(ref));
  for (int t : {1, 4}) {
    kernels::set_threads(t);
    CHECK(kernels::grid_minimum(m, 0.1, Box::cube(2, 0.0, 1.0), 0.002) == ref);
  }
  // Nothing lies 2 units from S0 inside the unit square.
  CHECK(std::isinf(kernels::grid_minimum(m, 2.0, Box::cube(2, 0.0, 1.0), 0.01)));
}

TEST_CASE("tensor Gauss-Legendre integrates polynomials exactly") {
  const Integrand f = [](std::span<const double> x) { return x[0] * x[0] * x[0] * x[1] * x[1] + 1.0; };
  const Box b(Point{0.0, -1.0}, Point{2.0, 1.0});
  // (16/4)(2/3) + 4
  CHECK(kernels::tensor_gauss_legendre(f, b, 3) == doctest::Approx(4.0 * 2.0 / 3.0 + 4.0).epsilon(1e-13));
  CHECK(kernels::tensor_gauss_legendre(f, b) == doctest::Approx(4.0 * 2.0 / 3.0 + 4.0).epsilon(1e-13));
  kernels::set_threads(kernels::max_threads());
}
