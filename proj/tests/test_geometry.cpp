#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "zdr/geometry.hpp"

using namespace zdr;

namespace {

ZeroSet example1_segment() { return ZeroSet{ZeroSetPrimitive::segment(Point{0.5, 0.25}, Point{0.5, 0.75})}; }

}  // namespace

TEST_CASE("points and boxes validate their input") {
  CHECK_THROWS_AS(Point(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS((Point{0.0, std::numeric_limits<double>::infinity()}), std::invalid_argument);
  CHECK_THROWS_AS((Point{std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(Box(Point{1.0}, Point{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Box(Point{0.0}, Point{0.0, 1.0}), std::invalid_argument);

  const Box b = Box::cube(2, 0.0, 1.0);
  CHECK(b.volume() == 1.0);
  CHECK(b.min_side() == 1.0);
  CHECK(b.corners().size() == 4);
  CHECK(b.contains(std::vector<double>{1.0, 0.0}));
  CHECK_FALSE(b.contains(std::vector<double>{1.0 + 1e-12, 0.5}));
}

TEST_CASE("primitive invariants") {
  CHECK_THROWS_AS(ZeroSetPrimitive::segment(Point{0.1, 0.2}, Point{0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(ZeroSetPrimitive::box(Point{0.0, 1.0}, Point{1.0, 0.0}), std::invalid_argument);
  CHECK(ZeroSetPrimitive::point(Point{0.0, 0.0}).intrinsic_dimension() == 0);
  CHECK(ZeroSetPrimitive::segment(Point{0.0, 0.0}, Point{1.0, 0.0}).intrinsic_dimension() == 1);
  CHECK(ZeroSetPrimitive::box(Point{0.0, 0.0, 0.0}, Point{1.0, 0.0, 2.0}).intrinsic_dimension() == 2);
  CHECK(ZeroSetPrimitive::box(Point{0.0, 0.0}, Point{0.0, 0.0}).intrinsic_dimension() == 0);
}

TEST_CASE("zero set invariants") {
  CHECK_THROWS_AS(ZeroSet(std::vector<ZeroSetPrimitive>{}), std::invalid_argument);
  CHECK_THROWS_AS((ZeroSet{ZeroSetPrimitive::point(Point{0.0}), ZeroSetPrimitive::point(Point{0.0, 1.0})}),
                  std::invalid_argument);
  // Touching components are not disjoint.
  CHECK_THROWS_AS((ZeroSet{ZeroSetPrimitive::segment(Point{0.0, 0.0}, Point{1.0, 0.0}),
                           ZeroSetPrimitive::point(Point{0.5, 0.0})}),
                  std::invalid_argument);
  const ZeroSet s{ZeroSetPrimitive::point(Point{0.2, 0.2}), ZeroSetPrimitive::segment(Point{0.5, 0.0}, Point{0.5, 1.0})};
  CHECK(s.declared_dimension() == 1);
  CHECK(s.is_lower_dimensional());
  CHECK(s.ambient_dim() == 2);
}

TEST_CASE("distance to the vertical segment") {
  const ZeroSet s = example1_segment();
  CHECK(distance_to_zero_set(Point{0.7, 0.5}, s) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(distance_to_zero_set(Point{0.5, 0.9}, s) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(distance_to_zero_set(Point{0.8, 0.1}, s) == doctest::Approx(std::sqrt(0.1125)).epsilon(1e-15));
  CHECK(distance_to_zero_set(Point{0.5, 0.3}, s) == 0.0);
  CHECK_THROWS_AS(distance_to_zero_set(Point{0.5}, s), std::invalid_argument);
}

TEST_CASE("epsilon neighborhood is open") {
  const ZeroSet s = example1_segment();
  CHECK(in_epsilon_neighborhood(Point{0.7, 0.5}, s, 0.25));
  CHECK_FALSE(in_epsilon_neighborhood(Point{0.75, 0.5}, s, 0.25));
  CHECK(in_epsilon_neighborhood(Point{0.5, 0.5}, s, 1e-300));
  CHECK_THROWS_AS(in_epsilon_neighborhood(Point{0.5, 0.5}, s, 0.0), std::invalid_argument);
  // 0.7 - 0.5 is not exactly 0.2 in binary; use a representable boundary.
  const ZeroSet origin{ZeroSetPrimitive::point(Point{0.0, 0.0})};
  CHECK_FALSE(in_epsilon_neighborhood(Point{0.25, 0.0}, origin, 0.25));
}

TEST_CASE("ball intersection uses the open ball") {
  const ZeroSet s = example1_segment();
  CHECK(ball_intersects_zero_set(Ball(Point{0.5, 0.5}, 0.1), s));
  CHECK_FALSE(ball_intersects_zero_set(Ball(Point{0.65, 0.5}, 0.1), s));
  CHECK(ball_intersects_zero_set(Ball(Point{0.58, 0.5}, 0.1), s));
  const ZeroSet origin{ZeroSetPrimitive::point(Point{0.0, 0.0})};
  CHECK_FALSE(ball_intersects_zero_set(Ball(Point{0.5, 0.0}, 0.5), origin));
  CHECK(Ball(Point{0.0}, 0.5).contains(std::vector<double>{0.4999999}));
  CHECK_FALSE(Ball(Point{0.0}, 0.5).contains(std::vector<double>{0.5}));
}

TEST_CASE("distance is 1-Lipschitz over 10^4 random pairs") {
  const ZeroSet s{ZeroSetPrimitive::segment(Point{0.5, 0.25}, Point{0.5, 0.75}),
                  ZeroSetPrimitive::point(Point{0.1, 0.9}),
                  ZeroSetPrimitive::box(Point{0.8, 0.0}, Point{0.95, 0.1})};
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int i = 0; i < 10000; ++i) {
    const Point x{u(g), u(g)}, y{u(g), u(g)};
    const double lhs = std::abs(distance_to_zero_set(x, s) - distance_to_zero_set(y, s));
    REQUIRE(lhs <= euclidean_distance(x.coords(), y.coords()) + 1e-15);
  }
}

TEST_CASE("segment distance agrees with a discretized brute force") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  constexpr int kPts = 10000;
  for (int trial = 0; trial < 50; ++trial) {
    const Point a{u(g), u(g), u(g)}, b{u(g), u(g), u(g)};
    const auto seg = ZeroSetPrimitive::segment(a, b);
    const double len = euclidean_distance(a.coords(), b.coords());
    const Point x{u(g), u(g), u(g)};
    double brute = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kPts; ++k) {
      const double t = static_cast<double>(k) / (kPts - 1);
      const std::vector<double> p{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
      brute = std::min(brute, euclidean_distance(p, x.coords()));
    }
    const double d = seg.distance(x.coords());
    CHECK(d <= brute + 1e-9);
    CHECK(brute <= d + len / (2.0 * (kPts - 1)) + 1e-9);
  }
}

TEST_CASE("multi-component distance is the minimum over components") {
  const std::vector<ZeroSetPrimitive> prims{ZeroSetPrimitive::point(Point{0.1, 0.1}),
                                            ZeroSetPrimitive::segment(Point{0.5, 0.25}, Point{0.5, 0.75}),
                                            ZeroSetPrimitive::box(Point{0.8, 0.8}, Point{0.9, 1.0})};
  const ZeroSet s(prims);
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{u(g), u(g)};
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : prims) m = std::min(m, p.distance(x));
    CHECK(s.distance(x) == m);
  }
}

TEST_CASE("primitive set distances") {
  const auto s1 = ZeroSetPrimitive::segment(Point{0.0, 0.0}, Point{1.0, 0.0});
  const auto s2 = ZeroSetPrimitive::segment(Point{0.0, 1.0}, Point{1.0, 2.0});
  CHECK(primitive_distance(s1, s2) == doctest::Approx(1.0));
  const auto crossing = ZeroSetPrimitive::segment(Point{0.5, -1.0}, Point{0.5, 1.0});
  CHECK(primitive_distance(s1, crossing) == doctest::Approx(0.0));
  const auto b1 = ZeroSetPrimitive::box(Point{0.0, 0.0}, Point{1.0, 1.0});
  const auto b2 = ZeroSetPrimitive::box(Point{2.0, 2.0}, Point{3.0, 3.0});
  CHECK(primitive_distance(b1, b2) == doctest::Approx(std::sqrt(2.0)));
  const auto seg_near_box = ZeroSetPrimitive::segment(Point{1.5, -1.0}, Point{1.5, 3.0});
  CHECK(primitive_distance(seg_near_box, b1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(primitive_distance(ZeroSetPrimitive::point(Point{3.0, 4.0}), ZeroSetPrimitive::point(Point{0.0, 0.0})) ==
        doctest::Approx(5.0));
}

TEST_CASE("closest point lies on the primitive at the reported distance") {
  const auto seg = ZeroSetPrimitive::segment(Point{0.5, 0.25}, Point{0.5, 0.75});
  const std::vector<double> x{0.9, 0.1};
  const auto c = seg.closest_point(x);
  CHECK(c[0] == doctest::Approx(0.5));
  CHECK(c[1] == doctest::Approx(0.25));
  CHECK(euclidean_distance(c, x) == doctest::Approx(seg.distance(x)));
}
