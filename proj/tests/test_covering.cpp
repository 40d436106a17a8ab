#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "zdr/covering.hpp"

using namespace zdr;

namespace {

ZeroSet example1_segment() { return ZeroSet{ZeroSetPrimitive::segment(Point{0.5, 0.25}, Point{0.5, 0.75})}; }

SampleBatch batch_of(std::size_t dim, std::vector<double> coords) {
  SampleBatch b;
  b.dim = dim;
  b.coords = std::move(coords);
  return b;
}

}  // namespace

TEST_CASE("grid covering cardinality") {
  CHECK(build_grid_covering(Box::cube(2, 0.0, 1.0), 0.1).size() == 441);
  const auto c = build_grid_covering(Box::cube(1, 0.0, 1.0), 0.49);
  CHECK(c.grid_step() == doctest::Approx(0.49));
  const auto c3 = build_grid_covering(Box::cube(1, 0.0, 1.0), 0.5);
  REQUIRE(c3.size() == 3);
  CHECK(c3.center(0)[0] == 0.0);
  CHECK(c3.center(1)[0] == 0.5);
  CHECK(c3.center(2)[0] == 1.0);
  CHECK_THROWS_AS(build_grid_covering(Box::cube(1, 0.0, 1.0), 0.51), std::invalid_argument);
  CHECK_THROWS_AS(build_grid_covering(Box::cube(1, 0.0, 1.0), 0.0), std::invalid_argument);

  // Halving r multiplies the count by about 2^d.
  for (double r : {0.1, 0.05, 0.02}) {
    const double ratio = static_cast<double>(build_grid_covering(Box::cube(2, 0.0, 1.0), r / 2).size()) /
                         static_cast<double>(build_grid_covering(Box::cube(2, 0.0, 1.0), r).size());
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.0);
  }
}

TEST_CASE("|balls| * r^d stays between fixed constants") {
  double lo = 1e300, hi = 0.0;
  for (double r = 0.005; r <= 0.1 + 1e-12; r += 0.005) {
    const double v = static_cast<double>(build_grid_covering(Box::cube(2, 0.0, 1.0), r).size()) * r * r;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= 4.0);
  CHECK(hi <= 4.0 * 1.21 * 1.21);
}

TEST_CASE("centers lie in the region and the balls cover it") {
  const Box region(Point{-0.3, 0.1, 0.0}, Point{0.7, 0.9, 0.5});
  const auto c = build_grid_covering(region, 0.07);
  for (std::size_t i = 0; i < c.size(); ++i) REQUIRE(region.contains(c.center(i)));

  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double step = c.grid_step();
  for (int k = 0; k < 100000; ++k) {
    std::vector<double> x(3);
    std::vector<std::size_t> idx(3);
    for (std::size_t i = 0; i < 3; ++i) {
      x[i] = region.lower()[i] + region.side(i) * u(g);
      idx[i] = std::min<std::size_t>(static_cast<std::size_t>(std::lround((x[i] - region.lower()[i]) / step)),
                                     c.counts_per_axis()[i] - 1);
    }
    // The nearest lattice center is within step*sqrt(d)/2 < r, except at the
    // clipped upper edge where it may be one step away along an axis.
    bool covered = c.ball(c.flat_index(idx)).contains(x);
    for (std::size_t i = 0; i < 3 && !covered; ++i) {
      if (idx[i] > 0) {
        auto j = idx;
        --j[i];
        covered = c.ball(c.flat_index(j)).contains(x);
      }
    }
    REQUIRE(covered);
  }
}

TEST_CASE("classification examples") {
  const auto s = example1_segment();
  CHECK(classify_ball(Ball(Point{0.5, 0.5}, 0.1), s, 0.2) == BallClass::EpsInside);
  CHECK(classify_ball(Ball(Point{0.65, 0.5}, 0.1), s, 0.2) == BallClass::EpsNeighboring);
  CHECK(classify_ball(Ball(Point{0.9, 0.5}, 0.1), s, 0.2) == BallClass::EpsOutside);
  CHECK_THROWS_AS(classify_ball(Ball(Point{0.5, 0.5}, 0.1), s, 0.19), std::invalid_argument);
  CHECK(classify_distance(0.1, 0.1, 0.2) == BallClass::EpsNeighboring);
  CHECK(classify_distance(0.2, 0.1, 0.2) == BallClass::EpsOutside);
  CHECK(to_string(BallClass::EpsInside) == "inside");
}

TEST_CASE("classified counts partition the covering") {
  const auto s = example1_segment();
  const auto cc = classify_covering(build_grid_covering(Box::cube(2, 0.0, 1.0), 0.1), s, 0.2);
  CHECK(cc.count(BallClass::EpsInside) + cc.count(BallClass::EpsNeighboring) + cc.count(BallClass::EpsOutside) == 441);
  CHECK(cc.count(BallClass::EpsInside) >= 16);
  CHECK(cc.count(BallClass::EpsInside) <= 171);
  for (std::size_t i = 0; i < cc.classes.size(); ++i) {
    REQUIRE(cc.classes[i] == classify_distance(cc.center_distances[i], 0.1, 0.2));
  }

  const auto all_near = classify_covering(build_grid_covering(Box::cube(2, 0.0, 1.0), 0.1), s, 3.0);
  CHECK(all_near.count(BallClass::EpsOutside) == 0);

  const ZeroSet far{ZeroSetPrimitive::point(Point{5.0, 5.0})};
  const auto all_out = classify_covering(build_grid_covering(Box::cube(2, 0.0, 1.0), 0.1), far, 0.2);
  CHECK(all_out.count(BallClass::EpsOutside) == 441);
}

TEST_CASE("intersecting-ball counts obey the sandwich bound") {
  const auto s = example1_segment();
  for (double r : {0.09, 0.05, 0.02, 0.01}) {
    const auto cc = classify_covering(build_grid_covering(Box::cube(2, 0.0, 1.0), r), s, 2.0 * r);
    const double inside = static_cast<double>(cc.count(BallClass::EpsInside));
    CHECK(inside >= 2.0 * std::floor(1.0 / r - 2.0));
    CHECK(inside <= 9.0 * std::ceil(1.0 / r + 9.0));
  }
}

TEST_CASE("occupancy edge cases") {
  const auto s = example1_segment();
  const auto cc = classify_covering(build_grid_covering(Box::cube(2, 0.0, 1.0), 0.1), s, 0.2);

  const auto empty = count_occupancy(cc, batch_of(2, {}));
  for (const auto& pc : empty.per_class) CHECK(pc.fraction == 0.0);
  CHECK(empty.event_b);
  CHECK_FALSE(empty.event_a);

  // (0, 0) is an outside-ball center.
  const auto one = count_occupancy(cc, batch_of(2, {0.0, 0.0}));
  CHECK(one.points_per_ball[0] == 1);
  CHECK(one[BallClass::EpsOutside].nonempty >= 1);

  // A point on a ball's boundary is not inside it. Step 0.125 keeps the
  // distances exact.
  const auto coarse = classify_covering(build_grid_covering(Box::cube(2, 0.0, 1.0), 0.25), s, 0.5);
  const auto boundary = count_occupancy(coarse, batch_of(2, {0.5, 0.0}));
  CHECK(boundary.points_per_ball[coarse.covering.flat_index(std::vector<std::size_t>{2, 0})] == 0);
  CHECK(boundary.points_per_ball[coarse.covering.flat_index(std::vector<std::size_t>{4, 0})] == 1);
  CHECK(boundary.points_per_ball[coarse.covering.flat_index(std::vector<std::size_t>{6, 0})] == 0);

  CHECK_THROWS_AS(count_occupancy(cc, batch_of(1, {0.5})), std::invalid_argument);
}

TEST_CASE("outside balls fill faster than inside balls") {
  const auto m = catalog_model("powerlaw4_segment");
  const std::size_t n = 10000;
  const double r = 0.4 * std::pow(n, -0.21);
  const double eps = 0.4 * std::pow(n, -0.01);
  const auto cc = classify_covering(build_grid_covering(Box::cube(2, 0.0, 1.0), r), *m.zero_set(), eps);
  const auto occ = count_occupancy(cc, sample(m, n, 2024));
  CHECK(occ[BallClass::EpsOutside].fraction > occ[BallClass::EpsInside].fraction);
}

TEST_CASE("covering CSV") {
  const auto cc = classify_covering(build_grid_covering(Box::cube(1, 0.0, 1.0), 0.5),
                                    ZeroSet{ZeroSetPrimitive::point(Point{0.0})}, 1.0);
  std::vector<std::uint32_t> counts{2, 0, 1};
  std::ostringstream os;
  write_covering_csv(os, cc, counts);
  CHECK(os.str() == "center_1,radius,class,n_points\n0,0.5,inside,2\n0.5,0.5,neighboring,0\n1,0.5,outside,1\n");
}

TEST_CASE("covering numbers of primitives") {
  CHECK(covering_number(ZeroSetPrimitive::segment(Point{0.0, 0.0}, Point{0.5, 0.0}), 0.05).upper == 5.0);
  CHECK(covering_number(ZeroSetPrimitive::point(Point{0.3}), 0.001).upper == 1.0);
  const auto box = covering_number(ZeroSetPrimitive::box(Point{0.0, 0.0}, Point{1.0, 1.0}), 0.1);
  CHECK(box.lower <= box.upper);
  CHECK_THROWS_AS(covering_number(ZeroSetPrimitive::point(Point{0.3}), 0.0), std::invalid_argument);
}

TEST_CASE("box-counting dimension") {
  const std::vector<double> deltas{0.05, 0.025, 0.0125, 0.00625};
  const auto seg = box_counting_dimension(example1_segment(), deltas);
  CHECK(std::abs(seg.upper_estimate - 1.0) <= 0.15);
  CHECK(std::abs(seg.lower_estimate - 1.0) <= 0.15);
  CHECK(seg.counts.size() == 4);

  const auto pt = box_counting_dimension(ZeroSet{ZeroSetPrimitive::point(Point{0.1, 0.1})}, deltas);
  CHECK(pt.upper_estimate == 0.0);
  CHECK(pt.counts[0] == 1.0);

  const auto sq = box_counting_dimension(ZeroSet{ZeroSetPrimitive::box(Point{0.0, 0.0, 0.5}, Point{1.0, 1.0, 0.5})},
                                         std::vector<double>{0.05, 0.02, 0.01, 0.005});
  CHECK(std::abs(sq.upper_estimate - 2.0) <= 0.15);

  CHECK_THROWS_AS(box_counting_dimension(example1_segment(), std::vector<double>{0.05, 0.025, 0.0125}),
                  std::invalid_argument);
  CHECK_THROWS_AS(box_counting_dimension(example1_segment(), std::vector<double>{0.05, 0.025, 0.03, 0.001}),
                  std::invalid_argument);
  CHECK_THROWS_AS(box_counting_dimension(example1_segment(), std::vector<double>{0.05, 0.04, 0.03, 0.02}),
                  std::invalid_argument);
}
