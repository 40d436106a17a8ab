#include "zdr/covering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "zdr/kernels.hpp"
#include "zdr/rates.hpp"

namespace zdr {

namespace {

// Guards floor/ceil of ratios that are integers in exact arithmetic.
constexpr double kLatticeSlack = 1e-9;

double log_log_slope(double n0, double n1, double d0, double d1) {
  return std::log(n1 / n0) / std::log(d0 / d1);
}

}  // namespace

GridCovering::GridCovering(Box region, double radius) : region_(std::move(region)), radius_(radius) {
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw std::invalid_argument("build_grid_covering: radius must be positive");
  }
  if (!(radius_ <= region_.min_side() / 2.0)) {
    throw std::invalid_argument("build_grid_covering: radius " + std::to_string(radius_) +
                                " must not exceed half the shortest region side");
  }
  const std::size_t d = region_.dim();
  step_ = radius_ / static_cast<double>(d);
  counts_.resize(d);
  size_ = 1;
  for (std::size_t i = 0; i < d; ++i) {
    counts_[i] = static_cast<std::size_t>(std::floor(region_.side(i) / step_ + kLatticeSlack)) + 1;
    size_ *= counts_[i];
  }
  centers_.resize(size_ * d);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t k = 0; k < size_; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      centers_[k * d + i] = std::min(region_.lower()[i] + static_cast<double>(idx[i]) * step_, region_.upper()[i]);
    }
    std::size_t axis = 0;
    while (axis < d && ++idx[axis] == counts_[axis]) idx[axis++] = 0;
  }
}

Ball GridCovering::ball(std::size_t i) const {
  const auto c = center(i);
  return Ball(Point(std::vector<double>(c.begin(), c.end())), radius_);
}

std::vector<Ball> GridCovering::balls() const {
  std::vector<Ball> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(ball(i));
  return out;
}

std::size_t GridCovering::flat_index(std::span<const std::size_t> idx) const noexcept {
  std::size_t k = 0;
  for (std::size_t i = dim(); i-- > 0;) k = k * counts_[i] + idx[i];
  return k;
}

GridCovering build_grid_covering(const Box& region, double r) { return GridCovering(region, r); }

std::string_view to_string(BallClass c) noexcept {
  switch (c) {
    case BallClass::EpsOutside:
      return "outside";
    case BallClass::EpsNeighboring:
      return "neighboring";
    case BallClass::EpsInside:
      return "inside";
  }
  return "?";
}

BallClass classify_distance(double center_distance, double r, double eps) noexcept {
  if (center_distance < r) return BallClass::EpsInside;
  if (center_distance < eps) return BallClass::EpsNeighboring;
  return BallClass::EpsOutside;
}

BallClass classify_ball(const Ball& b, const ZeroSet& s, double eps) {
  if (eps < 2.0 * b.radius()) {
    throw std::invalid_argument("classify_ball: requires r <= eps/2 so every eps-inside ball lies in B_eps(S0)");
  }
  return classify_distance(s.distance(b.center().coords()), b.radius(), eps);
}

ClassifiedCovering classify_covering(const GridCovering& c, const ZeroSet& s, double eps) {
  if (eps < 2.0 * c.radius()) {
    throw std::invalid_argument("classify_covering: requires r <= eps/2 so every eps-inside ball lies in B_eps(S0)");
  }
  ClassifiedCovering out{c, eps, {}, kernels::center_distances(c, s), {}};
  out.classes.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    out.classes[i] = classify_distance(out.center_distances[i], c.radius(), eps);
    ++out.counts[static_cast<std::size_t>(out.classes[i])];
  }
  return out;
}

OccupancyCounts summarize_occupancy(const ClassifiedCovering& c, std::vector<std::uint32_t> points_per_ball) {
  if (points_per_ball.size() != c.classes.size()) throw std::invalid_argument("summarize_occupancy: size mismatch");
  OccupancyCounts out;
  for (std::size_t i = 0; i < c.classes.size(); ++i) {
    auto& slot = out.per_class[static_cast<std::size_t>(c.classes[i])];
    ++slot.balls;
    if (points_per_ball[i] > 0) ++slot.nonempty;
  }
  for (auto& slot : out.per_class) {
    slot.fraction = slot.balls ? static_cast<double>(slot.nonempty) / static_cast<double>(slot.balls) : 0.0;
  }
  const auto& outside = out[BallClass::EpsOutside];
  out.event_a = outside.nonempty == outside.balls;
  out.event_b = out[BallClass::EpsInside].nonempty == 0;
  out.points_per_ball = std::move(points_per_ball);
  return out;
}

OccupancyCounts count_occupancy(const ClassifiedCovering& c, const SampleBatch& batch) {
  if (batch.size() > 0 && batch.dim != c.covering.dim()) {
    throw std::invalid_argument("count_occupancy: sample dimension differs from covering dimension");
  }
  return summarize_occupancy(c, kernels::points_per_ball(c.covering, batch.coords));
}

void write_covering_csv(std::ostream& os, const ClassifiedCovering& c, std::span<const std::uint32_t> points_per_ball) {
  const std::size_t d = c.covering.dim();
  for (std::size_t i = 0; i < d; ++i) os << "center_" << i + 1 << ',';
  os << "radius,class,n_points\n";
  char buf[32];
  for (std::size_t k = 0; k < c.covering.size(); ++k) {
    const auto ctr = c.covering.center(k);
    for (std::size_t i = 0; i < d; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", ctr[i]);
      os << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", c.covering.radius());
    os << buf << ',' << to_string(c.classes[k]) << ',' << (points_per_ball.empty() ? 0u : points_per_ball[k]) << '\n';
  }
}

CoveringNumber covering_number(const ZeroSetPrimitive& p, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("covering_number: delta must be positive");
  return std::visit(
      [&](const auto& prim) -> CoveringNumber {
        using T = std::decay_t<decltype(prim)>;
        if constexpr (std::is_same_v<T, SinglePoint>) {
          return {1.0, 1.0};
        } else if constexpr (std::is_same_v<T, Segment>) {
          const double len = euclidean_distance(prim.a.coords(), prim.b.coords());
          const double n = std::max(1.0, std::ceil(len / (2.0 * delta) - kLatticeSlack));
          return {n, n};
        } else {
          // k-dimensional box: sub-cubes of side 2 delta / sqrt(k) fit in radius-delta balls.
          const int k = p.intrinsic_dimension();
          if (k == 0) return {1.0, 1.0};
          const double side = 2.0 * delta / std::sqrt(static_cast<double>(k));
          double upper = 1.0, vol = 1.0;
          for (std::size_t i = 0; i < prim.box.dim(); ++i) {
            const double s = prim.box.side(i);
            if (s > 0.0) {
              upper *= std::max(1.0, std::ceil(s / side - kLatticeSlack));
              vol *= s;
            }
          }
          const double lower = std::max(1.0, std::ceil(vol / ball_volume(static_cast<std::size_t>(k), delta) - kLatticeSlack));
          return {upper, lower};
        }
      },
      p.variant());
}

BoxCountingResult box_counting_dimension(const ZeroSet& s, std::span<const double> deltas) {
  if (deltas.size() < 4) throw std::invalid_argument("box_counting_dimension: need at least 4 deltas");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw std::invalid_argument("box_counting_dimension: deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) {
      throw std::invalid_argument("box_counting_dimension: deltas must be strictly decreasing");
    }
  }
  if (deltas.front() / deltas.back() < 8.0 - 1e-12) {
    throw std::invalid_argument("box_counting_dimension: deltas must span a ratio of at least 8");
  }
  BoxCountingResult out;
  out.deltas.assign(deltas.begin(), deltas.end());
  for (double delta : deltas) {
    double up = 0.0, lo = 0.0;
    for (const auto& c : s.components()) {
      const auto n = covering_number(c, delta);
      up += n.upper;
      lo += n.lower;
    }
    out.counts.push_back(up);
    out.lower_counts.push_back(lo);
  }
  out.upper_estimate = -std::numeric_limits<double>::infinity();
  out.lower_estimate = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
    const double slope = log_log_slope(out.counts[i], out.counts[i + 1], deltas[i], deltas[i + 1]);
    out.upper_estimate = std::max(out.upper_estimate, slope);
    out.lower_estimate = std::min(out.lower_estimate, slope);
  }
  return out;
}

}  // namespace zdr
