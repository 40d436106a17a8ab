#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "zdr/geometry.hpp"
#include "zdr/sampling.hpp"

namespace zdr {

/// Equal-radius balls centered on the lattice region.lower + step * Z^d,
/// step = r / d, restricted to the region.
class GridCovering {
 public:
  GridCovering(Box region, double radius);

  const Box& region() const noexcept { return region_; }
  double radius() const noexcept { return radius_; }
  double grid_step() const noexcept { return step_; }
  std::size_t dim() const noexcept { return region_.dim(); }
  std::size_t size() const noexcept { return size_; }
  const std::vector<std::size_t>& counts_per_axis() const noexcept { return counts_; }

  std::span<const double> center(std::size_t i) const noexcept { return {centers_.data() + i * dim(), dim()}; }
  Ball ball(std::size_t i) const;
  std::vector<Ball> balls() const;

  /// Row-major ball index of a lattice multi-index (first axis fastest).
  std::size_t flat_index(std::span<const std::size_t> idx) const noexcept;

 private:
  Box region_;
  double radius_;
  double step_;
  std::vector<std::size_t> counts_;
  std::size_t size_ = 0;
  std::vector<double> centers_;
};

/// Throws std::invalid_argument unless 0 < r <= min_side / 2.
GridCovering build_grid_covering(const Box& region, double r);

enum class BallClass : std::uint8_t { EpsOutside = 0, EpsNeighboring = 1, EpsInside = 2 };

std::string_view to_string(BallClass c) noexcept;

/// Class from the center's distance to S0: inside if < r, neighboring if in
/// [r, eps), outside if >= eps.
BallClass classify_distance(double center_distance, double r, double eps) noexcept;

/// Throws std::invalid_argument if eps < 2r (every eps-inside ball must lie in B_eps(S0)).
BallClass classify_ball(const Ball& b, const ZeroSet& s, double eps);

struct ClassifiedCovering {
  GridCovering covering;
  double eps;
  std::vector<BallClass> classes;
  std::vector<double> center_distances;
  std::array<std::size_t, 3> counts{};

  std::size_t count(BallClass c) const noexcept { return counts[static_cast<std::size_t>(c)]; }
};

ClassifiedCovering classify_covering(const GridCovering& c, const ZeroSet& s, double eps);

struct ClassOccupancy {
  std::size_t balls = 0;
  std::size_t nonempty = 0;
  double fraction = 0.0;  // 0 when the class has no balls
};

struct OccupancyCounts {
  std::vector<std::uint32_t> points_per_ball;
  std::array<ClassOccupancy, 3> per_class{};
  bool event_a = false;  // no empty eps-outside balls
  bool event_b = false;  // all eps-inside balls are empty

  const ClassOccupancy& operator[](BallClass c) const noexcept { return per_class[static_cast<std::size_t>(c)]; }
};

/// A ball is nonempty iff some sample lies strictly inside it.
OccupancyCounts count_occupancy(const ClassifiedCovering& c, const SampleBatch& batch);

/// Summarizes per-ball counts against a classification.
OccupancyCounts summarize_occupancy(const ClassifiedCovering& c, std::vector<std::uint32_t> points_per_ball);

/// CSV: center_1..center_d,radius,class,n_points.
void write_covering_csv(std::ostream& os, const ClassifiedCovering& c, std::span<const std::uint32_t> points_per_ball);

/// Closed-form bounds on the minimal number of radius-delta balls covering a primitive.
struct CoveringNumber {
  double upper;
  double lower;
};
CoveringNumber covering_number(const ZeroSetPrimitive& p, double delta);

struct BoxCountingResult {
  double upper_estimate;  // max slope of log N vs log(1/delta)
  double lower_estimate;  // min slope
  std::vector<double> deltas;
  std::vector<double> counts;        // N_delta used for the estimate (sum of upper counts)
  std::vector<double> lower_counts;  // sum of per-component lower bounds
};

/// Requires >= 4 strictly decreasing deltas spanning a ratio of at least 8.
BoxCountingResult box_counting_dimension(const ZeroSet& s, std::span<const double> deltas);

}  // namespace zdr
