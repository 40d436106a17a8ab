#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zdr/covering.hpp"
#include "zdr/density.hpp"
#include "zdr/geometry.hpp"
#include "zdr/rates.hpp"

namespace zdr {

struct SweepConfig {
  std::string model_id;
  std::vector<std::uint64_t> ns;
  std::vector<double> m_r_values;
  std::vector<double> m_eps_values;
  double eta = 0.21;
  double psi = 0.01;
  std::size_t replications = 1;
  std::uint64_t base_seed = 0;

  /// Throws std::invalid_argument on empty grids, nonpositive values or zero replications.
  void validate() const;
};

struct OccupancyReport {
  std::uint64_t n;
  double m_r;
  double m_eps;
  std::size_t replication;
  std::uint64_t seed;
  double r;
  double eps;
  std::array<ClassOccupancy, 3> per_class;  // indexed by BallClass
  bool event_a;  // no empty eps-outside balls
  bool event_b;  // all eps-inside balls are empty

  const ClassOccupancy& operator[](BallClass c) const noexcept { return per_class[static_cast<std::size_t>(c)]; }
};

struct SkippedCell {
  std::uint64_t n;
  double m_r;
  double m_eps;
  std::string reason;
};

struct SweepResult {
  SweepConfig config;
  std::vector<OccupancyReport> rows;  // ordered by (n, m_r, m_eps, replication) as listed in the config
  std::vector<SkippedCell> skipped;
};

/// Every trial samples n points, covers the support with r(n)-balls and
/// classifies them with eps(n). Replication k at the i-th sample size uses
/// derive_trial_seed(base_seed, i * replications + k), so all (m_r, m_eps)
/// cells see the same samples. Cells violating 2r <= eps < 1 are skipped.
SweepResult run_sweep(const SweepConfig& cfg);

/// Per-cell averages over replications.
struct SweepSummary {
  std::uint64_t n;
  double m_r;
  double m_eps;
  std::size_t replications;
  std::array<double, 3> mean_fraction;  // indexed by BallClass
  double p_event_a;
  double p_event_b;
};
std::vector<SweepSummary> summarize_sweep(const SweepResult& res);

/// One row per (trial, class).
void write_sweep_csv(std::ostream& os, const SweepResult& res);
/// Small multiples: rows are sample sizes, columns are M_eps values; each
/// panel plots mean filled fraction against M_r, one line per class.
void write_sweep_svg(std::ostream& os, const SweepResult& res);

/// Occupancy of `bins` equal-width bins over [-1, 1] for n draws of a
/// univariate model. Entry b is 1 iff some draw falls in bin b.
std::vector<std::uint8_t> heatmap_1d(const DensityModel& model, std::size_t n, std::size_t bins, std::uint64_t seed);

struct HeatmapRow {
  std::string label;
  std::vector<std::uint8_t> occupied;
};
/// Tick strip per row: a vertical tick at the center of every occupied bin.
void write_heatmap_svg(std::ostream& os, std::span<const HeatmapRow> rows);

/// Estimate of S0: the centers of all empty balls (no knowledge of S0 used).
/// With an empty estimate both distances are +infinity.
struct ReconstructionResult {
  std::vector<Point> empty_ball_centers;
  double directed_hausdorff_to_S0;    // sup over the estimate of d(x, S0)
  double directed_hausdorff_from_S0;  // sup over S0 of d(s, estimate)
};

/// S0 is discretized at spacing grid_step / 16 (at most 4096 points per axis)
/// for the from-S0 direction; the to-S0 direction is exact.
ReconstructionResult reconstruct_S0(const GridCovering& c, std::span<const std::uint32_t> points_per_ball,
                                    const std::optional<ZeroSet>& s_true);

/// A single detection trial on `region`.
struct DetectResult {
  double r;
  double eps;
  std::uint64_t seed;
  ClassifiedCovering classified;
  OccupancyCounts occupancy;
  ReconstructionResult reconstruction;
};

/// n may be 0 (every ball empty). Requires eps >= 2r. Without a zero set
/// every ball is eps-outside.
DetectResult run_detect(const DensityModel& model, const Box& region, std::uint64_t n, double r, double eps,
                        std::uint64_t seed);

}  // namespace zdr
