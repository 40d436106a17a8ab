// Pilot Monte Carlo run that calibrates the acceptance thresholds for the
// heatmap dichotomy and the reconstruction check. Writes a JSON fixture.
//
//   zdr_pilot [--replications 200] [--out tests/fixtures/pilot_thresholds.json]
//
// Pilot seeds come from their own base so they never overlap the seeds the
// acceptance run draws.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "zdr/experiments.hpp"

using namespace zdr;

namespace {

constexpr std::uint64_t kHeatmapBase = 0x70110f;
constexpr std::uint64_t kReconBase = 0x70110e;

double binomial_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrate acceptance thresholds", "zdr_pilot"};
  std::size_t reps = 200;
  std::string out_path = "tests/fixtures/pilot_thresholds.json";
  app.add_option("--replications", reps)->check(CLI::PositiveNumber);
  app.add_option("--out", out_path);
  CLI11_PARSE(app, argc, argv);

  const double R = static_cast<double>(reps);

  // Heatmaps: n = 10^4, 100 bins.
  const auto f = catalog_model("f_quadratic");
  const auto h = catalog_model("h_parabolic");
  std::size_t f_hole = 0, h_gap = 0;
  for (std::size_t k = 0; k < reps; ++k) {
    const auto fo = heatmap_1d(f, 10000, 100, derive_trial_seed(kHeatmapBase, 2 * k));
    f_hole += fo[49] == 0 && fo[50] == 0;
    const auto ho = heatmap_1d(h, 10000, 100, derive_trial_seed(kHeatmapBase, 2 * k + 1));
    h_gap += std::any_of(ho.begin(), ho.end(), [](std::uint8_t v) { return v == 0; });
  }
  const double p_f = static_cast<double>(f_hole) / R;
  const double p_h = static_cast<double>(h_gap) / R;
  // The acceptance run also uses `reps` seeds, so the margin it observes has
  // standard error sqrt(se_f^2 + se_h^2); allow three of them.
  const double margin = p_f - p_h - 3.0 * std::hypot(binomial_se(p_f, R), binomial_se(p_h, R));

  // Reconstruction: PowerLaw segment model at n = 10^4, M_r = M_eps = 0.4.
  const auto m = catalog_model("powerlaw4_segment");
  const double n = 10000.0;
  const double r = 0.4 * std::pow(n, -0.21), eps = 0.4 * std::pow(n, -0.01);
  std::size_t within = 0;
  for (std::size_t k = 0; k < reps; ++k) {
    const auto det = run_detect(m, Box::cube(2, 0.0, 1.0), 10000, r, eps, derive_trial_seed(kReconBase, k));
    within += det.reconstruction.directed_hausdorff_from_S0 <= eps + r;
  }
  const double p_rec = static_cast<double>(within) / R;
  // Acceptance uses 50 seeds; three binomial SEs plus one seed of slack.
  const double rec_threshold = std::max(0.0, p_rec - 3.0 * binomial_se(p_rec, 50.0) - 1.0 / 50.0);

  const nlohmann::json j = {
      {"replications", reps},
      {"heatmap",
       {{"n", 10000},
        {"bins", 100},
        {"p_f_central_empty", p_f},
        {"p_h_any_empty", p_h},
        {"min_margin", margin},
        {"min_f_central_empty", std::max(0.0, p_f - 3.0 * binomial_se(p_f, R))}}},
      {"reconstruction",
       {{"n", 10000}, {"seeds", 50}, {"p_within", p_rec}, {"min_fraction_within", rec_threshold}}}};

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << '\n';
    return 1;
  }
  out << j.dump(2) << '\n';
  std::cout << j.dump(2) << '\n';
  return 0;
}
