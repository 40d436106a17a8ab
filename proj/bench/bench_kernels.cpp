// Serial references against the OpenMP kernels. Thread count is the second
// benchmark argument for the parallel variants.

#include <random>

#include <benchmark/benchmark.h>

#include "zdr/kernels.hpp"
#include "zdr/sampling.hpp"

using namespace zdr;

namespace {

const ZeroSet& segment() {
  static const ZeroSet s{ZeroSetPrimitive::segment(Point{0.5, 0.25}, Point{0.5, 0.75})};
  return s;
}

std::vector<double> uniform_coords(std::size_t n) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(2 * n);
  for (auto& x : c) x = u(g);
  return c;
}

void BM_CenterDistancesSerial(benchmark::State& st) {
  const auto c = build_grid_covering(Box::cube(2, 0.0, 1.0), 1.0 / static_cast<double>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::center_distances_serial(c, segment()));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * c.size()));
}

void BM_CenterDistances(benchmark::State& st) {
  kernels::set_threads(static_cast<int>(st.range(1)));
  const auto c = build_grid_covering(Box::cube(2, 0.0, 1.0), 1.0 / static_cast<double>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::center_distances(c, segment()));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * c.size()));
}

void BM_PointsPerBallSerial(benchmark::State& st) {
  const auto c = build_grid_covering(Box::cube(2, 0.0, 1.0), 0.02);
  const auto coords = uniform_coords(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::points_per_ball_serial(c, coords));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_PointsPerBall(benchmark::State& st) {
  kernels::set_threads(static_cast<int>(st.range(1)));
  const auto c = build_grid_covering(Box::cube(2, 0.0, 1.0), 0.02);
  const auto coords = uniform_coords(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::points_per_ball(c, coords));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_GridMinimumSerial(benchmark::State& st) {
  const auto m = catalog_model("example2");
  for (auto _ : st) benchmark::DoNotOptimize(kernels::grid_minimum_serial(m, 0.1, Box::cube(2, 0.0, 1.0), 0.002));
}

void BM_GridMinimum(benchmark::State& st) {
  kernels::set_threads(static_cast<int>(st.range(0)));
  const auto m = catalog_model("example2");
  for (auto _ : st) benchmark::DoNotOptimize(kernels::grid_minimum(m, 0.1, Box::cube(2, 0.0, 1.0), 0.002));
}

}  // namespace

BENCHMARK(BM_CenterDistancesSerial)->Arg(100)->Arg(400);
BENCHMARK(BM_CenterDistances)->ArgsProduct({{100, 400}, {1, 2, 4, 8}})->UseRealTime();
// The serial reference scans every ball per point, so it stays small.
BENCHMARK(BM_PointsPerBallSerial)->Arg(10000)->Arg(100000);
BENCHMARK(BM_PointsPerBall)->ArgsProduct({{10000, 1000000}, {1, 2, 4, 8}})->UseRealTime();
BENCHMARK(BM_GridMinimumSerial);
BENCHMARK(BM_GridMinimum)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime();

BENCHMARK_MAIN();
