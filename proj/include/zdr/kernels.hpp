#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a *_serial counterpart
// that tests treat as the reference and bench/ times against.

#include <cstdint>
#include <span>
#include <vector>

#include "zdr/covering.hpp"
#include "zdr/density.hpp"
#include "zdr/quadrature.hpp"

namespace zdr::kernels {

/// Caps OpenMP parallelism (n >= 1). Results never depend on the setting.
void set_threads(int n);
int max_threads();

/// d(center_i, S0) for every ball.
std::vector<double> center_distances(const GridCovering& c, const ZeroSet& s);
std::vector<double> center_distances_serial(const GridCovering& c, const ZeroSet& s);

/// Number of points strictly inside each ball. `coords` is row-major with the
/// covering's dimension. The parallel version buckets points into lattice
/// cells of side grid_step and scans the cells around each ball; the serial
/// reference checks every (ball, point) pair.
std::vector<std::uint32_t> points_per_ball(const GridCovering& c, std::span<const double> coords);
std::vector<std::uint32_t> points_per_ball_serial(const GridCovering& c, std::span<const double> coords);

/// min f over grid points x of `region` (spacing <= step) with d(x, S0) >= eps
/// and x in the support; +inf if there are none.
double grid_minimum(const DensityModel& model, double eps, const Box& region, double step);
double grid_minimum_serial(const DensityModel& model, double eps, const Box& region, double step);

/// Composite 5-point Gauss-Legendre over a uniform cells_per_axis^d partition
/// (0 picks a size keeping evaluations near 2e5).
double tensor_gauss_legendre(const Integrand& f, const Box& box, std::size_t cells_per_axis = 0);

}  // namespace zdr::kernels
