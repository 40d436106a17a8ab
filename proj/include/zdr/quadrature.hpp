#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "zdr/geometry.hpp"

namespace zdr {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum of per-cell |Kronrod - Gauss| estimates
  std::size_t evaluations = 0;
  bool converged = false;
};

using Integrand = std::function<double(std::span<const double>)>;

/// Global adaptive tensor-product Gauss-Kronrod (G7/K15) cubature over a box.
///
/// `breakpoints[i]` lists interior coordinates along axis i where the
/// integrand is known to be non-smooth; the initial partition splits there.
/// Cells are bisected along their longest side, worst error first, until the
/// summed error is below max(abs_tol, rel_tol * |value|) or max_cells is hit.
QuadratureResult integrate_box(const Integrand& f, const Box& box,
                               const std::vector<std::vector<double>>& breakpoints = {},
                               double rel_tol = 1e-10, double abs_tol = 1e-14,
                               std::size_t max_cells = 200000);

/// Global adaptive 1-D Gauss-Kronrod (G7/K15) on [a, b]; stops once the
/// summed error is below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-12, double abs_tol = 1e-15,
                                    std::size_t max_intervals = 4000);

}  // namespace zdr
