#include "zdr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zdr::kernels {

void set_threads(int n) {
  if (n < 1) throw std::invalid_argument("set_threads: n must be >= 1");
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<double> center_distances(const GridCovering& c, const ZeroSet& s) {
  if (s.ambient_dim() != c.dim()) throw std::invalid_argument("center_distances: dimension mismatch");
  const auto n = static_cast<std::ptrdiff_t>(c.size());
  std::vector<double> out(c.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = s.distance(c.center(static_cast<std::size_t>(i)));
  return out;
}

std::vector<double> center_distances_serial(const GridCovering& c, const ZeroSet& s) {
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = s.distance(c.center(i));
  return out;
}

namespace {

// Points bucketed by lattice cell. Cell j along an axis spans
// [lower + j*step, lower + (j+1)*step); cells are kept for
// j in [-(d+1), count + d], which contains every point within r = d*step of a center.
struct CellIndex {
  std::size_t d = 0;
  std::vector<long> dims;    // cells per axis
  long offset = 0;           // d + 1
  std::vector<std::size_t> start;  // CSR offsets, size = n_cells + 1
  std::vector<double> coords;      // points grouped by cell

  long cell_of(double x, std::size_t axis, const GridCovering& c) const {
    return static_cast<long>(std::floor((x - c.region().lower()[axis]) / c.grid_step())) + offset;
  }
};

CellIndex build_index(const GridCovering& c, std::span<const double> coords) {
  CellIndex idx;
  idx.d = c.dim();
  idx.offset = static_cast<long>(idx.d) + 1;
  std::size_t n_cells = 1;
  for (std::size_t i = 0; i < idx.d; ++i) {
    idx.dims.push_back(static_cast<long>(c.counts_per_axis()[i]) + 2 * idx.offset);
    n_cells *= static_cast<std::size_t>(idx.dims.back());
  }
  const std::size_t n = coords.size() / idx.d;
  std::vector<std::size_t> cell_of_point(n, n_cells);
  std::vector<std::size_t> counts(n_cells + 1, 0);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t flat = 0;
    bool inside = true;
    for (std::size_t i = idx.d; i-- > 0;) {
      const double x = coords[p * idx.d + i];
      if (!std::isfinite(x)) {
        inside = false;
        break;
      }
      const long k = idx.cell_of(x, i, c);
      if (k < 0 || k >= idx.dims[i]) {
        inside = false;
        break;
      }
      flat = flat * static_cast<std::size_t>(idx.dims[i]) + static_cast<std::size_t>(k);
    }
    if (inside) {
      cell_of_point[p] = flat;
      ++counts[flat + 1];
    }
  }
  for (std::size_t k = 0; k < n_cells; ++k) counts[k + 1] += counts[k];
  idx.start = counts;
  idx.coords.resize(counts[n_cells] * idx.d);
  std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
  for (std::size_t p = 0; p < n; ++p) {
    if (cell_of_point[p] == n_cells) continue;
    const std::size_t slot = fill[cell_of_point[p]]++;
    std::copy_n(coords.begin() + static_cast<std::ptrdiff_t>(p * idx.d), idx.d,
                idx.coords.begin() + static_cast<std::ptrdiff_t>(slot * idx.d));
  }
  return idx;
}

}  // namespace

std::vector<std::uint32_t> points_per_ball(const GridCovering& c, std::span<const double> coords) {
  const std::size_t d = c.dim();
  if (coords.size() % d != 0) throw std::invalid_argument("points_per_ball: coordinate count not a multiple of d");
  const CellIndex idx = build_index(c, coords);
  const double r = c.radius();
  const long reach = static_cast<long>(d) + 1;
  const auto n_balls = static_cast<std::ptrdiff_t>(c.size());
  std::vector<std::uint32_t> out(c.size(), 0);

#pragma omp parallel
  {
    std::vector<long> lo(d), hi(d), cell(d);
    std::vector<std::size_t> lattice(d);
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < n_balls; ++b) {
      // Recover the lattice multi-index (first axis fastest).
      std::size_t rem = static_cast<std::size_t>(b);
      for (std::size_t i = 0; i < d; ++i) {
        lattice[i] = rem % c.counts_per_axis()[i];
        rem /= c.counts_per_axis()[i];
        lo[i] = static_cast<long>(lattice[i]) - reach + idx.offset;
        hi[i] = static_cast<long>(lattice[i]) + reach - 1 + idx.offset;
        cell[i] = lo[i];
      }
      const auto ctr = c.center(static_cast<std::size_t>(b));
      std::uint32_t count = 0;
      for (;;) {
        std::size_t flat = 0;
        for (std::size_t i = d; i-- > 0;) flat = flat * static_cast<std::size_t>(idx.dims[i]) + static_cast<std::size_t>(cell[i]);
        for (std::size_t p = idx.start[flat]; p < idx.start[flat + 1]; ++p) {
          double d2 = 0.0;
          for (std::size_t i = 0; i < d; ++i) {
            const double diff = idx.coords[p * d + i] - ctr[i];
            d2 += diff * diff;
          }
          if (std::sqrt(d2) < r) ++count;
        }
        std::size_t axis = 0;
        while (axis < d && ++cell[axis] > hi[axis]) cell[axis] = lo[axis], ++axis;
        if (axis == d) break;
      }
      out[static_cast<std::size_t>(b)] = count;
    }
  }
  return out;
}

std::vector<std::uint32_t> points_per_ball_serial(const GridCovering& c, std::span<const double> coords) {
  const std::size_t d = c.dim();
  if (coords.size() % d != 0) throw std::invalid_argument("points_per_ball: coordinate count not a multiple of d");
  const std::size_t n = coords.size() / d;
  std::vector<std::uint32_t> out(c.size(), 0);
  for (std::size_t b = 0; b < c.size(); ++b) {
    const auto ctr = c.center(b);
    for (std::size_t p = 0; p < n; ++p) {
      if (euclidean_distance(coords.subspan(p * d, d), ctr) < c.radius()) ++out[b];
    }
  }
  return out;
}

namespace {

struct GridSpec {
  std::vector<std::size_t> counts;
  std::size_t total = 1;
};

GridSpec grid_spec(const Box& region, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid_minimum: step must be positive");
  GridSpec g;
  for (std::size_t i = 0; i < region.dim(); ++i) {
    g.counts.push_back(static_cast<std::size_t>(std::ceil(region.side(i) / step)) + 1);
    g.total *= g.counts.back();
  }
  return g;
}

double grid_point_value(const DensityModel& model, double eps, const Box& region, const GridSpec& g, std::size_t k,
                        std::vector<double>& x) {
  const std::size_t d = region.dim();
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t j = k % g.counts[i];
    k /= g.counts[i];
    const double denom = g.counts[i] > 1 ? static_cast<double>(g.counts[i] - 1) : 1.0;
    x[i] = region.lower()[i] + region.side(i) * static_cast<double>(j) / denom;
  }
  if (!model.support().contains(x)) return std::numeric_limits<double>::infinity();
  if (model.zero_set() && model.zero_set()->distance(x) < eps) return std::numeric_limits<double>::infinity();
  return model.evaluate(x);
}

}  // namespace

double grid_minimum(const DensityModel& model, double eps, const Box& region, double step) {
  const GridSpec g = grid_spec(region, step);
  const auto total = static_cast<std::ptrdiff_t>(g.total);
  double best = std::numeric_limits<double>::infinity();
#pragma omp parallel
  {
    std::vector<double> x(region.dim());
#pragma omp for schedule(static) reduction(min : best)
    for (std::ptrdiff_t k = 0; k < total; ++k) {
      best = std::min(best, grid_point_value(model, eps, region, g, static_cast<std::size_t>(k), x));
    }
  }
  return best;
}

double grid_minimum_serial(const DensityModel& model, double eps, const Box& region, double step) {
  const GridSpec g = grid_spec(region, step);
  std::vector<double> x(region.dim());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.total; ++k) best = std::min(best, grid_point_value(model, eps, region, g, k, x));
  return best;
}

double tensor_gauss_legendre(const Integrand& f, const Box& box, std::size_t cells_per_axis) {
  const std::size_t d = box.dim();
  const auto& xa = boost::math::quadrature::gauss<double, 5>::abscissa();
  const auto& wa = boost::math::quadrature::gauss<double, 5>::weights();
  std::vector<double> nodes, weights;
  for (std::size_t i = xa.size(); i-- > 1;) {
    nodes.push_back(-xa[i]);
    weights.push_back(wa[i]);
  }
  for (std::size_t i = 0; i < xa.size(); ++i) {
    nodes.push_back(xa[i]);
    weights.push_back(wa[i]);
  }
  const std::size_t m = nodes.size();
  if (cells_per_axis == 0) {
    const double budget = 2e5 / std::pow(static_cast<double>(m), static_cast<double>(d));
    cells_per_axis = std::max<std::size_t>(4, static_cast<std::size_t>(std::pow(budget, 1.0 / static_cast<double>(d))));
    cells_per_axis = std::min<std::size_t>(cells_per_axis, 1 << 14);
    cells_per_axis -= cells_per_axis % 4;  // keeps quarter points on cell edges
  }
  std::size_t n_cells = 1;
  for (std::size_t i = 0; i < d; ++i) n_cells *= cells_per_axis;
  const std::size_t per_cell = static_cast<std::size_t>(std::pow(static_cast<double>(m), static_cast<double>(d)) + 0.5);

  double total = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(n_cells);
#pragma omp parallel
  {
    std::vector<double> x(d);
#pragma omp for schedule(static) reduction(+ : total)
    for (std::ptrdiff_t cidx = 0; cidx < n; ++cidx) {
      std::size_t rem = static_cast<std::size_t>(cidx);
      std::vector<double> lo(d), h(d);
      double jac = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t j = rem % cells_per_axis;
        rem /= cells_per_axis;
        h[i] = box.side(i) / static_cast<double>(cells_per_axis);
        lo[i] = box.lower()[i] + h[i] * static_cast<double>(j);
        jac *= 0.5 * h[i];
      }
      double cell_sum = 0.0;
      for (std::size_t q = 0; q < per_cell; ++q) {
        std::size_t r = q;
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
          const std::size_t j = r % m;
          r /= m;
          x[i] = lo[i] + 0.5 * h[i] * (nodes[j] + 1.0);
          w *= weights[j];
        }
        cell_sum += w * f(x);
      }
      total += cell_sum * jac;
    }
  }
  return total;
}

}  // namespace zdr::kernels
