#include "zdr/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace zdr {

namespace {

// 15 Kronrod nodes on [-1, 1] with Kronrod weights and the embedded Gauss-7
// weights (zero on Kronrod-only nodes).
struct Rule {
  std::vector<double> nodes;
  std::vector<double> kronrod;
  std::vector<double> gauss;
};

const Rule& rule() {
  static const Rule r = [] {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& xk = gauss_kronrod<double, 15>::abscissa();
    const auto& wk = gauss_kronrod<double, 15>::weights();
    const auto& xg = gauss<double, 7>::abscissa();
    const auto& wg = gauss<double, 7>::weights();
    auto gauss_weight = [&](double x) {
      for (std::size_t j = 0; j < xg.size(); ++j) {
        if (std::abs(xg[j] - std::abs(x)) < 1e-14) return static_cast<double>(wg[j]);
      }
      return 0.0;
    };
    Rule out;
    for (std::size_t i = xk.size(); i-- > 1;) {
      out.nodes.push_back(-xk[i]);
      out.kronrod.push_back(wk[i]);
      out.gauss.push_back(gauss_weight(xk[i]));
    }
    for (std::size_t i = 0; i < xk.size(); ++i) {
      out.nodes.push_back(xk[i]);
      out.kronrod.push_back(wk[i]);
      out.gauss.push_back(gauss_weight(xk[i]));
    }
    return out;
  }();
  return r;
}

struct Cell {
  std::vector<double> lo;
  std::vector<double> hi;
  double value = 0.0;
  double error = 0.0;
};

struct WorseFirst {
  bool operator()(const Cell& a, const Cell& b) const { return a.error < b.error; }
};

void evaluate_cell(const Integrand& f, Cell& cell, std::size_t& evals) {
  const Rule& r = rule();
  const std::size_t d = cell.lo.size();
  const std::size_t m = r.nodes.size();
  std::vector<double> half(d), mid(d), x(d);
  double jac = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    half[i] = 0.5 * (cell.hi[i] - cell.lo[i]);
    mid[i] = 0.5 * (cell.hi[i] + cell.lo[i]);
    jac *= half[i];
  }
  std::vector<std::size_t> idx(d, 0);
  double k = 0.0, g = 0.0;
  for (;;) {
    double wk = 1.0, wg = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = mid[i] + half[i] * r.nodes[idx[i]];
      wk *= r.kronrod[idx[i]];
      wg *= r.gauss[idx[i]];
    }
    const double fx = f(x);
    ++evals;
    k += wk * fx;
    g += wg * fx;
    std::size_t axis = 0;
    while (axis < d && ++idx[axis] == m) idx[axis++] = 0;
    if (axis == d) break;
  }
  cell.value = k * jac;
  cell.error = std::abs(k - g) * jac;
}

}  // namespace

QuadratureResult integrate_box(const Integrand& f, const Box& box,
                               const std::vector<std::vector<double>>& breakpoints, double rel_tol,
                               double abs_tol, std::size_t max_cells) {
  const std::size_t d = box.dim();
  std::vector<std::vector<double>> cuts(d);
  for (std::size_t i = 0; i < d; ++i) {
    cuts[i].push_back(box.lower()[i]);
    if (i < breakpoints.size()) {
      for (double b : breakpoints[i]) {
        if (b > box.lower()[i] && b < box.upper()[i]) cuts[i].push_back(b);
      }
    }
    cuts[i].push_back(box.upper()[i]);
    std::sort(cuts[i].begin(), cuts[i].end());
    cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
  }

  QuadratureResult res;
  std::priority_queue<Cell, std::vector<Cell>, WorseFirst> heap;
  double total = 0.0, total_err = 0.0;

  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    Cell c;
    c.lo.resize(d);
    c.hi.resize(d);
    bool empty = false;
    for (std::size_t i = 0; i < d; ++i) {
      c.lo[i] = cuts[i][idx[i]];
      c.hi[i] = cuts[i][idx[i] + 1];
      empty = empty || !(c.hi[i] > c.lo[i]);
    }
    if (!empty) {
      evaluate_cell(f, c, res.evaluations);
      total += c.value;
      total_err += c.error;
      heap.push(std::move(c));
    }
    std::size_t axis = 0;
    while (axis < d && ++idx[axis] == cuts[axis].size() - 1) idx[axis++] = 0;
    if (axis == d) break;
  }

  while (!heap.empty() && total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (heap.size() >= max_cells) break;
    Cell worst = heap.top();
    heap.pop();
    total -= worst.value;
    total_err -= worst.error;
    std::size_t axis = 0;
    for (std::size_t i = 1; i < d; ++i) {
      if (worst.hi[i] - worst.lo[i] > worst.hi[axis] - worst.lo[axis]) axis = i;
    }
    const double split = 0.5 * (worst.lo[axis] + worst.hi[axis]);
    Cell left = worst, right = worst;
    left.hi[axis] = split;
    right.lo[axis] = split;
    for (Cell* c : {&left, &right}) {
      evaluate_cell(f, *c, res.evaluations);
      total += c->value;
      total_err += c->error;
      heap.push(std::move(*c));
    }
  }

  // Re-sum to shed accumulated cancellation from the running totals.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  res.value = total;
  res.error = total_err;
  res.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
  return res;
}

QuadratureResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, double abs_tol, std::size_t max_intervals) {
  QuadratureResult res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  const Rule& q = rule();
  struct Piece {
    double lo, hi, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto apply = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double k = 0.0, g = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double v = f(mid + half * q.nodes[i]);
      k += q.kronrod[i] * v;
      g += q.gauss[i] * v;
    }
    res.evaluations += q.nodes.size();
    return Piece{lo, hi, half * k, half * std::abs(k - g)};
  };
  // Worst-first bisection. The absolute floor stops refinement of integrals
  // whose value is at round-off level, where a purely relative test never
  // succeeds.
  std::priority_queue<Piece> heap;
  heap.push(apply(a, b));
  double total = heap.top().value, err = heap.top().error;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && heap.size() < max_intervals) {
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;
    heap.pop();
    const Piece l = apply(worst.lo, mid), r = apply(mid, worst.hi);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed the drift of incremental updates.
  total = 0.0;
  err = 0.0;
  for (; !heap.empty(); heap.pop()) {
    total += heap.top().value;
    err += heap.top().error;
  }
  res.value = total;
  res.error = err;
  res.converged = err <= std::max(abs_tol, rel_tol * std::abs(total));
  return res;
}

}  // namespace zdr
