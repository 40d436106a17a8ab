#include "zdr/rates.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <sstream>

namespace zdr {

namespace {

// Sum of terms, reported as exactly 0 when it is within round-off of 0.
// Decimal inputs such as 0.21 are not representable, so boundary cases like
// 1 - 0.84 - 0.16 would otherwise land on +-1e-16.
double affine_sum(std::initializer_list<double> terms) {
  double sum = 0.0, mag = 0.0;
  for (double t : terms) {
    sum += t;
    mag += std::abs(t);
  }
  return std::abs(sum) <= 16.0 * DBL_EPSILON * mag ? 0.0 : sum;
}

bool schedule_ok(const RateSchedule& s, double n) {
  const double r = s.m_r * std::pow(n, -s.eta);
  const double eps = s.m_eps * std::pow(n, -s.psi);
  return 2.0 * r <= eps && eps < 1.0;
}

}  // namespace

void RateSchedule::validate(std::size_t d) const {
  const double dd = static_cast<double>(d);
  if (!(eta > 0.0 && eta < 1.0 / dd)) throw std::invalid_argument("rate schedule: requires 0 < eta < 1/d");
  if (!(psi > 0.0 && psi <= eta)) throw std::invalid_argument("rate schedule: requires 0 < psi <= eta");
  if (!(xi > 0.0 && xi < (1.0 - 2.0 * eta * dd) / 2.0)) {
    throw std::invalid_argument("rate schedule: requires 0 < xi < (1 - 2 eta d)/2");
  }
  if (!(m_r > 0.0) || !(m_eps > 0.0)) throw std::invalid_argument("rate schedule: multipliers must be positive");
}

std::optional<std::uint64_t> minimal_valid_n(const RateSchedule& s) {
  if (!(s.m_r > 0.0) || !(s.m_eps > 0.0)) return std::nullopt;
  double lo = 1.0;
  const double ratio = 2.0 * s.m_r / s.m_eps;
  if (s.eta > s.psi) {
    lo = std::max(lo, std::pow(ratio, 1.0 / (s.eta - s.psi)));
  } else if (ratio > 1.0) {
    return std::nullopt;
  }
  if (s.psi > 0.0) {
    lo = std::max(lo, std::pow(s.m_eps, 1.0 / s.psi));
  } else if (s.m_eps >= 1.0) {
    return std::nullopt;
  }
  if (lo > 1e18) return std::nullopt;
  auto n = static_cast<std::uint64_t>(std::max(1.0, std::floor(lo) - 2.0));
  for (int i = 0; i < 8; ++i, ++n) {
    if (schedule_ok(s, static_cast<double>(n))) return n;
  }
  return std::nullopt;
}

ScheduleValues schedule_values(const RateSchedule& s, std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("schedule_values: n must be >= 1");
  const double nd = static_cast<double>(n);
  ScheduleValues v{s.m_r * std::pow(nd, -s.eta), s.m_eps * std::pow(nd, -s.psi)};
  const bool radius_ok = 2.0 * v.r <= v.eps;
  const bool eps_ok = v.eps < 1.0;
  if (!radius_ok || !eps_ok) {
    const auto min_n = minimal_valid_n(s);
    std::ostringstream msg;
    msg << "schedule infeasible at n=" << n << ": "
        << (radius_ok ? "eps(n) < 1 violated (eps=" : "2 r(n) <= eps(n) violated (2r=")
        << (radius_ok ? v.eps : 2.0 * v.r) << (radius_ok ? ")" : ", eps=") ;
    if (!radius_ok) msg << v.eps << ")";
    if (min_n) msg << "; schedule valid from n=" << *min_n;
    else msg << "; schedule never valid";
    throw InfeasibleError(msg.str(), min_n);
  }
  return v;
}

ConditionReport check_corollary1(std::size_t d, const std::vector<ComponentOrders>& components,
                                 const RateSchedule& s) {
  if (components.empty()) throw std::invalid_argument("check_corollary1: at least one component required");
  const double dd = static_cast<double>(d);
  ConditionReport rep{};
  rep.d = d;
  rep.components = components;
  rep.schedule = s;
  rep.condition_a_value = std::numeric_limits<double>::infinity();
  rep.condition_b_value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& c = components[k];
    if (c.d0 < 0 || static_cast<std::size_t>(c.d0) >= d) {
      throw std::invalid_argument("check_theorem1: requires 0 <= d0 < d");
    }
    const double a = affine_sum({1.0, -2.0 * s.eta * dd, -2.0 * c.upper_order * s.psi});
    const double b = affine_sum({1.0, c.d0 * s.eta, -c.lower_order * s.eta, -dd * s.eta});
    if (a < rep.condition_a_value) {
      rep.condition_a_value = a;
      rep.binding_a = k;
    }
    if (b > rep.condition_b_value) {
      rep.condition_b_value = b;
      rep.binding_b = k;
    }
  }
  rep.condition_a_holds = rep.condition_a_value > 0.0;
  rep.condition_b_holds = rep.condition_b_value < 0.0;
  rep.xi_condition_value = affine_sum({1.0, -2.0 * s.eta * dd, -2.0 * s.xi});
  rep.xi_condition_holds = rep.xi_condition_value > 0.0;
  return rep;
}

ConditionReport check_theorem1(std::size_t d, int d0, const SmoothnessOrders& orders, const RateSchedule& s) {
  return check_corollary1(d, {{d0, orders.upper_order, orders.lower_order}}, s);
}

double ball_volume(std::size_t d, double r) {
  if (d < 1) throw std::invalid_argument("ball_volume: d must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("ball_volume: r must be positive");
  const double half = static_cast<double>(d) / 2.0;
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0) + static_cast<double>(d) * std::log(r));
}

double hoeffding_bound(double n, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("hoeffding_bound: gamma must be positive");
  return std::max(0.0, 1.0 - 2.0 * std::exp(-2.0 * gamma * gamma * n));
}

double inside_ball_mass_upper(const SmoothnessOrders& orders, std::size_t d, double r) {
  return orders.upper_constant * ball_volume(d, r) * std::pow(2.0 * r, orders.lower_order);
}

double outside_ball_mass_lower(const SmoothnessOrders& orders, std::size_t d, double r, double eps, double m_f,
                               bool boundary) {
  if (!(eps > r)) throw std::invalid_argument("outside_ball_mass_lower: requires eps > r");
  const double near = orders.lower_constant * std::pow(eps - r, orders.upper_order);
  const double v = ball_volume(d, r) * std::min(near, m_f);
  return boundary ? v * std::pow(0.5, static_cast<double>(d)) : v;
}

double outside_nonempty_prob_bound(double p_ball, double n) {
  if (!(n * p_ball >= 1.0)) {
    throw std::invalid_argument("outside_nonempty_prob_bound: requires n * p >= 1 (sample size too small for the bound)");
  }
  return std::max(0.0, 1.0 - 2.0 * std::exp(-p_ball * p_ball * n / 2.0));
}

}  // namespace zdr
