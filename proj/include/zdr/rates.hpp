#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zdr/density.hpp"

namespace zdr {

/// A schedule is well defined but infeasible at the requested size (2r > eps or eps >= 1).
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::optional<std::uint64_t> minimal_n)
      : std::runtime_error(what), minimal_n_(minimal_n) {}
  std::optional<std::uint64_t> minimal_n() const noexcept { return minimal_n_; }

 private:
  std::optional<std::uint64_t> minimal_n_;
};

/// r(n) = m_r n^-eta, eps(n) = m_eps n^-psi.
struct RateSchedule {
  double eta = 0.0;
  double psi = 0.0;
  double xi = 0.0;
  double m_r = 1.0;
  double m_eps = 1.0;

  /// 0 < eta < 1/d, 0 < psi <= eta, 0 < xi < (1 - 2 eta d) / 2; positive multipliers.
  /// Throws std::invalid_argument naming the violated hypothesis.
  void validate(std::size_t d) const;
};

struct ScheduleValues {
  double r;
  double eps;
};

/// Throws InfeasibleError if 2r > eps or eps >= 1 at n.
ScheduleValues schedule_values(const RateSchedule& s, std::uint64_t n);

/// Smallest n >= 1 at which 2r(n) <= eps(n) < 1, if any.
std::optional<std::uint64_t> minimal_valid_n(const RateSchedule& s);

struct ComponentOrders {
  int d0;
  double upper_order;
  double lower_order;
};

struct ConditionReport {
  double condition_a_value;  // 1 - 2 eta d - 2 K_upper psi   (min over components)
  bool condition_a_holds;    // value > 0
  double condition_b_value;  // 1 + d0 eta - K_lower eta - d eta   (max over components)
  bool condition_b_holds;    // value < 0
  double xi_condition_value;  // 1 - 2 eta d - 2 xi
  bool xi_condition_holds;
  std::size_t binding_a = 0;  // component attaining the min / max
  std::size_t binding_b = 0;
  std::size_t d = 0;
  std::vector<ComponentOrders> components;
  RateSchedule schedule;
};

ConditionReport check_theorem1(std::size_t d, int d0, const SmoothnessOrders& orders, const RateSchedule& s);
ConditionReport check_corollary1(std::size_t d, const std::vector<ComponentOrders>& components, const RateSchedule& s);

/// pi^(d/2) / Gamma(d/2 + 1) r^d.
double ball_volume(std::size_t d, double r);

/// max(0, 1 - 2 exp(-2 gamma^2 n)).
double hoeffding_bound(double n, double gamma);

/// U_f V_d(r) (2r)^K_lower: mass bound for any ball meeting S0 when 2r <= eps.
double inside_ball_mass_upper(const SmoothnessOrders& orders, std::size_t d, double r);

/// V_d(r) min[L_f (eps - r)^K_upper, m_f], times 2^-d when the ball is clipped by the support boundary.
double outside_ball_mass_lower(const SmoothnessOrders& orders, std::size_t d, double r, double eps, double m_f,
                               bool boundary);

/// max(0, 1 - 2 exp(-p^2 n / 2)). Requires n p >= 1.
double outside_nonempty_prob_bound(double p_ball, double n);

}  // namespace zdr
