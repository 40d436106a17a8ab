#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "zdr/density.hpp"
#include "zdr/rates.hpp"

namespace zdr {

struct SolveBResult {
  double b;                          // bisection root
  std::optional<double> closed_form;  // for the bundled univariate tails
  int iterations = 0;
};

/// Half-width B of the (1-delta)-support [-B, B] around S0: P(|X - s0| >= B) = delta.
/// Requires B > eps0, i.e. delta below the mass beyond eps0.
SolveBResult solve_B(const DensityModel& model, double delta);

/// delta(n) = m_delta n^-a, eps(n) = (n^-xi / C1)^(1/gamma1), B(n) = solve_B(delta(n)).
/// The decay exponent a makes the density at B(n) fall like n^-xi:
/// a = xi (chi + 1) / chi for polynomial tails and a = xi for exponential ones.
class TruncationSchedule {
 public:
  TruncationSchedule(DensityModel model, double eta, double xi, double m_delta);

  const DensityModel& model() const noexcept { return model_; }
  double eta() const noexcept { return eta_; }
  double xi() const noexcept { return xi_; }
  double gamma1() const noexcept { return gamma1_; }
  double psi() const noexcept { return psi_; }
  double m_delta() const noexcept { return m_delta_; }
  double delta_exponent() const noexcept { return delta_exponent_; }

  double delta(double n) const;
  double eps(double n) const;
  double B(double n) const;
  /// min f over [-B(n), B(n)] minus B_eps(n)(S0): min(C1 eps^gamma, f(B)) / Z.
  double m_value(double n) const;
  /// First n at which B_eps(n)(S0) sits inside [-B(n), B(n)].
  std::uint64_t threshold_n1() const;

 private:
  DensityModel model_;
  double eta_, xi_, gamma_, c1_, gamma1_, psi_, m_delta_, delta_exponent_;
};

/// Requires 0 < eta < 1/d and 0 < xi < (1 - 2 eta d)/2 (std::invalid_argument otherwise).
/// m_delta defaults to half the mass beyond eps0.
TruncationSchedule build_truncation_schedule(const DensityModel& model, double eta, double xi,
                                             std::optional<double> m_delta = std::nullopt);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Fitted exponent of m(f, n) over ns (which must span at least two decades).
double validate_m_decay(const TruncationSchedule& sched, std::span<const double> ns);

/// Compact analogue: m(f, n) = min of f over the support minus B_eps(n)(S0).
double validate_m_decay(const DensityModel& model, const RateSchedule& sched, std::span<const double> ns);

/// max(0, 1 - 2 exp(-(delta/2)^2 n)).
double binomial_containment_bound(double n, double delta);
/// The Hoeffding form max(0, 1 - 2 exp(-2 (delta/2)^2 n)).
double binomial_containment_bound_sharp(double n, double delta);

}  // namespace zdr
