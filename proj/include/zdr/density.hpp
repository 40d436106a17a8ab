#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "zdr/geometry.hpp"

namespace zdr {

enum class SupportKind { UnitCube, Interval, FullSpace };

struct Support {
  SupportKind kind = SupportKind::UnitCube;
  std::size_t dim = 1;
  double a = 0.0;  // Interval bounds (UnitCube uses [0, 1]^dim)
  double b = 1.0;

  static Support unit_cube(std::size_t d) { return {SupportKind::UnitCube, d, 0.0, 1.0}; }
  static Support interval(double a, double b) { return {SupportKind::Interval, 1, a, b}; }
  static Support full_space(std::size_t d) { return {SupportKind::FullSpace, d, 0.0, 0.0}; }

  bool compact() const noexcept { return kind != SupportKind::FullSpace; }
  bool contains(std::span<const double> x) const noexcept;
  /// The support as a box; nullopt for full space.
  std::optional<Box> box() const;
};

/// f ∝ d(x, S0)^exponent on a compact support.
struct PowerLaw {
  double exponent;
};

/// Piecewise anisotropic density on [0,1]^2 around {1/2} x [1/4, 3/4] whose
/// exponent sweeps from 4 (right of the segment) to 2 (left of it).
struct AnisotropicExample2 {};

/// C1 d^gamma for d < eps0, C2 d^chi beyond (chi < -dim).
struct PolynomialTail {
  double c1, c2, gamma, chi, eps0;
};

/// C1 d^gamma for d < eps0, C2 exp(beta d) beyond (beta < 0).
struct ExponentialTail {
  double c1, c2, gamma, beta, eps0;
};

enum class Explicit1DName { FQuadratic, GTwoBumps, HParabolic };

/// f(x) = 3/2 x^2, g(x) = 2/3 on [-1,-1/4] ∪ [1/4,1], h(x) = 3/8 (x^2 + 1); all on [-1, 1].
struct Explicit1D {
  Explicit1DName name;
};

using DensityForm = std::variant<PowerLaw, AnisotropicExample2, PolynomialTail, ExponentialTail, Explicit1D>;

/// Sandwich L * d^upper_order <= f(x) <= U * d^lower_order on 0 < d(x,S0) < radius.
struct SmoothnessOrders {
  double upper_order;
  double lower_order;
  double lower_constant;  // L_f
  double upper_constant;  // U_f
  double radius;          // eps0 of the sandwich region
};

class DensityModel {
 public:
  DensityModel(std::string id, Support support, std::optional<ZeroSet> zero_set, DensityForm form);

  const std::string& id() const noexcept { return id_; }
  const Support& support() const noexcept { return support_; }
  std::size_t dim() const noexcept { return support_.dim; }
  const std::optional<ZeroSet>& zero_set() const noexcept { return zero_set_; }
  const DensityForm& form() const noexcept { return form_; }
  std::optional<double> normalization() const noexcept { return z_; }
  bool is_tail() const noexcept;

  /// The defining formula before dividing by Z. Zero outside the support and on S0.
  double unnormalized(std::span<const double> x) const;
  /// Normalized density. Throws std::logic_error while Z is pending.
  double evaluate(std::span<const double> x) const;
  double evaluate(const Point& x) const { return evaluate(x.coords()); }

  /// For models whose value inside the support depends on x only through
  /// t = d(x, S0): the normalized profile. nullopt for other models.
  std::optional<double> radial_profile(double t) const;
  bool is_radial() const noexcept;

  /// Radius of the neighborhood of S0 on which the smoothness sandwich holds.
  double near_radius() const;
  /// Coordinates per axis where the formula switches branch.
  std::vector<std::vector<double>> breakpoints() const;

  DensityModel with_normalization(double z) const;

 private:
  std::string id_;
  Support support_;
  std::optional<ZeroSet> zero_set_;
  DensityForm form_;
  std::optional<double> z_;
};

DensityModel make_powerlaw_segment(double exponent);
DensityModel make_example2();
DensityModel make_polytail_example();
DensityModel make_exptail_example();
DensityModel make_explicit_1d(Explicit1DName name);

/// Normalized catalog model by identifier: powerlaw4_segment, example2,
/// polytail_1_3, exptail_1_3, f_quadratic, g_twobumps, h_parabolic.
DensityModel catalog_model(std::string_view id);
const std::vector<std::string>& catalog_ids();

/// Computes Z (relative error <= 1e-6) and verifies ∫f = 1 within 1e-5 with
/// an independent fixed-grid rule. Throws std::runtime_error on failure.
DensityModel normalize(const DensityModel& model);

SmoothnessOrders smoothness_orders(const DensityModel& model);

struct SmoothnessEstimate {
  double upper;  // slope of the min-over-directions envelope
  double lower;  // slope of the max-over-directions envelope
};

/// Directional-shell estimate of the orders of smoothness. `shells` must be
/// strictly decreasing and below near_radius().
SmoothnessEstimate estimate_smoothness(const DensityModel& model, std::span<const double> shells,
                                       std::size_t directions = 256);

struct MinimumResult {
  double value;
  std::string method;  // "analytic" or "grid"
};

/// min f over (region ∩ support) \ B_eps(S0).
MinimumResult min_outside_neighborhood(const DensityModel& model, double eps, const Box& region);

/// sup_x f(x).
double sup_density(const DensityModel& model);

/// Largest distance from S0 over a box (attained at a corner).
double max_distance_to_zero_set(const ZeroSet& s, const Box& region);

/// P(X in ball) by nested adaptive quadrature. Supports d = 1 and d = 2.
double ball_probability(const DensityModel& model, const Ball& ball, double rel_tol = 1e-10);

/// For univariate tail models: P(|X - s0| >= t) for t >= eps0.
double tail_mass_beyond(const DensityModel& model, double t);

}  // namespace zdr
