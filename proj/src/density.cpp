#include "zdr/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "zdr/kernels.hpp"
#include "zdr/quadrature.hpp"

namespace zdr {

namespace {

constexpr double kContinuityTol = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const ZeroSet& require_zero_set(const DensityModel& m) {
  if (!m.zero_set()) throw std::invalid_argument(m.id() + ": model has no zero-density region");
  return *m.zero_set();
}

// The single point of a univariate tail model's zero set.
double tail_center(const DensityModel& m) {
  const auto& zs = require_zero_set(m);
  if (m.dim() != 1 || zs.components().size() != 1 ||
      !std::holds_alternative<SinglePoint>(zs.components().front().variant())) {
    throw std::invalid_argument(m.id() + ": bundled tail formulas are univariate with S0 a single point");
  }
  return std::get<SinglePoint>(zs.components().front().variant()).at[0];
}

double integrate_pieces(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts,
                        double rel_tol, double abs_tol = 1e-15) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(a, cuts[i]);
    const double hi = std::min(b, cuts[i + 1]);
    if (hi > lo) total += integrate_interval(f, lo, hi, rel_tol, abs_tol * (hi - lo) / (b - a)).value;
  }
  return total;
}

double example2_value(double x, double y, double d) {
  constexpr double pi = std::numbers::pi;
  if (y >= 0.25 && y <= 0.75) return x >= 0.5 ? std::pow(d, 4.0) : d * d;
  if (y > 0.75) {
    const double theta1 = std::atan2(y - 0.75, x - 0.5);  // in [0, pi]
    return std::pow(d, 4.0 - 2.0 / pi * theta1);
  }
  const double theta2 = std::atan2(y - 0.25, x - 0.5);  // in [-pi, 0]
  return std::pow(d, 4.0 + 2.0 / pi * theta2);
}

// Pattern search refinement of a maximum inside a box.
std::vector<double> refine_max(const std::function<double(std::span<const double>)>& f, std::vector<double> x,
                               const Box& box, double step) {
  double best = f(x);
  while (step > 1e-13) {
    bool moved = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double s : {-step, step}) {
        auto y = x;
        y[i] = std::clamp(y[i] + s, box.lower()[i], box.upper()[i]);
        const double fy = f(y);
        if (fy > best) {
          best = fy;
          x = std::move(y);
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return x;
}

double grid_sup(const DensityModel& m) {
  const Box box = *m.support().box();
  const std::size_t d = m.dim();
  const std::size_t per_axis = d == 1 ? 100001 : d == 2 ? 1001 : 41;
  auto f = [&](std::span<const double> x) { return m.unnormalized(x); };
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d), best_x(d);
  double best = -1.0;
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = box.lower()[i] + box.side(i) * static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
    }
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
    std::size_t axis = 0;
    while (axis < d && ++idx[axis] == per_axis) idx[axis++] = 0;
    if (axis == d) break;
  }
  best_x = refine_max(f, best_x, box, box.min_side() / static_cast<double>(per_axis - 1));
  return f(best_x);
}

}  // namespace

bool Support::contains(std::span<const double> x) const noexcept {
  switch (kind) {
    case SupportKind::UnitCube:
      for (double c : x) {
        if (c < 0.0 || c > 1.0) return false;
      }
      return true;
    case SupportKind::Interval:
      return x[0] >= a && x[0] <= b;
    case SupportKind::FullSpace:
      return true;
  }
  return false;
}

std::optional<Box> Support::box() const {
  switch (kind) {
    case SupportKind::UnitCube:
      return Box::cube(dim, 0.0, 1.0);
    case SupportKind::Interval:
      return Box(Point{a}, Point{b});
    case SupportKind::FullSpace:
      return std::nullopt;
  }
  return std::nullopt;
}

DensityModel::DensityModel(std::string id, Support support, std::optional<ZeroSet> zero_set, DensityForm form)
    : id_(std::move(id)), support_(support), zero_set_(std::move(zero_set)), form_(std::move(form)) {
  if (support_.dim < 1) throw std::invalid_argument("DensityModel: dimension must be >= 1");
  if (support_.kind == SupportKind::Interval && !(support_.b > support_.a)) {
    throw std::invalid_argument("DensityModel: empty interval support");
  }
  if (zero_set_ && zero_set_->ambient_dim() != support_.dim) {
    throw std::invalid_argument("DensityModel: zero set dimension differs from support dimension");
  }
  const double d = static_cast<double>(support_.dim);
  std::visit(Overloaded{
                 [&](const PowerLaw& p) {
                   if (!(p.exponent > 0.0)) throw std::invalid_argument("PowerLaw: exponent must be positive");
                   if (!support_.compact()) throw std::invalid_argument("PowerLaw: support must be compact");
                   require_zero_set(*this);
                 },
                 [&](const AnisotropicExample2&) {
                   if (support_.kind != SupportKind::UnitCube || support_.dim != 2) {
                     throw std::invalid_argument("AnisotropicExample2: support must be [0,1]^2");
                   }
                   require_zero_set(*this);
                 },
                 [&](const PolynomialTail& p) {
                   if (!(p.gamma > 0.0) || !(p.c1 > 0.0) || !(p.c2 > 0.0) || !(p.eps0 > 0.0)) {
                     throw std::invalid_argument("PolynomialTail: C1, C2, gamma, eps0 must be positive");
                   }
                   if (!(p.chi < -d)) throw std::invalid_argument("PolynomialTail: chi must be < -d");
                   const double lhs = p.c1 * std::pow(p.eps0, p.gamma);
                   const double rhs = p.c2 * std::pow(p.eps0, p.chi);
                   if (std::abs(lhs - rhs) > kContinuityTol * std::max(1.0, std::abs(lhs))) {
                     throw std::invalid_argument("PolynomialTail: continuity C1*eps0^gamma = C2*eps0^chi violated");
                   }
                   require_zero_set(*this);
                 },
                 [&](const ExponentialTail& p) {
                   if (!(p.gamma > 0.0) || !(p.c1 > 0.0) || !(p.c2 > 0.0) || !(p.eps0 > 0.0)) {
                     throw std::invalid_argument("ExponentialTail: C1, C2, gamma, eps0 must be positive");
                   }
                   if (!(p.beta < 0.0)) throw std::invalid_argument("ExponentialTail: beta must be negative");
                   const double lhs = p.c1 * std::pow(p.eps0, p.gamma);
                   const double rhs = p.c2 * std::exp(p.beta * p.eps0);
                   if (std::abs(lhs - rhs) > kContinuityTol * std::max(1.0, std::abs(lhs))) {
                     throw std::invalid_argument("ExponentialTail: continuity C1*eps0^gamma = C2*exp(beta*eps0) violated");
                   }
                   require_zero_set(*this);
                 },
                 [&](const Explicit1D&) {
                   if (support_.dim != 1) throw std::invalid_argument("Explicit1D: univariate only");
                 },
             },
             form_);
}

bool DensityModel::is_tail() const noexcept {
  return std::holds_alternative<PolynomialTail>(form_) || std::holds_alternative<ExponentialTail>(form_);
}

bool DensityModel::is_radial() const noexcept {
  if (std::holds_alternative<PowerLaw>(form_) || is_tail()) return true;
  if (const auto* e = std::get_if<Explicit1D>(&form_)) return e->name == Explicit1DName::FQuadratic;
  return false;
}

double DensityModel::unnormalized(std::span<const double> x) const {
  if (x.size() != support_.dim) throw std::invalid_argument(id_ + ": evaluation point has wrong dimension");
  if (!support_.contains(x)) return 0.0;
  const double t = zero_set_ ? zero_set_->distance(x) : std::numeric_limits<double>::infinity();
  if (t == 0.0) return 0.0;
  return std::visit(Overloaded{
                        [&](const PowerLaw& p) { return std::pow(t, p.exponent); },
                        [&](const AnisotropicExample2&) { return example2_value(x[0], x[1], t); },
                        [&](const PolynomialTail& p) {
                          return t < p.eps0 ? p.c1 * std::pow(t, p.gamma) : p.c2 * std::pow(t, p.chi);
                        },
                        [&](const ExponentialTail& p) {
                          return t < p.eps0 ? p.c1 * std::pow(t, p.gamma) : p.c2 * std::exp(p.beta * t);
                        },
                        [&](const Explicit1D& e) {
                          const double v = x[0];
                          switch (e.name) {
                            case Explicit1DName::FQuadratic:
                              return 1.5 * v * v;
                            case Explicit1DName::GTwoBumps:
                              return (v <= -0.25 || v >= 0.25) ? 2.0 / 3.0 : 0.0;
                            case Explicit1DName::HParabolic:
                              return 0.375 * (v * v + 1.0);
                          }
                          return 0.0;
                        },
                    },
                    form_);
}

double DensityModel::evaluate(std::span<const double> x) const {
  if (!z_) throw std::logic_error(id_ + ": normalization pending; call normalize() first");
  return unnormalized(x) / *z_;
}

std::optional<double> DensityModel::radial_profile(double t) const {
  if (!is_radial()) return std::nullopt;
  if (!z_) throw std::logic_error(id_ + ": normalization pending; call normalize() first");
  if (t <= 0.0) return 0.0;
  const double v = std::visit(Overloaded{
                                  [&](const PowerLaw& p) { return std::pow(t, p.exponent); },
                                  [&](const PolynomialTail& p) {
                                    return t < p.eps0 ? p.c1 * std::pow(t, p.gamma) : p.c2 * std::pow(t, p.chi);
                                  },
                                  [&](const ExponentialTail& p) {
                                    return t < p.eps0 ? p.c1 * std::pow(t, p.gamma) : p.c2 * std::exp(p.beta * t);
                                  },
                                  [&](const auto&) { return 1.5 * t * t; },
                              },
                              form_);
  return v / *z_;
}

double DensityModel::near_radius() const {
  return std::visit(Overloaded{
                        [&](const PowerLaw&) {
                          // Largest neighborhood of S0 inside the cube, capped at 1 so d^a <= d^b ordering holds.
                          double r = 1.0;
                          for (const auto& c : zero_set_->components()) {
                            std::vector<std::vector<double>> verts;
                            std::visit(Overloaded{
                                           [&](const SinglePoint& p) { verts.emplace_back(p.at.coords().begin(), p.at.coords().end()); },
                                           [&](const Segment& s) {
                                             verts.emplace_back(s.a.coords().begin(), s.a.coords().end());
                                             verts.emplace_back(s.b.coords().begin(), s.b.coords().end());
                                           },
                                           [&](const AxisBox& b) {
                                             for (const auto& p : b.box.corners()) verts.emplace_back(p.coords().begin(), p.coords().end());
                                           },
                                       },
                                       c.variant());
                            const Box box = *support_.box();
                            for (const auto& v : verts) {
                              for (std::size_t i = 0; i < v.size(); ++i) {
                                r = std::min({r, v[i] - box.lower()[i], box.upper()[i] - v[i]});
                              }
                            }
                          }
                          return r;
                        },
                        [&](const AnisotropicExample2&) { return 0.25; },
                        [&](const PolynomialTail& p) { return p.eps0; },
                        [&](const ExponentialTail& p) { return p.eps0; },
                        [&](const Explicit1D& e) -> double {
                          if (e.name == Explicit1DName::FQuadratic) return 1.0;
                          throw std::invalid_argument(id_ + ": no power-law neighborhood of a zero set");
                        },
                    },
                    form_);
}

std::vector<std::vector<double>> DensityModel::breakpoints() const {
  std::vector<std::vector<double>> out(support_.dim);
  if (std::holds_alternative<AnisotropicExample2>(form_)) return {{0.5}, {0.25, 0.75}};
  if (const auto* e = std::get_if<Explicit1D>(&form_)) {
    if (e->name == Explicit1DName::FQuadratic) return {{0.0}};
    if (e->name == Explicit1DName::GTwoBumps) return {{-0.25, 0.25}};
    return {{}};
  }
  if (zero_set_) {
    for (const auto& c : zero_set_->components()) {
      std::visit(Overloaded{
                     [&](const SinglePoint& p) {
                       for (std::size_t i = 0; i < p.at.dim(); ++i) out[i].push_back(p.at[i]);
                     },
                     [&](const Segment& s) {
                       for (std::size_t i = 0; i < s.a.dim(); ++i) {
                         out[i].push_back(s.a[i]);
                         out[i].push_back(s.b[i]);
                       }
                     },
                     [&](const AxisBox& b) {
                       for (std::size_t i = 0; i < b.box.dim(); ++i) {
                         out[i].push_back(b.box.lower()[i]);
                         out[i].push_back(b.box.upper()[i]);
                       }
                     },
                 },
                 c.variant());
    }
  }
  if (is_tail()) {
    const double eps0 = std::visit(Overloaded{[](const PolynomialTail& p) { return p.eps0; },
                                              [](const ExponentialTail& p) { return p.eps0; },
                                              [](const auto&) { return 0.0; }},
                                   form_);
    const double c = out[0].empty() ? 0.0 : out[0].front();
    out[0].push_back(c - eps0);
    out[0].push_back(c + eps0);
  }
  return out;
}

DensityModel DensityModel::with_normalization(double z) const {
  if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument(id_ + ": normalization must be positive");
  DensityModel out = *this;
  out.z_ = z;
  return out;
}

DensityModel make_powerlaw_segment(double exponent) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "powerlaw%g_segment", exponent);
  return DensityModel(buf, Support::unit_cube(2),
                      ZeroSet{ZeroSetPrimitive::segment(Point{0.5, 0.25}, Point{0.5, 0.75})}, PowerLaw{exponent});
}

DensityModel make_example2() {
  return DensityModel("example2", Support::unit_cube(2),
                      ZeroSet{ZeroSetPrimitive::segment(Point{0.5, 0.25}, Point{0.5, 0.75})}, AnisotropicExample2{});
}

DensityModel make_polytail_example() {
  return DensityModel("polytail_1_3", Support::full_space(1), ZeroSet{ZeroSetPrimitive::point(Point{0.0})},
                      PolynomialTail{2.0 / 7.0, 2.0 / 7.0, 1.0 / 3.0, -2.0, 1.0});
}

DensityModel make_exptail_example() {
  const double c1 = 2.0 / 5.0;
  return DensityModel("exptail_1_3", Support::full_space(1), ZeroSet{ZeroSetPrimitive::point(Point{0.0})},
                      ExponentialTail{c1, c1 * std::exp(2.0), 1.0 / 3.0, -2.0, 1.0});
}

DensityModel make_explicit_1d(Explicit1DName name) {
  switch (name) {
    case Explicit1DName::FQuadratic:
      return DensityModel("f_quadratic", Support::interval(-1.0, 1.0), ZeroSet{ZeroSetPrimitive::point(Point{0.0})},
                          Explicit1D{name});
    case Explicit1DName::GTwoBumps:
      return DensityModel("g_twobumps", Support::interval(-1.0, 1.0),
                          ZeroSet{ZeroSetPrimitive::box(Point{-0.25}, Point{0.25})}, Explicit1D{name});
    case Explicit1DName::HParabolic:
      return DensityModel("h_parabolic", Support::interval(-1.0, 1.0), std::nullopt, Explicit1D{name});
  }
  throw std::invalid_argument("unknown Explicit1D name");
}

const std::vector<std::string>& catalog_ids() {
  static const std::vector<std::string> ids = {"powerlaw4_segment", "example2",   "polytail_1_3", "exptail_1_3",
                                               "f_quadratic",       "g_twobumps", "h_parabolic"};
  return ids;
}

DensityModel catalog_model(std::string_view id) {
  static std::mutex mu;
  static std::map<std::string, DensityModel, std::less<>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(id); it != cache.end()) return it->second;

  std::optional<DensityModel> raw;
  if (id == "powerlaw4_segment") raw = make_powerlaw_segment(4.0);
  else if (id == "example2") raw = make_example2();
  else if (id == "polytail_1_3") raw = make_polytail_example();
  else if (id == "exptail_1_3") raw = make_exptail_example();
  else if (id == "f_quadratic") raw = make_explicit_1d(Explicit1DName::FQuadratic);
  else if (id == "g_twobumps") raw = make_explicit_1d(Explicit1DName::GTwoBumps);
  else if (id == "h_parabolic") raw = make_explicit_1d(Explicit1DName::HParabolic);
  else throw std::invalid_argument("unknown model id: " + std::string(id));

  DensityModel m = normalize(*raw);
  cache.emplace(std::string(id), m);
  return m;
}

DensityModel normalize(const DensityModel& model) {
  double z = 0.0;
  if (const auto* e = std::get_if<Explicit1D>(&model.form())) {
    switch (e->name) {
      case Explicit1DName::FQuadratic:
        z = 1.5 * (2.0 / 3.0);  // ∫ 3/2 x^2 over [-1, 1]
        break;
      case Explicit1DName::GTwoBumps:
        z = (2.0 / 3.0) * 2.0 * 0.75;
        break;
      case Explicit1DName::HParabolic:
        z = 0.375 * (2.0 / 3.0 + 2.0);
        break;
    }
  } else if (model.is_tail()) {
    tail_center(model);
    z = std::visit(Overloaded{
                       [](const PolynomialTail& p) {
                         return 2.0 * (p.c1 * std::pow(p.eps0, p.gamma + 1.0) / (p.gamma + 1.0) +
                                       p.c2 * std::pow(p.eps0, p.chi + 1.0) / (-p.chi - 1.0));
                       },
                       [](const ExponentialTail& p) {
                         return 2.0 * (p.c1 * std::pow(p.eps0, p.gamma + 1.0) / (p.gamma + 1.0) +
                                       p.c2 * std::exp(p.beta * p.eps0) / (-p.beta));
                       },
                       [](const auto&) { return 0.0; },
                   },
                   model.form());
  } else {
    const Box box = *model.support().box();
    const auto res = integrate_box([&](std::span<const double> x) { return model.unnormalized(x); }, box,
                                   model.breakpoints(), 1e-10, 1e-300, 400000);
    if (!(res.error <= 1e-6 * std::abs(res.value))) {
      throw std::runtime_error(model.id() + ": normalization quadrature did not converge (relative error estimate " +
                               std::to_string(res.error / std::abs(res.value)) + ")");
    }
    z = res.value;
  }

  DensityModel out = model.with_normalization(z);

  // Verification pass with an independent rule.
  double total = 0.0;
  if (model.is_tail()) {
    const auto& p = model.form();
    const double c = tail_center(model);
    const double eps0 = model.near_radius();
    auto f = [&](double x) { return out.evaluate(std::span<const double>(&x, 1)); };
    total = integrate_pieces(f, c - eps0, c + eps0, {c}, 1e-12);
    boost::math::quadrature::exp_sinh<double> tail;
    total += tail.integrate([&](double x) { return f(x); }, c + eps0, std::numeric_limits<double>::infinity());
    total += tail.integrate([&](double x) { return f(-x); }, -(c - eps0), std::numeric_limits<double>::infinity());
    (void)p;
  } else {
    total = kernels::tensor_gauss_legendre(
        [&](std::span<const double> x) { return out.evaluate(x); }, *model.support().box());
  }
  if (std::abs(total - 1.0) > 1e-5) {
    throw std::runtime_error(model.id() + ": verification integral " + std::to_string(total) + " differs from 1");
  }
  return out;
}

SmoothnessOrders smoothness_orders(const DensityModel& model) {
  if (!model.normalization()) throw std::logic_error(model.id() + ": normalization pending");
  const double z = *model.normalization();
  const double radius = model.near_radius();
  return std::visit(Overloaded{
                        [&](const PowerLaw& p) {
                          return SmoothnessOrders{p.exponent, p.exponent, 1.0 / z, 1.0 / z, radius};
                        },
                        // d^4 <= d^e <= d^2 for e in [2, 4] and d < 1.
                        [&](const AnisotropicExample2&) { return SmoothnessOrders{4.0, 2.0, 1.0 / z, 1.0 / z, radius}; },
                        [&](const PolynomialTail& p) {
                          return SmoothnessOrders{p.gamma, p.gamma, p.c1 / z, p.c1 / z, radius};
                        },
                        [&](const ExponentialTail& p) {
                          return SmoothnessOrders{p.gamma, p.gamma, p.c1 / z, p.c1 / z, radius};
                        },
                        [&](const Explicit1D& e) -> SmoothnessOrders {
                          if (e.name == Explicit1DName::FQuadratic) return {2.0, 2.0, 1.5 / z, 1.5 / z, radius};
                          throw std::invalid_argument(model.id() + ": no power-law orders of smoothness");
                        },
                    },
                    model.form());
}

SmoothnessEstimate estimate_smoothness(const DensityModel& model, std::span<const double> shells,
                                       std::size_t directions) {
  const ZeroSet& zs = require_zero_set(model);
  const double radius = model.near_radius();
  if (shells.size() < 2) throw std::invalid_argument("estimate_smoothness: need at least two shells");
  for (std::size_t i = 0; i < shells.size(); ++i) {
    if (!(shells[i] > 0.0) || !(shells[i] < radius)) {
      throw std::invalid_argument("estimate_smoothness: shell radius outside (0, near_radius)");
    }
    if (i > 0 && !(shells[i] < shells[i - 1])) {
      throw std::invalid_argument("estimate_smoothness: shells must be strictly decreasing");
    }
  }
  const std::size_t d = model.dim();
  if (d > 2) throw std::invalid_argument("estimate_smoothness: directional sweep implemented for d <= 2");

  std::vector<std::vector<double>> dirs;
  if (d == 1) {
    dirs = {{1.0}, {-1.0}};
  } else {
    for (std::size_t k = 0; k < directions; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(directions);
      dirs.push_back({std::cos(a), std::sin(a)});
    }
  }

  std::vector<double> log_delta, log_max, log_min;
  for (double delta : shells) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    auto consider = [&](std::vector<double> x) {
      if (!model.support().contains(x)) return;
      if (std::abs(zs.distance(x) - delta) > 1e-9 * delta) return;
      const double v = model.evaluate(x);
      if (!(v > 0.0)) return;
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    };
    for (const auto& u : dirs) {
      for (const auto& comp : zs.components()) {
        // Base points on the face of the component exposed in direction u.
        std::vector<std::vector<double>> bases;
        if (const auto* seg = std::get_if<Segment>(&comp.variant())) {
          double along = 0.0, len = 0.0;
          for (std::size_t i = 0; i < d; ++i) {
            along += (seg->b[i] - seg->a[i]) * u[i];
            len += (seg->b[i] - seg->a[i]) * (seg->b[i] - seg->a[i]);
          }
          if (std::abs(along) <= 1e-12 * std::sqrt(len)) {
            for (int j = 0; j <= 32; ++j) {
              std::vector<double> p(d);
              for (std::size_t i = 0; i < d; ++i) p[i] = seg->a[i] + (seg->b[i] - seg->a[i]) * j / 32.0;
              bases.push_back(std::move(p));
            }
          }
        } else if (const auto* ab = std::get_if<AxisBox>(&comp.variant())) {
          auto p = comp.support_point(u);
          for (std::size_t i = 0; i < d; ++i) {
            if (std::abs(u[i]) <= 1e-12 && ab->box.side(i) > 0.0) {
              for (int j = 0; j <= 32; ++j) {
                auto q = p;
                q[i] = ab->box.lower()[i] + ab->box.side(i) * j / 32.0;
                bases.push_back(std::move(q));
              }
            }
          }
        }
        bases.push_back(comp.support_point(u));
        for (auto& p : bases) {
          for (std::size_t i = 0; i < d; ++i) p[i] += delta * u[i];
          consider(std::move(p));
        }
      }
    }
    if (!std::isfinite(hi)) throw std::invalid_argument("estimate_smoothness: shell lies outside the support");
    log_delta.push_back(std::log(delta));
    log_max.push_back(std::log(hi));
    log_min.push_back(std::log(lo));
  }

  auto slope = [&](const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      mx += log_delta[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      sxy += (log_delta[i] - mx) * (y[i] - my);
      sxx += (log_delta[i] - mx) * (log_delta[i] - mx);
    }
    return sxy / sxx;
  };
  return {slope(log_min), slope(log_max)};
}

double max_distance_to_zero_set(const ZeroSet& s, const Box& region) {
  double best = 0.0;
  for (const auto& c : region.corners()) best = std::max(best, s.distance(c.coords()));
  if (s.components().size() > 1) {
    // A min of convex functions can peak inside the box; scan a grid too.
    const std::size_t d = region.dim();
    const std::size_t per_axis = d == 1 ? 10001 : d == 2 ? 401 : 21;
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    for (;;) {
      for (std::size_t i = 0; i < d; ++i) {
        x[i] = region.lower()[i] + region.side(i) * static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
      }
      best = std::max(best, s.distance(x));
      std::size_t axis = 0;
      while (axis < d && ++idx[axis] == per_axis) idx[axis++] = 0;
      if (axis == d) break;
    }
  }
  return best;
}

MinimumResult min_outside_neighborhood(const DensityModel& model, double eps, const Box& region) {
  if (!(eps > 0.0)) throw std::invalid_argument("min_outside_neighborhood: eps must be positive");
  if (!model.normalization()) throw std::logic_error(model.id() + ": normalization pending");
  if (region.dim() != model.dim()) throw std::invalid_argument("min_outside_neighborhood: dimension mismatch");

  // Clip the region to the support.
  std::vector<double> lo(region.lower().coords().begin(), region.lower().coords().end());
  std::vector<double> hi(region.upper().coords().begin(), region.upper().coords().end());
  if (auto sb = model.support().box()) {
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] = std::max(lo[i], sb->lower()[i]);
      hi[i] = std::min(hi[i], sb->upper()[i]);
      if (lo[i] > hi[i]) throw std::invalid_argument("min_outside_neighborhood: region misses the support");
    }
  }
  const Box clipped{Point(lo), Point(hi)};

  if (model.is_radial()) {
    const double tmax = max_distance_to_zero_set(*model.zero_set(), clipped);
    if (tmax < eps) throw std::invalid_argument("min_outside_neighborhood: region lies inside the eps-neighborhood");
    // Radial profiles are increasing, or increasing then decreasing for tails.
    double v = *model.radial_profile(eps);
    if (model.is_tail()) v = std::min(v, *model.radial_profile(tmax));
    return {v, "analytic"};
  }

  const double step = std::min(eps / 100.0, clipped.min_side() > 0.0 ? clipped.min_side() / 2.0 : eps / 100.0);
  const double v = kernels::grid_minimum(model, eps, clipped, step);
  if (!std::isfinite(v)) throw std::invalid_argument("min_outside_neighborhood: empty feasible region");
  return {v, "grid"};
}

double sup_density(const DensityModel& model) {
  if (!model.normalization()) throw std::logic_error(model.id() + ": normalization pending");
  const double z = *model.normalization();
  return std::visit(Overloaded{
                        [&](const PowerLaw& p) {
                          return std::pow(max_distance_to_zero_set(*model.zero_set(), *model.support().box()),
                                          p.exponent) /
                                 z;
                        },
                        [&](const AnisotropicExample2&) {
                          static std::mutex mu;
                          static std::optional<double> cached;
                          std::lock_guard lock(mu);
                          if (!cached) cached = grid_sup(model);
                          return *cached / z;
                        },
                        [&](const PolynomialTail& p) { return p.c1 * std::pow(p.eps0, p.gamma) / z; },
                        [&](const ExponentialTail& p) { return p.c1 * std::pow(p.eps0, p.gamma) / z; },
                        [&](const Explicit1D& e) {
                          switch (e.name) {
                            case Explicit1DName::FQuadratic:
                              return 1.5 / z;
                            case Explicit1DName::GTwoBumps:
                              return (2.0 / 3.0) / z;
                            case Explicit1DName::HParabolic:
                              return 0.75 / z;
                          }
                          return 0.0;
                        },
                    },
                    model.form());
}

double ball_probability(const DensityModel& model, const Ball& ball, double rel_tol) {
  if (!model.normalization()) throw std::logic_error(model.id() + ": normalization pending");
  const std::size_t d = model.dim();
  if (ball.center().dim() != d) throw std::invalid_argument("ball_probability: dimension mismatch");
  const double r = ball.radius();
  const auto bp = model.breakpoints();
  const auto sb = model.support().box();
  // Absolute floors relative to the largest possible value, so integrals at
  // round-off level (e.g. chords through S0) do not drive endless refinement.
  const double fmax = sup_density(model);

  if (d == 1) {
    double a = ball.center()[0] - r, b = ball.center()[0] + r;
    if (sb) {
      a = std::max(a, sb->lower()[0]);
      b = std::min(b, sb->upper()[0]);
    }
    if (!(b > a)) return 0.0;
    auto f = [&](double x) { return model.evaluate(std::span<const double>(&x, 1)); };
    return integrate_pieces(f, a, b, bp[0], rel_tol, 1e-15 * fmax * (b - a));
  }
  if (d != 2) throw std::invalid_argument("ball_probability: implemented for d = 1, 2");

  const double cx = ball.center()[0], cy = ball.center()[1];
  // x = cx + r sin(t) removes the square-root endpoint behavior of the chord length.
  auto inner = [&](double t) {
    const double x = cx + r * std::sin(t);
    const double h = r * std::cos(t);
    double y0 = cy - h, y1 = cy + h;
    if (sb) {
      if (x < sb->lower()[0] || x > sb->upper()[0]) return 0.0;
      y0 = std::max(y0, sb->lower()[1]);
      y1 = std::min(y1, sb->upper()[1]);
    }
    if (!(y1 > y0)) return 0.0;
    auto g = [&](double y) {
      const double p[2] = {x, y};
      return model.evaluate(std::span<const double>(p, 2));
    };
    return integrate_pieces(g, y0, y1, bp[1], rel_tol * 0.01, 1e-15 * fmax * (y1 - y0)) * r * std::cos(t);
  };
  std::vector<double> cuts;
  std::vector<double> xs = bp[0];
  if (sb) {
    xs.push_back(sb->lower()[0]);
    xs.push_back(sb->upper()[0]);
  }
  for (double xb : xs) {
    const double s = (xb - cx) / r;
    if (s > -1.0 && s < 1.0) cuts.push_back(std::asin(s));
  }
  // y-breakpoints crossing the circle boundary produce kinks in t as well.
  std::vector<double> ys = bp[1];
  if (sb) {
    ys.push_back(sb->lower()[1]);
    ys.push_back(sb->upper()[1]);
  }
  for (double yb : ys) {
    const double c = std::abs(yb - cy) / r;
    if (c < 1.0) {
      const double t = std::acos(c);
      cuts.push_back(t);
      cuts.push_back(-t);
    }
  }
  return integrate_pieces(inner, -std::numbers::pi / 2, std::numbers::pi / 2, cuts, rel_tol, 1e-14 * fmax * r * r);
}

double tail_mass_beyond(const DensityModel& model, double t) {
  if (!model.normalization()) throw std::logic_error(model.id() + ": normalization pending");
  tail_center(model);
  const double z = *model.normalization();
  return std::visit(Overloaded{
                        [&](const PolynomialTail& p) -> double {
                          if (t < p.eps0) throw std::invalid_argument("tail_mass_beyond: t below eps0");
                          return 2.0 * p.c2 * std::pow(t, p.chi + 1.0) / (-p.chi - 1.0) / z;
                        },
                        [&](const ExponentialTail& p) -> double {
                          if (t < p.eps0) throw std::invalid_argument("tail_mass_beyond: t below eps0");
                          return 2.0 * p.c2 * std::exp(p.beta * t) / (-p.beta) / z;
                        },
                        [&](const auto&) -> double {
                          throw std::invalid_argument(model.id() + ": not a tail model");
                        },
                    },
                    model.form());
}

}  // namespace zdr
