#include "zdr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace zdr {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double point_segment_distance(std::span<const double> x, const Segment& s) {
  const auto a = s.a.coords();
  const auto b = s.b.coords();
  double ab2 = 0.0;
  double t = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ab = b[i] - a[i];
    ab2 += ab * ab;
    t += (x[i] - a[i]) * ab;
  }
  t = std::clamp(t / ab2, 0.0, 1.0);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - (a[i] + t * (b[i] - a[i]));
    d2 += diff * diff;
  }
  return std::sqrt(d2);
}

double point_box_distance(std::span<const double> x, const Box& box) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = std::clamp(x[i], box.lower()[i], box.upper()[i]);
    d2 += (x[i] - c) * (x[i] - c);
  }
  return std::sqrt(d2);
}

std::vector<double> lerp(const Point& a, const Point& b, double t) {
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + t * (b[i] - a[i]);
  return out;
}

// Closest points of two segments in R^d (clamped parametric minimization).
double segment_segment_distance(const Segment& s1, const Segment& s2) {
  const std::size_t d = s1.a.dim();
  std::vector<double> u(d), v(d), w(d);
  for (std::size_t i = 0; i < d; ++i) {
    u[i] = s1.b[i] - s1.a[i];
    v[i] = s2.b[i] - s2.a[i];
    w[i] = s1.a[i] - s2.a[i];
  }
  const double a = dot(u, u);
  const double b = dot(u, v);
  const double c = dot(v, v);
  const double dd = dot(u, w);
  const double e = dot(v, w);
  const double denom = a * c - b * b;

  double s = 0.0;
  if (denom > 1e-14 * a * c) s = std::clamp((b * e - c * dd) / denom, 0.0, 1.0);
  double t = (b * s + e) / c;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-dd / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - dd) / a, 0.0, 1.0);
  }
  return euclidean_distance(lerp(s1.a, s1.b, s), lerp(s2.a, s2.b, t));
}

// dist(segment(t), box) is convex in t; golden-section search.
double segment_box_distance(const Segment& s, const Box& box) {
  auto f = [&](double t) { return point_box_distance(lerp(s.a, s.b, t), box); };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f(0.0), f(1.0), f(0.5 * (lo + hi))});
}

double box_box_distance(const Box& p, const Box& q) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double gap = std::max({0.0, q.lower()[i] - p.upper()[i], p.lower()[i] - q.upper()[i]});
    d2 += gap * gap;
  }
  return std::sqrt(d2);
}

}  // namespace

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("Point: dimension must be >= 1");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw std::invalid_argument("Point: non-finite coordinate");
  }
}

Point::Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(d2);
}

Box::Box(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  require_same_dim(lower_.dim(), upper_.dim(), "Box");
  for (std::size_t i = 0; i < lower_.dim(); ++i) {
    if (lower_[i] > upper_[i]) throw std::invalid_argument("Box: lower > upper");
  }
}

Box Box::cube(std::size_t d, double lo, double hi) {
  return Box(Point(std::vector<double>(d, lo)), Point(std::vector<double>(d, hi)));
}

double Box::min_side() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim(); ++i) m = std::min(m, side(i));
  return m;
}

double Box::volume() const noexcept {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

bool Box::contains(std::span<const double> x) const noexcept {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  }
  return true;
}

std::vector<Point> Box::corners() const {
  const std::size_t d = dim();
  std::vector<Point> out;
  out.reserve(std::size_t{1} << d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    std::vector<double> c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = (mask >> i) & 1 ? upper_[i] : lower_[i];
    out.emplace_back(std::move(c));
  }
  return out;
}

ZeroSetPrimitive ZeroSetPrimitive::point(Point at) { return ZeroSetPrimitive(SinglePoint{std::move(at)}); }

ZeroSetPrimitive ZeroSetPrimitive::segment(Point a, Point b) {
  require_same_dim(a.dim(), b.dim(), "Segment");
  if (a == b) throw std::invalid_argument("Segment: endpoints must be distinct");
  return ZeroSetPrimitive(Segment{std::move(a), std::move(b)});
}

ZeroSetPrimitive ZeroSetPrimitive::box(Point lower, Point upper) {
  return ZeroSetPrimitive(AxisBox{Box(std::move(lower), std::move(upper))});
}

std::size_t ZeroSetPrimitive::ambient_dim() const noexcept {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SinglePoint>) return p.at.dim();
        else if constexpr (std::is_same_v<T, Segment>) return p.a.dim();
        else return p.box.dim();
      },
      v_);
}

int ZeroSetPrimitive::intrinsic_dimension() const noexcept {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SinglePoint>) return 0;
        else if constexpr (std::is_same_v<T, Segment>) return 1;
        else {
          int k = 0;
          for (std::size_t i = 0; i < p.box.dim(); ++i) k += p.box.side(i) > 0.0 ? 1 : 0;
          return k;
        }
      },
      v_);
}

double ZeroSetPrimitive::distance(std::span<const double> x) const {
  require_same_dim(x.size(), ambient_dim(), "distance");
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SinglePoint>) return euclidean_distance(x, p.at.coords());
        else if constexpr (std::is_same_v<T, Segment>) return point_segment_distance(x, p);
        else return point_box_distance(x, p.box);
      },
      v_);
}

std::vector<double> ZeroSetPrimitive::closest_point(std::span<const double> x) const {
  require_same_dim(x.size(), ambient_dim(), "closest_point");
  return std::visit(
      [&](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SinglePoint>) {
          return {p.at.coords().begin(), p.at.coords().end()};
        } else if constexpr (std::is_same_v<T, Segment>) {
          double ab2 = 0.0, t = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) {
            const double ab = p.b[i] - p.a[i];
            ab2 += ab * ab;
            t += (x[i] - p.a[i]) * ab;
          }
          return lerp(p.a, p.b, std::clamp(t / ab2, 0.0, 1.0));
        } else {
          std::vector<double> c(x.size());
          for (std::size_t i = 0; i < x.size(); ++i) c[i] = std::clamp(x[i], p.box.lower()[i], p.box.upper()[i]);
          return c;
        }
      },
      v_);
}

std::vector<double> ZeroSetPrimitive::support_point(std::span<const double> u) const {
  require_same_dim(u.size(), ambient_dim(), "support_point");
  return std::visit(
      [&](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SinglePoint>) {
          return {p.at.coords().begin(), p.at.coords().end()};
        } else if constexpr (std::is_same_v<T, Segment>) {
          const auto& end = dot(p.b.coords(), u) > dot(p.a.coords(), u) ? p.b : p.a;
          return {end.coords().begin(), end.coords().end()};
        } else {
          std::vector<double> c(u.size());
          for (std::size_t i = 0; i < u.size(); ++i) c[i] = u[i] > 0.0 ? p.box.upper()[i] : p.box.lower()[i];
          return c;
        }
      },
      v_);
}

double primitive_distance(const ZeroSetPrimitive& p, const ZeroSetPrimitive& q) {
  require_same_dim(p.ambient_dim(), q.ambient_dim(), "primitive_distance");
  return std::visit(
      [&](const auto& a, const auto& b) -> double {
        using A = std::decay_t<decltype(a)>;
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<A, SinglePoint>) return q.distance(a.at.coords());
        else if constexpr (std::is_same_v<B, SinglePoint>) return p.distance(b.at.coords());
        else if constexpr (std::is_same_v<A, Segment> && std::is_same_v<B, Segment>) return segment_segment_distance(a, b);
        else if constexpr (std::is_same_v<A, Segment> && std::is_same_v<B, AxisBox>) return segment_box_distance(a, b.box);
        else if constexpr (std::is_same_v<A, AxisBox> && std::is_same_v<B, Segment>) return segment_box_distance(b, a.box);
        else return box_box_distance(a.box, b.box);
      },
      p.variant(), q.variant());
}

ZeroSet::ZeroSet(std::vector<ZeroSetPrimitive> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("ZeroSet: at least one component required");
  ambient_dim_ = components_.front().ambient_dim();
  for (const auto& c : components_) {
    require_same_dim(c.ambient_dim(), ambient_dim_, "ZeroSet");
    declared_dim_ = std::max(declared_dim_, c.intrinsic_dimension());
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    for (std::size_t j = i + 1; j < components_.size(); ++j) {
      if (!(primitive_distance(components_[i], components_[j]) > 0.0)) {
        throw std::invalid_argument("ZeroSet: components " + std::to_string(i) + " and " + std::to_string(j) +
                                    " are not disjoint");
      }
    }
  }
}

ZeroSet::ZeroSet(std::initializer_list<ZeroSetPrimitive> components)
    : ZeroSet(std::vector<ZeroSetPrimitive>(components)) {}

double ZeroSet::distance(std::span<const double> x) const { return nearest_component(x).first; }

std::pair<double, std::size_t> ZeroSet::nearest_component(std::span<const double> x) const {
  require_same_dim(x.size(), ambient_dim_, "distance_to_zero_set");
  double best = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const double d = components_[k].distance(x);
    if (d < best) {
      best = d;
      idx = k;
    }
  }
  return {best, idx};
}

Ball::Ball(Point center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) throw std::invalid_argument("Ball: radius must be positive");
}

bool Ball::contains(std::span<const double> x) const {
  require_same_dim(x.size(), center_.dim(), "Ball::contains");
  return euclidean_distance(x, center_.coords()) < radius_;
}

double distance_to_zero_set(const Point& x, const ZeroSet& s) { return s.distance(x.coords()); }

double distance_to_zero_set(std::span<const double> x, const ZeroSet& s) { return s.distance(x); }

bool in_epsilon_neighborhood(const Point& x, const ZeroSet& s, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("in_epsilon_neighborhood: eps must be positive");
  return s.distance(x.coords()) < eps;
}

bool ball_intersects_zero_set(const Ball& b, const ZeroSet& s) {
  return s.distance(b.center().coords()) < b.radius();
}

}  // namespace zdr
