#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <variant>
#include <vector>

namespace zdr {

/// A point in R^d. All coordinates are finite and d >= 1.
class Point {
 public:
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const noexcept { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Closed axis-aligned box [lower, upper]. Used both as a covering region and
/// as a zero-set primitive.
class Box {
 public:
  Box(Point lower, Point upper);

  /// [lo, hi]^d
  static Box cube(std::size_t d, double lo, double hi);

  std::size_t dim() const noexcept { return lower_.dim(); }
  const Point& lower() const noexcept { return lower_; }
  const Point& upper() const noexcept { return upper_; }
  double side(std::size_t i) const noexcept { return upper_[i] - lower_[i]; }
  double min_side() const noexcept;
  double volume() const noexcept;
  bool contains(std::span<const double> x) const noexcept;

  /// All 2^d corners.
  std::vector<Point> corners() const;

 private:
  Point lower_;
  Point upper_;
};

struct SinglePoint {
  Point at;
};

struct Segment {
  Point a;
  Point b;
};

struct AxisBox {
  Box box;
};

/// Point, segment or axis-aligned box. Validated on construction.
class ZeroSetPrimitive {
 public:
  using Variant = std::variant<SinglePoint, Segment, AxisBox>;

  static ZeroSetPrimitive point(Point at);
  static ZeroSetPrimitive segment(Point a, Point b);
  static ZeroSetPrimitive box(Point lower, Point upper);

  std::size_t ambient_dim() const noexcept;
  int intrinsic_dimension() const noexcept;
  double distance(std::span<const double> x) const;
  /// Euclidean projection of x onto the primitive.
  std::vector<double> closest_point(std::span<const double> x) const;
  /// A maximizer of <c, u> over the primitive. Ties on a flat face resolve to
  /// an arbitrary vertex of that face.
  std::vector<double> support_point(std::span<const double> u) const;

  const Variant& variant() const noexcept { return v_; }

 private:
  explicit ZeroSetPrimitive(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Set distance between two primitives (0 iff they intersect).
double primitive_distance(const ZeroSetPrimitive& p, const ZeroSetPrimitive& q);

/// Disjoint union of primitives sharing one ambient dimension.
class ZeroSet {
 public:
  explicit ZeroSet(std::vector<ZeroSetPrimitive> components);
  ZeroSet(std::initializer_list<ZeroSetPrimitive> components);

  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  int declared_dimension() const noexcept { return declared_dim_; }
  bool is_lower_dimensional() const noexcept {
    return static_cast<std::size_t>(declared_dim_) < ambient_dim_;
  }
  const std::vector<ZeroSetPrimitive>& components() const noexcept { return components_; }

  double distance(std::span<const double> x) const;
  /// Distance together with the index of the nearest component.
  std::pair<double, std::size_t> nearest_component(std::span<const double> x) const;

 private:
  std::vector<ZeroSetPrimitive> components_;
  std::size_t ambient_dim_ = 0;
  int declared_dim_ = 0;
};

/// Open ball: membership is ||x - c|| < r.
class Ball {
 public:
  Ball(Point center, double radius);
  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  bool contains(std::span<const double> x) const;

 private:
  Point center_;
  double radius_;
};

double distance_to_zero_set(const Point& x, const ZeroSet& s);
double distance_to_zero_set(std::span<const double> x, const ZeroSet& s);
bool in_epsilon_neighborhood(const Point& x, const ZeroSet& s, double eps);
bool ball_intersects_zero_set(const Ball& b, const ZeroSet& s);

}  // namespace zdr
