#pragma once

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

namespace gcl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Reduces an angle into [0, period).
double wrap_angle(double t, double period = 2 * kPi);

// Subset of the circle invariant under t -> t + π, stored as its image on the
// projective circle [0, π). Each stored arc stands for itself and its antipode.
class ArcSet {
 public:
  struct Arc {
    double lo;
    double hi;
  };

  static ArcSet empty() { return {}; }
  static ArcSet full();
  // Arcs given on the projective circle; they may wrap and overlap.
  static ArcSet from_arcs(std::vector<Arc> arcs);
  // The double cap {t : dist(t, center + jπ) <= half_width}.
  static ArcSet double_cap(double center, double half_width);

  bool is_full() const { return full_; }
  bool is_empty() const { return !full_ && arcs_.empty(); }
  // Disjoint sorted arcs inside [0, π]; an arc crossing 0 appears split.
  std::span<const Arc> half_arcs() const { return arcs_; }
  // Arcs on [0, 2π) with antipodes made explicit, wrap-around merged.
  std::vector<Arc> circle_arcs() const;
  // Number of connected components on the full circle.
  int component_count() const;
  // Total angle on the full circle, in [0, 2π].
  double total_angle() const;
  bool contains(double t) const;
  ArcSet intersect(const ArcSet& other) const;

 private:
  std::vector<Arc> arcs_;
  bool full_ = false;
};

// Cone over the arc [center - half_angle, center + half_angle] and its antipode.
struct Cone2D {
  double center = 0;
  double half_angle = kPi / 2;

  static Cone2D full() { return {0.0, kPi / 2}; }
  static Cone2D make(double center, double half_angle);
  bool is_full() const { return half_angle >= kPi / 2; }
  ArcSet arcs() const;
};

struct Polygon {
  // Counterclockwise, with vertices[i + m] == -vertices[i] for m = size / 2.
  std::vector<Eigen::Vector2d> vertices;
  // Edge i joins vertex i to i + 1 and lies on {x : normals[i].x = offsets[i]}.
  std::vector<Eigen::Vector2d> normals;
  std::vector<double> offsets;
};

struct Strip {
  double normal_angle;  // direction of the unit normal u
  double half_width;    // body is {x : |x.u| < half_width}
};

struct Ellipse {
  Eigen::Matrix2d form;  // body is {x : x^T form x < 1}
};

struct FullPlane {};

class Body2D;

struct Intersection2D {
  std::shared_ptr<const Body2D> first;
  std::shared_ptr<const Body2D> second;
};

// Origin-symmetric convex region of the plane. Immutable value type.
class Body2D {
 public:
  using Kind = std::variant<FullPlane, Polygon, Strip, Ellipse, Intersection2D>;

  Body2D() : kind_(FullPlane{}) {}

  static Body2D full_plane() { return Body2D(); }
  // Full vertex list; must be convex, centrally symmetric and surround the origin.
  static Body2D polygon(std::vector<Eigen::Vector2d> vertices);
  // Half of the vertex list; the antipodal half is appended.
  static Body2D symmetric_polygon(std::vector<Eigen::Vector2d> half);
  static Body2D strip(double normal_angle, double half_width);
  static Body2D ellipse(const Eigen::Matrix2d& form);
  static Body2D intersection(Body2D a, Body2D b);

  const Kind& kind() const { return kind_; }
  bool is_full_plane() const { return std::holds_alternative<FullPlane>(kind_); }

  friend bool operator==(const Body2D& a, const Body2D& b);

 private:
  explicit Body2D(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

// sup{r : r(cos t, sin t) in body}; +∞ along unbounded directions.
double radial_extent(const Body2D& body, double t);
// {t : radial_extent(body, t) >= r}.
ArcSet angular_arcs(const Body2D& body, double r);
// One quarter of the angle of angular_arcs; in [0, π/2].
double angular_length(const Body2D& body, double r);
// Body whose extent is the pointwise minimum of the two extents.
Body2D intersect_min(const Body2D& a, const Body2D& b);
// Body rotated counterclockwise by delta.
Body2D rotate(const Body2D& body, double delta);

double inradius(const Body2D& body);
double circumradius(const Body2D& body);
// Directions mod π where the extent is not smooth.
std::vector<double> kink_angles(const Body2D& body);
// Radii at which the arc structure of angular_arcs can change.
std::vector<double> kink_radii(const Body2D& body);

}  // namespace gcl
