#pragma once

#include "gcl/geometry2d.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace gcl::testing {

// Convex hull (counterclockwise, no collinear points) by the monotone chain.
inline std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t n = 0;
  for (const auto& p : pts) {
    while (n >= 2 && cross(hull[n - 2], hull[n - 1], p) <= 0) --n;
    hull[n++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = n + 1; i-- > 0;) {
    while (n >= lower && cross(hull[n - 2], hull[n - 1], pts[i]) <= 0) --n;
    hull[n++] = pts[i];
  }
  hull.resize(n - 1);
  return hull;
}

// Symmetric convex polygon: hull of ±p for random points with radii in [0.3, 3].
inline Body2D random_symmetric_polygon(std::mt19937_64& rng, int points = 6) {
  std::uniform_real_distribution<double> angle(0, 2 * kPi), radius(0.3, 3.0);
  for (;;) {
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < points; ++i) {
      const double t = angle(rng), r = radius(rng);
      pts.emplace_back(r * std::cos(t), r * std::sin(t));
      pts.push_back(-pts.back());
    }
    auto hull = convex_hull(pts);
    if (hull.size() < 4) continue;
    try {
      return Body2D::polygon(hull);
    } catch (const std::exception&) {
      // Nearly degenerate hulls are rejected by validation; draw again.
    }
  }
}

// Membership of a point in the closed body, from first principles.
inline bool polygon_contains(const std::vector<Eigen::Vector2d>& ccw, const Eigen::Vector2d& p) {
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const auto& a = ccw[i];
    const auto& b = ccw[(i + 1) % ccw.size()];
    if ((b - a).x() * (p - a).y() - (b - a).y() * (p - a).x() < 0) return false;
  }
  return true;
}

// Distance to the boundary along direction t, by intersecting the ray with every edge.
inline double ray_polygon_extent(const std::vector<Eigen::Vector2d>& ccw, double t) {
  const Eigen::Vector2d d(std::cos(t), std::sin(t));
  double best = 0;
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const Eigen::Vector2d a = ccw[i], e = ccw[(i + 1) % ccw.size()] - ccw[i];
    Eigen::Matrix2d sys;
    sys << d, -e;
    if (std::abs(sys.determinant()) < 1e-300) continue;
    const Eigen::Vector2d sol = sys.colPivHouseholderQr().solve(a);
    if (sol(1) >= -1e-14 && sol(1) <= 1 + 1e-14 && sol(0) > best) best = sol(0);
  }
  return best;
}

inline std::vector<Eigen::Vector2d> vertices_of(const Body2D& body) {
  return std::get<Polygon>(body.kind()).vertices;
}

}  // namespace gcl::testing
