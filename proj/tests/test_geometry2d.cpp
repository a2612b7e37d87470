#include "gcl/geometry2d.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gcl;
using gcl::testing::random_symmetric_polygon;

namespace {

Body2D unit_square() {
  return Body2D::symmetric_polygon({{1, -1}, {1, 1}});
}

// Fraction of a dense angle sample whose membership disagrees with the arc set.
double arc_disagreement(const Body2D& body, const std::vector<Eigen::Vector2d>& verts, double r, int samples) {
  const ArcSet arcs = angular_arcs(body, r);
  int bad = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = 2 * kPi * (i + 0.5) / samples;
    const bool inside = gcl::testing::polygon_contains(verts, r * Eigen::Vector2d(std::cos(t), std::sin(t)));
    if (inside != arcs.contains(t)) ++bad;
  }
  return static_cast<double>(bad) / samples;
}

}  // namespace

TEST_CASE("strip extent along its normal and its axis") {
  const Body2D s = Body2D::strip(0, 1);
  CHECK(radial_extent(s, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isinf(radial_extent(s, kPi / 2)));
}

TEST_CASE("square extent on the diagonal matches a ray/edge oracle") {
  const Body2D sq = unit_square();
  const double oracle = gcl::testing::ray_polygon_extent(gcl::testing::vertices_of(sq), kPi / 4);
  CHECK(oracle == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(radial_extent(sq, kPi / 4) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("polygon extents agree with the ray oracle on random bodies") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Body2D p = random_symmetric_polygon(rng);
    const auto verts = gcl::testing::vertices_of(p);
    for (int i = 0; i < 200; ++i) {
      const double t = 2 * kPi * i / 200.0 + 0.001;
      CHECK(radial_extent(p, t) == doctest::Approx(gcl::testing::ray_polygon_extent(verts, t)).epsilon(1e-11));
    }
  }
}

TEST_CASE("central symmetry of extents") {
  std::mt19937_64 rng(5);
  Eigen::Matrix2d form;
  form << 2.0, 0.3, 0.3, 0.5;
  const std::vector<Body2D> bodies{random_symmetric_polygon(rng), Body2D::strip(0.4, 0.7), Body2D::ellipse(form),
                                   intersect_min(Body2D::strip(1.0, 0.5), Body2D::ellipse(form))};
  for (const auto& b : bodies)
    for (int i = 0; i < 100; ++i) {
      const double t = 0.0628 * i;
      const double a = radial_extent(b, t), c = radial_extent(b, t + kPi);
      CHECK(std::abs(a - c) <= 1e-12 * std::max(1.0, a));
    }
  // Polygons use |d.n|, so only the rounding of t + π itself separates the two values.
  const auto& poly = bodies.front();
  for (int i = 0; i < 100; ++i) {
    const double a = radial_extent(poly, 0.0628 * i), c = radial_extent(poly, 0.0628 * i + kPi);
    CHECK(std::abs(a - c) <= 1e-14 * a);
  }
}

TEST_CASE("strip arcs at radius two") {
  const Body2D s = Body2D::strip(0, 1);
  const ArcSet arcs = angular_arcs(s, 2);
  // Oracle: the circle of radius r meets |x| < h where |cos t| <= h / r.
  const double half = kPi / 2 - std::acos(0.5);
  CHECK(arcs.total_angle() == doctest::Approx(2 * 2 * half).epsilon(1e-13));
  CHECK(arcs.contains(kPi / 2));
  CHECK(arcs.contains(-kPi / 2));
  CHECK_FALSE(arcs.contains(0));
  CHECK(arcs.component_count() == 2);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const double t = 2 * kPi * (i + 0.5) / 10000;
    if ((std::abs(2 * std::cos(t)) < 1) != arcs.contains(t)) ++bad;
  }
  CHECK(bad == 0);
  CHECK(angular_length(s, 2) == doctest::Approx(kPi / 6).epsilon(1e-13));
}

TEST_CASE("full circle below the inradius") {
  CHECK(angular_arcs(Body2D::strip(0, 1), 0.5).is_full());
  const Body2D cross = intersect_min(Body2D::strip(0, 1), Body2D::strip(kPi / 2, 1));
  CHECK(angular_arcs(cross, 0.5).is_full());
  CHECK(angular_length(cross, 0.5) == doctest::Approx(kPi / 2));
  std::mt19937_64 rng(3);
  const Body2D p = random_symmetric_polygon(rng);
  CHECK(angular_length(p, 0.99 * inradius(p)) == doctest::Approx(kPi / 2));
  CHECK(angular_arcs(p, 1.01 * circumradius(p)).is_empty());
}

TEST_CASE("strip angular length decreases to zero") {
  const Body2D s = Body2D::strip(0.3, 1);
  double prev = angular_length(s, 1.0 + 1e-9);
  for (double r = 1.1; r < 1000; r *= 1.3) {
    const double cur = angular_length(s, r);
    CHECK(cur < prev);
    CHECK(cur == doctest::Approx(std::asin(1 / r)).epsilon(1e-12));
    prev = cur;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("intersect_min identities") {
  const Body2D s = Body2D::strip(0.2, 1.5);
  CHECK(intersect_min(Body2D::full_plane(), s) == s);
  CHECK(intersect_min(s, s) == s);
  const Body2D cross = intersect_min(Body2D::strip(0, 1), Body2D::strip(kPi / 2, 1));
  for (int i = 0; i < 360; ++i) {
    const double t = kPi * i / 180 + 1e-3;
    const double oracle = std::min(1 / std::abs(std::cos(t)), 1 / std::abs(std::sin(t)));
    CHECK(radial_extent(cross, t) == doctest::Approx(oracle).epsilon(1e-13));
  }
}

TEST_CASE("random polygon arcs agree with a dense membership scan") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const Body2D p = random_symmetric_polygon(rng);
    const auto verts = gcl::testing::vertices_of(p);
    const double lo = inradius(p), hi = circumradius(p);
    for (double f : {0.5, 1.01, 1.2, 1.5, 1.9}) {
      const double r = std::min(lo * f, 0.999 * hi);
      CHECK(arc_disagreement(p, verts, r, 10000) <= 2e-4);
    }
  }
}

TEST_CASE("matched strip dominates the angular length of a convex body") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Body2D p = random_symmetric_polygon(rng);
    const double hi = circumradius(p);
    for (double r = inradius(p) * 1.001; r < hi; r *= 1.07) {
      const double theta = angular_length(p, r);
      if (theta >= kPi / 2) continue;
      const double h = r * std::sin(theta);
      for (double s = r * 1.05; s < hi; s *= 1.05) CHECK(angular_length(p, s) <= std::asin(std::min(1.0, h / s)) + 1e-10);
    }
  }
}

TEST_CASE("rotation and ellipse geometry") {
  Eigen::Matrix2d form = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  const Body2D e = Body2D::ellipse(form);
  CHECK(radial_extent(e, 0) == doctest::Approx(1.0));
  CHECK(radial_extent(e, kPi / 2) == doctest::Approx(0.5));
  const Body2D turned = rotate(e, 0.7);
  for (int i = 0; i < 50; ++i) CHECK(radial_extent(turned, 0.1 * i + 0.7) == doctest::Approx(radial_extent(e, 0.1 * i)));
  CHECK(inradius(e) == doctest::Approx(0.5));
  CHECK(circumradius(e) == doctest::Approx(1.0));
}

TEST_CASE("validation rejects bad bodies") {
  CHECK_THROWS(Body2D::polygon({{1, 0}, {0, 1}, {-1, 0}}));
  CHECK_THROWS(Body2D::polygon({{2, 0}, {0, 1}, {-1, 0}, {0, -1}}));
  Eigen::Matrix2d bad;
  bad << 1, 0, 0, -1;
  CHECK_THROWS(Body2D::ellipse(bad));
  CHECK_THROWS(Cone2D::make(0, 0));
}

TEST_CASE("arc sets are continuous through vertex radii") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const Body2D body = testing::random_symmetric_polygon(rng);
    for (const auto& v : std::get<Polygon>(body.kind()).vertices) {
      const double r = v.norm();
      const double at = angular_arcs(body, r).total_angle();
      CHECK(std::abs(at - angular_arcs(body, r * (1 - 1e-10)).total_angle()) <= 1e-6);
      CHECK(std::abs(at - angular_arcs(body, r * (1 + 1e-10)).total_angle()) <= 1e-6);
    }
  }
}
