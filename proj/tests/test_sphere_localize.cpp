#include "gcl/sphere_localize.hpp"

#include "gcl/measures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gcl;

namespace {

double g_tilted(const Vec3& x) { return 2.0 + x.dot(Vec3(0.3, 0.5, -0.2)) + x.z() * x.z(); }
double g_bump(const Vec3& x) { return std::exp(0.7 * x.dot(Vec3(0.6, -0.48, 0.64))); }
double one(const Vec3&) { return 1.0; }

Eigen::VectorXd unit(int n, int i) { return Eigen::VectorXd::Unit(n, i); }

SphericalRegion small_cap() {
  return SphericalRegion({Vec3(0, 0, 1), Vec3(0.9, 0, 1), Vec3(-0.5, 0.8, 1), Vec3(-0.5, -0.8, 1), Vec3(0.2, 0.3, 1)});
}

}  // namespace

TEST_CASE("sphere quadrature reproduces areas and moments") {
  const SphericalRegion sphere;
  CHECK(std::abs(region_area(sphere) - 4 * kPi) <= 1e-8);
  CHECK(std::abs(region_area(SphericalRegion({Vec3(0.3, -1, 2)})) - 2 * kPi) <= 1e-8);
  // A lune of opening θ has area 2θ.
  const double theta = 0.7;
  const SphericalRegion lune({Vec3(0, 1, 0), Vec3(std::sin(theta), -std::cos(theta), 0)});
  CHECK(std::abs(region_area(lune) - 2 * theta) <= 1e-10);
  // ∫ exp(a·x) over the sphere is 4π sinh|a| / |a|.
  const Vec3 a(0.9, -0.4, 1.3);
  const double exact = 4 * kPi * std::sinh(a.norm()) / a.norm();
  const auto q = sphere_integral(sphere, [&](const Vec3& x) { return std::exp(a.dot(x)); }, 7);
  CHECK(std::abs(q.value - exact) <= 1e-4 * exact);
  CHECK(std::abs(q.richardson - exact) < std::abs(q.value - exact));
  CHECK(q.error > 0);
}

TEST_CASE("area is additive under a cut") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 20; ++trial) {
    SphericalRegion r;
    for (int c = 0; c < 3; ++c) {
      const SphericalRegion next = r.cut(Vec3(z(rng), z(rng), z(rng)));
      if (!next.is_empty()) r = next;
    }
    const Vec3 n(z(rng), z(rng), z(rng));
    const double whole = region_area(r), plus = region_area(r.cut(n)), minus = region_area(r.cut(-n));
    CHECK(std::abs(plus + minus - whole) <= 1e-8);
  }
}

TEST_CASE("region membership and emptiness") {
  const SphericalRegion cap = small_cap();
  CHECK(cap.contains(Vec3(0, 0, 1)));
  CHECK_FALSE(cap.contains(Vec3(0, 0, -1)));
  const SphericalRegion empty = SphericalRegion({Vec3(0, 0, 1), Vec3(0, 0, -1)});
  CHECK(empty.is_empty());
  CHECK_THROWS_AS(SphericalRegion({Vec3::Zero()}), std::invalid_argument);
}

TEST_CASE("needle integrals") {
  const Needle nd = Needle::half_circle(unit(3, 0), unit(3, 1), 0.4, 1);
  CHECK(needle_integral([](double) { return 1.0; }, nd) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(needle_integral([](double t) { return std::cos(t - 0.4); }, nd) == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(needle_integral([](double t) { return t < 0.4 ? 1.0 : 0.0; }, nd) == doctest::Approx(0.5).epsilon(1e-10));
  for (int k = 0; k <= 5; ++k) {
    const Needle part = Needle::make(unit(4, 1), unit(4, 3), 0.2, 1.1, 0.5, k);
    CHECK(needle_integral([](double) { return 1.0; }, part) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(part.point(0.7).norm() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(Needle::make(unit(3, 0), unit(3, 0), 0, 1, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(Needle::make(unit(3, 0), unit(3, 1), 0, 3.5, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(Needle::make(unit(3, 0), unit(3, 1), 0, 1, 2.0, 1), std::invalid_argument);
}

TEST_CASE("constant G halving on the full sphere") {
  const SphericalRegion sphere;
  const auto h = hemisphere_halving(sphere, one, one);
  CHECK(h.converged);
  CHECK(h.positive);
  const auto [r1, r2] = halving_residuals(sphere, one, one, h.normal, 7);
  CHECK(std::abs(r1) <= 1e-8);
  CHECK(std::abs(r2) <= 1e-8);
}

TEST_CASE("halving with a signed linear G recomputes to the reported residuals") {
  const SphericalRegion sphere;
  const Vec3 e(0.2, -0.4, 0.9);
  auto lin = [&](const Vec3& x) { return x.dot(e); };
  const auto h = hemisphere_halving(sphere, lin, one);
  CHECK(h.converged);
  const auto [r1, r2] = halving_residuals(sphere, lin, one, h.normal, 7);
  CHECK(std::abs(r1 - h.residual1) <= 1e-12);
  CHECK(std::abs(r2 - h.residual2) <= 1e-12);
  CHECK(std::abs(r1) <= 1e-7 * 4 * kPi);
  CHECK(std::abs(r2) <= 1e-7 * 4 * kPi);
}

TEST_CASE("halving a small cap with generic positive G") {
  const SphericalRegion cap = small_cap();
  const auto h = hemisphere_halving(cap, g_tilted, g_bump);
  CHECK(h.converged);
  CHECK(h.positive);
  // Brute-force recomputation of both halves.
  const double p1 = sphere_integral(cap.cut(h.normal), g_tilted, 7).value;
  const double m1 = sphere_integral(cap.cut(-h.normal), g_tilted, 7).value;
  const double p2 = sphere_integral(cap.cut(h.normal), g_bump, 7).value;
  const double m2 = sphere_integral(cap.cut(-h.normal), g_bump, 7).value;
  const double s1 = sphere_integral(cap, g_tilted, 7).value, s2 = sphere_integral(cap, g_bump, 7).value;
  CHECK(std::abs(p1 - m1) <= 1e-8 * s1);
  CHECK(std::abs(p2 - m2) <= 1e-8 * s2);
  CHECK(std::min({p1, m1, p2, m2}) > 0);
}

TEST_CASE("halving residuals shrink as the quadrature is refined") {
  const SphericalRegion cap = small_cap();
  HalvingOptions opt;
  double previous = kInf;
  for (int depth : {3, 5, 7}) {
    opt.depth = depth;
    opt.coarse_depth = std::min(depth, 3);
    const auto h = hemisphere_halving(cap, g_tilted, g_bump, opt);
    const auto [r1, r2] = halving_residuals(cap, g_tilted, g_bump, h.normal, 9);
    const double size = std::max(std::abs(r1), std::abs(r2));
    CHECK(size < previous);
    previous = size;
  }
}

TEST_CASE("a constrained cut stays on the requested great circle") {
  HalvingOptions opt;
  opt.orthogonal_to = Vec3(0, 0, 1);
  const auto h = hemisphere_halving(small_cap(), g_tilted, one, opt);
  CHECK(std::abs(h.normal.z()) <= 1e-12);
}

TEST_CASE("width of simple regions") {
  CHECK(region_width(SphericalRegion()).width == doctest::Approx(kPi / 2));
  CHECK(region_width(SphericalRegion({Vec3(0, 0, 1)})).width == doctest::Approx(kPi / 2));
  const double theta = 0.3;
  const SphericalRegion lune({Vec3(0, 1, 0), Vec3(std::sin(theta), -std::cos(theta), 0)});
  // A lune's two vertices are antipodal, so its width is half its opening.
  CHECK(region_width(lune).width == doctest::Approx(theta / 2).epsilon(1e-6));
  const SphericalRegion band({Vec3(0, 0, 1), Vec3(0, 0.05, -1), Vec3(1, 0, 0)});
  CHECK(region_width(band).width <= std::atan(0.05) + 1e-6);
}

TEST_CASE("pancake depth zero returns the input") {
  const SphericalRegion cap = small_cap();
  const auto rep = pancake_iterate(cap, g_tilted, g_bump, 0);
  REQUIRE(rep.regions.size() == 1);
  CHECK(rep.regions[0].normals().size() == cap.normals().size());
  CHECK(rep.steps.empty());
  CHECK_FALSE(rep.needle.has_value());
}

TEST_CASE("constant G pancakes halve the area each step") {
  const SphericalRegion sphere;
  const double full = region_area(sphere);
  const auto rep = pancake_iterate(sphere, one, one, 6);
  REQUIRE(rep.steps.size() == 6);
  for (std::size_t d = 1; d < rep.regions.size(); ++d) {
    const double ratio = region_area(rep.regions[d]) / full;
    CHECK(std::abs(ratio * std::pow(2.0, static_cast<double>(d)) - 1) <= 1e-3);
  }
  CHECK(rep.all_positive);
}

TEST_CASE("generic pancake reaches a thin region with positive integrals") {
  PancakeOptions opt;
  opt.target_width = 0.05;
  const auto rep = pancake_iterate(SphericalRegion(), g_tilted, g_bump, 30, opt);
  CHECK(rep.reached_target);
  CHECK(rep.achieved_width < 0.05);
  CHECK(rep.all_positive);
  for (const auto& s : rep.steps) {
    CHECK(s.g1 > 0);
    CHECK(s.g2 > 0);
  }
  // Nested regions.
  for (std::size_t i = 1; i < rep.regions.size(); ++i)
    CHECK(rep.regions[i].normals().size() == rep.regions[i - 1].normals().size() + 1);
}

TEST_CASE("needle fitted to a thin constant-density pancake has exponent near one") {
  // Cuts through a common axis produce lunes, whose thickness profile is sin-affine.
  PancakeOptions opt;
  opt.target_width = 0.02;
  opt.halving.orthogonal_to = Vec3(0, 0, 1);
  const auto rep = pancake_iterate(SphericalRegion(), one, one, 30, opt);
  REQUIRE(rep.needle.has_value());
  MESSAGE("fitted exponent " << rep.needle->exponent << " rms " << rep.needle->rms);
  CHECK(std::abs(rep.needle->exponent - 1) <= 0.1);
}

TEST_CASE("Hausdorff distance between regions") {
  const SphericalRegion cap = small_cap();
  CHECK(region_hausdorff(cap, cap) == doctest::Approx(0.0));
  const SphericalRegion hemi({Vec3(0, 0, 1)}), quarter({Vec3(0, 0, 1), Vec3(1, 0, 0)});
  CHECK(region_hausdorff(hemi, quarter) == doctest::Approx(kPi / 2).epsilon(1e-3));
}

TEST_CASE("needle functional") {
  const Needle nd = Needle::half_circle(unit(3, 0), unit(3, 1), 0.0, 2);
  const Body2D plane = Body2D::full_plane();
  const Body2D s1 = Body2D::strip(0.0, 0.7), s2 = Body2D::strip(kPi / 2, 0.4);
  CHECK(needle_F(nd, plane, plane) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(needle_F(nd, s1, plane) == doctest::Approx(1.0).epsilon(1e-12));
  // Orthogonal aligned strips with the pole on a strip normal.
  CHECK(std::abs(needle_F(nd, s1, s2) - 1) <= 1e-9);

  const Needle part = Needle::make(unit(3, 0), unit(3, 2), 0.1, 1.2, 0.6, 3);
  Eigen::Matrix2d form;
  form << 1.2, 0.3, 0.3, 0.5;
  const Body2D e = Body2D::ellipse(form), s = Body2D::strip(1.0, 0.6);
  const double f = needle_F(part, e, s);
  CHECK(needle_F(part, s, e) == doctest::Approx(f).epsilon(1e-12));
  CHECK(needle_F(part.antipodal(), e, s) == doctest::Approx(f).epsilon(1e-12));
}
