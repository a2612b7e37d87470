#include "gcl/symmetrize.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gcl;
using gcl::testing::random_symmetric_polygon;

namespace {

Measure2D measure(int k, double pole = kPi / 2) { return {k, pole, RadialDensity::gaussian()}; }

// Plain bisection on the cap mass, the oracle for cap_epsilon.
double bisect_cap(double target, double alpha, const Measure2D& m) {
  double lo = 0, hi = kPi / 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    if (2 * angular_weight(m.k, m.pole, alpha - mid, alpha + mid) < target) lo = mid; else hi = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

TEST_CASE("cap_epsilon boundary values") {
  const Measure2D m = measure(2, 0.4);
  CHECK(cap_epsilon(0, 1.0, m) == 0.0);
  CHECK(cap_epsilon(m.circle_weight(), 1.0, m) == doctest::Approx(kPi / 2));
  const Measure2D flat = measure(0, 0.9);
  CHECK(cap_epsilon(kPi, 2.2, flat) == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK_THROWS_AS(cap_epsilon(m.circle_weight() * 1.01, 1.0, m), std::domain_error);
}

TEST_CASE("cap_epsilon agrees with bisection") {
  for (int k = 0; k <= 5; ++k) {
    const Measure2D m = measure(k, 0.3);
    for (double alpha : {0.3, 1.0, 1.87, 3.0})
      for (double frac : {0.01, 0.2, 0.5, 0.93}) {
        const double target = frac * m.circle_weight();
        CHECK(cap_epsilon(target, alpha, m) == doctest::Approx(bisect_cap(target, alpha, m)).epsilon(1e-12));
      }
  }
}

TEST_CASE("cone masses are rescaled to the whole circle") {
  const Measure2D m = measure(0);
  const Cone2D cone = Cone2D::make(0.5, 0.25);
  // The whole slice maps to the whole circle; half of it to a quarter-turn cap.
  CHECK(cap_epsilon(2 * 0.5, 0.0, m, cone) == doctest::Approx(kPi / 2));
  CHECK(cap_epsilon(0.5, 0.0, m, cone) == doctest::Approx(kPi / 4));
}

TEST_CASE("strip with axis alpha is a fixed point") {
  for (int k : {1, 2, 4}) {
    const Measure2D m = measure(k);
    for (double axis : {0.0, 0.7, kPi / 2}) {
      const Body2D strip = Body2D::strip(axis + kPi / 2, 0.8);
      const AngularProfile p = double_cap_symmetrize(strip, axis, m);
      for (std::size_t i = 0; i < p.radii().size(); ++i) {
        const double r = p.radii()[i];
        const double expect = r <= 0.8 ? kPi / 2 : std::asin(0.8 / r);
        CHECK(p.epsilons()[i] == doctest::Approx(expect).epsilon(1e-11));
      }
      CHECK(p.mass_residual() <= 1e-12);
    }
  }
}

TEST_CASE("width check on exact strip profiles") {
  const Measure2D m = measure(2);
  const AngularProfile p = strip_profile(0.3, 1.2, m);
  const WidthReport rep = width_decreasing_check(p);
  CHECK(rep.pass);
  CHECK(std::abs(rep.worst_margin) <= 1e-12);
  CHECK(std::abs(rep.fd_worst_margin) <= 1e-6);
  // The mass-matched symmetral of a strip reaches the same equality case.
  const AngularProfile q = double_cap_symmetrize(Body2D::strip(0.3 + kPi / 2, 1.2), 0.3, m);
  CHECK(std::abs(width_decreasing_check(q).fd_worst_margin) <= 1e-6);
}

TEST_CASE("constant angular profile fails the width check") {
  const AngularProfile p(0.0, [](double) { return 0.5; }, measure(2), radius_grid(0.1, 5, 64));
  const WidthReport rep = width_decreasing_check(p);
  CHECK_FALSE(rep.pass);
  CHECK(rep.worst_margin > 0);
  CHECK(rep.fd_worst_margin > 0);
}

TEST_CASE("pole symmetrals of random polygons are width-decreasing") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Measure2D m = measure(1 + trial % 4);
    const Body2D p = random_symmetric_polygon(rng);
    const AngularProfile prof = double_cap_symmetrize(p, m.pole, m);
    CHECK(prof.mass_residual() <= 1e-9);
    CHECK(width_decreasing_check(prof).pass);
  }
}

TEST_CASE("k = 0 symmetrisation preserves body mass") {
  std::mt19937_64 rng(23);
  const Measure2D m = measure(0);
  for (int trial = 0; trial < 5; ++trial) {
    const Body2D p = random_symmetric_polygon(rng);
    const AngularProfile prof = double_cap_symmetrize(p, 0.4, m);
    auto integrand = [&](double r) { return r * std::exp(-r * r / 2) * m.arc_mass(prof.cap(r)); };
    auto breaks = kink_radii(p);
    const double after = integrate(integrand, 0.0, 12.0, std::span<const double>(breaks)).value;
    CHECK(after == doctest::Approx(body_mass(m, p).value).epsilon(1e-9));
  }
}

TEST_CASE("three-step procedure on strips") {
  const Measure2D m = measure(2);
  const Body2D normal_at_pole = Body2D::strip(m.pole, 0.9);
  SUBCASE("identical strips stop at step one") {
    const auto res = three_step_procedure(normal_at_pole, normal_at_pole, m);
    CHECK(res.step == 1);
    // The perpendicular symmetral reproduces the strip, whose arcs center on its axis.
    for (std::size_t i = 0; i < res.first.radii().size(); ++i) {
      const double r = res.first.radii()[i];
      CHECK(res.first.epsilons()[i] == doctest::Approx(r <= 0.9 ? kPi / 2 : std::asin(0.9 / r)).epsilon(1e-11));
    }
    CHECK(res.second.mass_residual() <= 1e-9);
  }
  SUBCASE("orthogonal strips obey the per-radius overlap bound") {
    const auto res = three_step_procedure(normal_at_pole, Body2D::strip(m.pole + kPi / 2, 0.6), m);
    CHECK(res.step == 1);
    CHECK(res.inter_bound_holds);
    CHECK_FALSE(res.per_radius.empty());
  }
}

TEST_CASE("three-step procedure on random polygons conserves masses") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Measure2D m = measure(2 + trial % 2);
    const auto res = three_step_procedure(random_symmetric_polygon(rng), random_symmetric_polygon(rng), m);
    CHECK(res.step >= 1);
    CHECK(res.step <= 3);
    CHECK(res.first.mass_residual() <= 1e-9);
    CHECK(res.second.mass_residual() <= 1e-9);
    CHECK_FALSE(res.trace.empty());
  }
}

TEST_CASE("reduce_to_strips on aligned orthogonal strips is the identity") {
  const Measure2D m = measure(2);
  const Body2D k1 = Body2D::strip(m.pole, 0.9), k2 = Body2D::strip(m.pole + kPi / 2, 0.6);
  const ChainReport rep = reduce_to_strips(k1, k2, Cone2D::full(), m);
  CHECK(rep.step == 1);
  CHECK(rep.r0 == doctest::Approx(std::hypot(0.9, 0.6)).epsilon(1e-9));
  CHECK(rep.strip1.half_width == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(rep.strip2.half_width == doctest::Approx(0.6).epsilon(1e-9));
  REQUIRE(rep.stages.size() == 5);
  for (const auto& s : rep.stages) CHECK(s.ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.monotone);
}

TEST_CASE("full plane partner gives ratio one") {
  std::mt19937_64 rng(41);
  const Measure2D m = measure(3);
  const ChainReport rep = reduce_to_strips(random_symmetric_polygon(rng), Body2D::full_plane(), Cone2D::full(), m);
  REQUIRE_FALSE(rep.stages.empty());
  CHECK(rep.stages.back().ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.stages.front().ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("beta scan finds the good strip when K1 is a strip") {
  const Body2D strip = Body2D::strip(0.6, 0.7);
  std::mt19937_64 rng(43);
  const Body2D other = random_symmetric_polygon(rng);
  std::vector<double> betas;
  for (int i = 0; i < 12; ++i) betas.push_back(kPi * i / 12);
  betas.push_back(0.6);
  const auto rep = beta_scan(strip, other, [](double) { return Cone2D::full(); }, 2, betas);
  REQUIRE(rep.beta0.has_value());
  const auto& last = rep.rows.back();
  CHECK(last.good_strip);
  CHECK(rep.max_arcs >= 2);
}
