#include "gcl/measures.hpp"
#include "gcl/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace gcl;

namespace {

// Composite Simpson rule, independent of the library integrator.
template <class F>
double simpson(F f, double a, double b, int n = 200000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

// Cartesian mass of the strip |x| < h in the pole frame: ∫|x|^k e^{-x²/2} dx · √(2π).
double strip_mass_cartesian(int k, double h) {
  return simpson([k](double x) { return std::pow(std::abs(x), k) * std::exp(-x * x / 2); }, -h, h) *
         std::sqrt(2 * kPi);
}

}  // namespace

TEST_CASE("gaussian radial masses") {
  const auto g = RadialDensity::gaussian();
  CHECK(radial_mass(g, 0, kInf) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(radial_mass(g, 0, 1) == doctest::Approx(1 - std::exp(-0.5)).epsilon(1e-14));
  CHECK(radial_mass(g, 2, kInf) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(radial_mass(g, 3, 0) == 0.0);
}

TEST_CASE("incomplete gamma path matches direct quadrature") {
  const auto g = RadialDensity::gaussian();
  for (int k = 0; k <= 8; ++k)
    for (double X : {0.1, 1.0, 3.0, kInf}) {
      const double upper = std::min(X, 40.0);
      const double oracle = simpson([k](double r) { return std::pow(r, k + 1) * std::exp(-r * r / 2); }, 0, upper);
      CHECK(std::abs(radial_mass(g, k, X) - oracle) <= 1e-12 * std::max(1.0, oracle));
    }
}

TEST_CASE("custom densities") {
  const auto exp_density = RadialDensity::custom([](double r) { return std::exp(-r); }, 60.0, "exp");
  // ∫ r e^{-r} = 1 and ∫ r^3 e^{-r} = 6.
  CHECK(radial_mass(exp_density, 0, kInf) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(radial_mass(exp_density, 2, kInf) == doctest::Approx(6.0).epsilon(1e-10));
  CHECK_THROWS_AS(RadialDensity::custom([](double) { return 1.0; }, kInf), ConfigError);
  const auto blowup = RadialDensity::custom([](double r) { return 1.0 / std::pow(r, 3); }, 1.0, "singular");
  CHECK_THROWS_AS(radial_mass(blowup, 0, kInf), ConfigError);
}

TEST_CASE("angular weights") {
  CHECK(angular_weight(0, 0, -kPi / 2, kPi / 2) == doctest::Approx(kPi));
  // Antiderivative of cos² is (t + sin t cos t) / 2.
  CHECK(angular_weight(2, 0, -kPi / 2, kPi / 2) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(angular_weight(2, kPi / 2, 0, kPi) == doctest::Approx(kPi / 2).epsilon(1e-15));
  for (int k = 1; k <= 7; ++k)
    for (double a : {-2.0, -0.4, 0.3, 1.9})
      for (double b : {0.7, 2.5, 4.0, 6.0}) {
        if (b <= a) continue;
        // Split at the kinks of |cos| so Simpson stays high order.
        std::vector<double> cuts{a, b};
        for (int j = -3; j <= 3; ++j)
          if (const double kink = 0.6 + kPi / 2 + j * kPi; kink > a && kink < b) cuts.push_back(kink);
        std::sort(cuts.begin(), cuts.end());
        double oracle = 0;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
          oracle += simpson([k](double t) { return std::pow(std::abs(std::cos(t - 0.6)), k); }, cuts[c], cuts[c + 1]);
        CHECK(angular_weight(k, 0.6, a, b) == doctest::Approx(oracle).epsilon(1e-11));
      }
}

TEST_CASE("normalized full plane has probability one") {
  Measure2D m;
  m.k = 0;
  MassOptions opt;
  opt.probability = true;
  CHECK(body_mass(m, Body2D::full_plane(), Cone2D::full(), opt).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.normalization() == doctest::Approx(1 / kPi));
  m.k = 3;
  CHECK(body_mass(m, Body2D::full_plane(), Cone2D::full(), opt).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("k = 0 cone masses are angle fractions") {
  Measure2D m;
  const double total = body_mass(m, Body2D::full_plane()).value;
  std::mt19937_64 rng(2);
  const Body2D p = gcl::testing::random_symmetric_polygon(rng);
  for (double rho : {0.1, 0.5, 1.2, kPi / 2}) {
    CHECK(body_mass(m, Body2D::full_plane(), Cone2D::make(0.4, rho)).value ==
          doctest::Approx(2 * rho / kPi * total).epsilon(1e-12));
  }
  // Rotation invariance for k = 0.
  const double base = body_mass(m, p).value;
  CHECK(body_mass(m, rotate(p, 0.9)).value == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("pole-normal strip mass is separable") {
  for (int k = 1; k <= 4; ++k)
    for (double h : {0.3, 1.0, 2.5}) {
      Measure2D m;
      m.k = k;
      m.pole = 1.1;
      const double polar = body_mass(m, Body2D::strip(m.pole, h)).value;
      CHECK(std::abs(polar - strip_mass_cartesian(k, h)) <= 1e-9 * polar);
    }
}

TEST_CASE("mass is monotone under inclusion") {
  std::mt19937_64 rng(4);
  Measure2D m;
  m.k = 2;
  m.pole = 0.3;
  for (int i = 0; i < 20; ++i) {
    const Body2D a = gcl::testing::random_symmetric_polygon(rng);
    const Body2D b = gcl::testing::random_symmetric_polygon(rng);
    const Body2D both = intersect_min(a, b);
    const double ma = body_mass(m, a).value, mb = body_mass(m, both).value;
    CHECK(mb <= ma * (1 + 1e-12));
  }
}

TEST_CASE("rotation covariance") {
  std::mt19937_64 rng(6);
  for (int k : {1, 2, 3}) {
    const Body2D p = gcl::testing::random_symmetric_polygon(rng);
    const Cone2D c = Cone2D::make(0.2, 0.7);
    const double delta = 0.83;
    Measure2D m{k, 1.0, RadialDensity::gaussian()};
    Measure2D shifted{k, 1.0 - delta, RadialDensity::gaussian()};
    const double lhs = body_mass(m, rotate(p, delta), Cone2D::make(c.center + delta, c.half_angle)).value;
    const double rhs = body_mass(shifted, p, c).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("sin^k concavity checks") {
  const int n = 201;
  for (int k = 1; k <= 4; ++k) {
    std::vector<double> x(n), f(n);
    for (int i = 0; i < n; ++i) {
      x[i] = -kPi / 2 + 1e-6 + (kPi - 2e-6) * i / (n - 1);
      f[i] = std::pow(std::cos(x[i]), k);
    }
    CHECK(sin_k_concavity_check(x, f, k, 1e-10).pass);
  }
  {
    // Constant 1 on (−π/4, π/4): the bound 1/cos(Δ/2) exceeds 1 for every pair.
    std::vector<double> x(n), f(n, 1.0);
    for (int i = 0; i < n; ++i) x[i] = -kPi / 4 + kPi / 2 * i / (n - 1);
    const auto rep = sin_k_concavity_check(x, f, 1);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_margin == doctest::Approx(1 - 1 / std::cos(kPi / 4)).epsilon(1e-12));
  }
  {
    std::vector<double> x(n), f(n);
    for (int i = 0; i < n; ++i) {
      x[i] = -1 + 2.0 * i / (n - 1);
      f[i] = std::exp(x[i]);
    }
    CHECK_FALSE(sin_k_concavity_check(x, f, 1).pass);
  }
  std::vector<double> x{0, 1, 2}, f{1, 1, 1};
  CHECK_THROWS(sin_k_concavity_check(x, f, 0));
}

TEST_CASE("single crossing against the matched cos^k") {
  // f = cos^k(t + s) decreases on [0, τ]; h = c cos^k t agrees with f at ε.
  for (int k = 1; k <= 4; ++k)
    for (double s : {0.1, 0.4})
      for (double eps : {0.2, 0.6, 1.0}) {
        const double tau = kPi / 2 - s;
        auto f = [&](double t) { return std::pow(std::cos(t + s), k); };
        const double c = f(eps) / std::pow(std::cos(eps), k);
        for (int i = 0; i <= 400; ++i) {
          const double t = tau * i / 400.0;
          const double h = c * std::pow(std::cos(t), k);
          if (t <= eps) CHECK(f(t) >= h - 1e-14);
          else CHECK(f(t) <= h + 1e-14);
        }
      }
}
