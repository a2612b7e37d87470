#pragma once

#include "gcl/geometry2d.hpp"
#include "gcl/quadrature.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>

namespace gcl {

// Radial profile f(r) of a rotation-invariant density, truncated at rmax.
class RadialDensity {
 public:
  static RadialDensity gaussian(double rmax = 12.0);
  static RadialDensity custom(std::function<double(double)> f, double rmax, std::string name = "custom");

  bool is_gaussian() const { return gaussian_; }
  double rmax() const { return rmax_; }
  const std::string& name() const { return name_; }
  double operator()(double r) const;

 private:
  std::function<double(double)> f_;
  double rmax_ = 12.0;
  bool gaussian_ = true;
  std::string name_ = "gaussian";
};

// ∫_0^X r^{k+1} f(r) dr. Throws ConfigError when a custom density is not integrable.
double radial_mass(const RadialDensity& density, int k, double X);

// ∫_{t1}^{t2} |cos(t - pole)|^k dt in closed form.
double angular_weight(int k, double pole, double t1, double t2);

// Polar density r^{k+1} f(r) |cos(t - pole)|^k.
struct Measure2D {
  int k = 0;
  double pole = kPi / 2;
  RadialDensity radial = RadialDensity::gaussian();

  double weight(double t) const;
  // ∫ over the whole circle of the angular weight.
  double circle_weight() const;
  // C(k) = 1 / ∫_{-π/2}^{π/2} cos^k.
  double normalization() const;
  // Angular mass of an arc set over the whole circle.
  double arc_mass(const ArcSet& arcs) const;
  double radial_total() const { return radial_mass(radial, k, kInf); }
  double plane_mass() const { return radial_total() * circle_weight(); }
};

struct MassReport {
  double value = 0;
  double abs_err = 0;
  std::size_t nodes = 0;
};

struct MassOptions {
  // Divide by the mass of the whole plane.
  bool probability = false;
  QuadOptions quad{};
};

// Mass of body ∩ (cone ∪ -cone).
MassReport body_mass(const Measure2D& m, const Body2D& body, const Cone2D& cone = Cone2D::full(),
                     const MassOptions& opt = {});

struct ConcavityReport {
  bool pass = true;
  double worst_margin = kInf;
  double worst_x1 = 0;
  double worst_x2 = 0;
};

// Midpoint test of sin^k-concavity over all symmetric pairs of a uniform grid.
ConcavityReport sin_k_concavity_check(std::span<const double> x, std::span<const double> f, int k,
                                      double tol = 1e-12);

}  // namespace gcl
