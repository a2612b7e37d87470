#include "gcl/measures.hpp"

#include "gcl/errors.hpp"
#include "gcl/incomplete_gamma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gcl {

RadialDensity RadialDensity::gaussian(double rmax) {
  RadialDensity d;
  d.rmax_ = rmax;
  return d;
}

RadialDensity RadialDensity::custom(std::function<double(double)> f, double rmax, std::string name) {
  if (!(rmax > 0) || !std::isfinite(rmax)) throw ConfigError("rmax", "custom density needs a finite positive rmax");
  RadialDensity d;
  d.f_ = std::move(f);
  d.rmax_ = rmax;
  d.gaussian_ = false;
  d.name_ = std::move(name);
  return d;
}

double RadialDensity::operator()(double r) const { return gaussian_ ? std::exp(-r * r / 2) : f_(r); }

double radial_mass(const RadialDensity& density, int k, double X) {
  if (k < 0) throw std::invalid_argument("radial_mass: k must be non-negative");
  if (!(X > 0)) return 0.0;
  if (density.is_gaussian()) {
    const double a = (k + 2) / 2.0;
    const double scale = std::pow(2.0, a - 1);
    if (std::isinf(X)) return scale * std::tgamma(a);
    return scale * lower_gamma(a, X * X / 2);
  }
  const double upper = std::min(X, density.rmax());
  auto res = integrate([&](double r) { return std::pow(r, k + 1) * density(r); }, 0.0, upper);
  if (!std::isfinite(res.value) || res.value < 0 || !res.converged)
    throw ConfigError("density", "custom radial density is not integrable on [0, rmax]");
  return res.value;
}

namespace {

// ∫_0^{π/2} cos^k.
double half_period(int k) {
  double h = (k % 2 == 0) ? kPi / 2 : 1.0;
  for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) h *= (j - 1.0) / j;
  return h;
}

// ∫_0^x cos^k for x in [0, π/2], by the reduction formula.
double cos_power_integral(int k, double x) {
  const double s = std::sin(x), c = std::cos(x);
  double prev = (k % 2 == 0) ? x : s;
  for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) prev = std::pow(c, j - 1) * s / j + (j - 1.0) / j * prev;
  return prev;
}

// ∫_0^x |cos s|^k ds for any real x.
double abs_cos_primitive(int k, double x) {
  if (x < 0) return -abs_cos_primitive(k, -x);
  const double h = half_period(k);
  const double q = std::floor(x / kPi);
  const double rem = x - q * kPi;
  const double part = rem <= kPi / 2 ? cos_power_integral(k, rem) : 2 * h - cos_power_integral(k, kPi - rem);
  return q * 2 * h + part;
}

}  // namespace

double angular_weight(int k, double pole, double t1, double t2) {
  if (k < 0) throw std::invalid_argument("angular_weight: k must be non-negative");
  if (k == 0) return t2 - t1;
  return abs_cos_primitive(k, t2 - pole) - abs_cos_primitive(k, t1 - pole);
}

double Measure2D::weight(double t) const { return k == 0 ? 1.0 : std::pow(std::abs(std::cos(t - pole)), k); }

double Measure2D::circle_weight() const { return 4 * half_period(k); }

double Measure2D::normalization() const { return 1.0 / (2 * half_period(k)); }

double Measure2D::arc_mass(const ArcSet& arcs) const {
  if (arcs.is_full()) return circle_weight();
  double sum = 0;
  for (const auto& a : arcs.half_arcs()) sum += angular_weight(k, pole, a.lo, a.hi);
  return 2 * sum;
}

MassReport body_mass(const Measure2D& m, const Body2D& body, const Cone2D& cone, const MassOptions& opt) {
  // The antipodal half contributes the same as [lo, hi] by central symmetry.
  const double lo = cone.is_full() ? m.pole - kPi / 2 : cone.center - cone.half_angle;
  const double hi = cone.is_full() ? m.pole + kPi / 2 : cone.center + cone.half_angle;
  std::vector<double> breaks;
  auto add_periodic = [&](double t) {
    const double base = lo + wrap_angle(t - lo, kPi);
    for (double s = base; s < hi; s += kPi) breaks.push_back(s);
  };
  add_periodic(m.pole + kPi / 2);
  for (double t : kink_angles(body)) add_periodic(t);

  auto integrand = [&](double t) {
    const double w = m.weight(t);
    if (w == 0) return 0.0;
    return w * radial_mass(m.radial, m.k, radial_extent(body, t));
  };
  auto res = integrate(integrand, lo, hi, std::span<const double>(breaks), opt.quad);
  MassReport out{2 * res.value, 2 * res.abs_err, res.nodes};
  if (opt.probability) {
    const double total = m.plane_mass();
    out.value /= total;
    out.abs_err /= total;
  }
  return out;
}

ConcavityReport sin_k_concavity_check(std::span<const double> x, std::span<const double> f, int k, double tol) {
  if (k <= 0) throw std::invalid_argument("sin_k_concavity_check: k = 0 is unsupported");
  if (x.size() != f.size() || x.size() < 3) throw std::invalid_argument("sin_k_concavity_check: need matching tables");
  const double span = x.back() - x.front();
  if (!(span < kPi)) throw std::invalid_argument("sin_k_concavity_check: interval must be shorter than pi");
  const double step = span / static_cast<double>(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - (x.front() + step * static_cast<double>(i))) > 1e-9 * std::max(1.0, span))
      throw std::invalid_argument("sin_k_concavity_check: grid must be uniform");
  std::vector<double> root(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0) throw std::invalid_argument("sin_k_concavity_check: f must be non-negative");
    root[i] = std::pow(f[i], 1.0 / k);
  }
  ConcavityReport rep;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 2; j < x.size(); j += 2) {
      const std::size_t mid = (i + j) / 2;
      const double bound = (root[i] + root[j]) / (2 * std::cos((x[j] - x[i]) / 2));
      const double margin = root[mid] - bound;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_x1 = x[i];
        rep.worst_x2 = x[j];
      }
      if (margin < -tol * std::max(1.0, std::abs(bound))) rep.pass = false;
    }
  }
  return rep;
}

}  // namespace gcl
