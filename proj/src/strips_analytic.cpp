#include "gcl/strips_analytic.hpp"

#include "gcl/incomplete_gamma.hpp"
#include "gcl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gcl {

namespace {

constexpr double kSqrtHalfPi = 1.2533141373155002512;  // √(π/2)
constexpr double kXMax = 12.0;

// ∫_lo^hi e^{-y²/2} dy, using erfc on the far tails to avoid cancellation.
double gauss_interval(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const double s = 1 / std::sqrt(2.0);
  if (lo > 0) return kSqrtHalfPi * (std::erfc(lo * s) - std::erfc(hi * s));
  if (hi < 0) return kSqrtHalfPi * (std::erfc(-hi * s) - std::erfc(-lo * s));
  return kSqrtHalfPi * (std::erf(hi * s) - std::erf(lo * s));
}

// Signed primitive of |x|^m e^{-x²/2}, vanishing at 0.
double power_primitive(int m, double t) {
  const double a = (m + 1) / 2.0;
  const double scale = std::pow(2.0, (m - 1) / 2.0);
  const double v = std::isinf(t) ? scale * std::tgamma(a) : scale * lower_gamma(a, t * t / 2);
  return t < 0 ? -v : v;
}

double power_total(int m) { return 2 * power_primitive(m, kInf); }

// One strip seen as a y-window depending on x, or as a bound on |x|.
struct Window {
  bool whole = false;
  bool x_bound = false;
  double cutoff = kInf;  // |x| < cutoff when x_bound
  double slope = 0;      // y-window center = slope·x
  double half = 0;
};

Window make_window(const PlaneStrip& s) {
  Window w;
  if (!(s.half_width > 0)) throw std::invalid_argument("strip half-width must be positive");
  if (std::isinf(s.half_width)) {
    w.whole = true;
    return w;
  }
  const double c = std::cos(s.normal_angle), sn = std::sin(s.normal_angle);
  if (std::abs(sn) <= 4 * std::numeric_limits<double>::epsilon()) {
    w.x_bound = true;
    w.cutoff = s.half_width / std::abs(c);
  } else {
    w.slope = -c / sn;
    w.half = s.half_width / std::abs(sn);
  }
  return w;
}

struct MassValue {
  double value;
  double err;
};

// ∫∫ over the intersection of windows of |x|^k e^{-(x²+y²)/2}; the integrand is even in x.
MassValue window_mass(int k, std::span<const Window> windows, const QuadOptions& q) {
  double upper = kXMax;
  std::vector<const Window*> slanted;
  for (const auto& w : windows) {
    if (w.whole) continue;
    if (w.x_bound) upper = std::min(upper, w.cutoff);
    else slanted.push_back(&w);
  }
  std::vector<double> breaks;
  for (std::size_t i = 0; i < slanted.size(); ++i)
    for (std::size_t j = i + 1; j < slanted.size(); ++j) {
      const double ds = slanted[i]->slope - slanted[j]->slope;
      if (ds == 0) continue;
      for (double si : {-1.0, 1.0})
        for (double sj : {-1.0, 1.0}) {
          const double x = (sj * slanted[j]->half - si * slanted[i]->half) / ds;
          if (x > 0 && x < upper) breaks.push_back(x);
        }
    }
  auto integrand = [&](double x) {
    double lo = -kInf, hi = kInf;
    for (const Window* w : slanted) {
      lo = std::max(lo, w->slope * x - w->half);
      hi = std::min(hi, w->slope * x + w->half);
    }
    return std::pow(x, k) * std::exp(-x * x / 2) * gauss_interval(lo, hi);
  };
  const auto res = integrate(integrand, 0.0, upper, std::span<const double>(breaks), q);
  return {2 * res.value, 2 * res.abs_err};
}

}  // namespace

StripPairMasses strip_pair_masses(int k, const PlaneStrip& s1, const PlaneStrip& s2, const QuadOptions& q) {
  if (k < 0) throw std::invalid_argument("strip_pair_masses: k must be non-negative");
  const Window w1 = make_window(s1), w2 = make_window(s2);
  const Window both[] = {w1, w2};
  StripPairMasses out;
  out.plane = power_total(k) * 2 * kSqrtHalfPi;
  const MassValue m1 = window_mass(k, std::span<const Window>(&w1, 1), q);
  const MassValue m2 = window_mass(k, std::span<const Window>(&w2, 1), q);
  const MassValue m12 = window_mass(k, both, q);
  out.first = m1.value;
  out.second = m2.value;
  out.both = m12.value;
  out.abs_err = std::max({m1.err, m2.err, m12.err});
  return out;
}

StripPairMasses separable_masses(int k, double a, double b) {
  StripPairMasses out;
  const double mx_all = power_total(k), my_all = 2 * kSqrtHalfPi;
  const double mx = 2 * power_primitive(k, a), my = gauss_interval(-b, b);
  out.plane = mx_all * my_all;
  out.first = mx * my_all;
  out.second = mx_all * my;
  out.both = mx * my;
  return out;
}

PlaneStrip StripPair::first() const { return good ? PlaneStrip{0.0, a} : PlaneStrip{rho, a}; }

PlaneStrip StripPair::second() const {
  if (!good) return {-rho, b};
  // At rho = π/2 the tilted strip is exactly {|x| < b}.
  if (rho >= kPi / 2) return {0.0, b};
  return {kPi / 2 + rho, b};
}

RatioReport strip_pair_ratio(const StripPair& p, const QuadOptions& q) {
  if (!(p.a > 0) || !(p.b > 0) || p.rho < 0 || p.rho > kPi / 2)
    throw std::invalid_argument("strip pair: need a, b > 0 and rho in [0, pi/2]");
  const StripPairMasses m = strip_pair_masses(p.k, p.first(), p.second(), q);
  const double r = m.ratio();
  const double rel = m.abs_err / m.both + m.abs_err / m.first + m.abs_err / m.second;
  return {r, std::abs(r) * rel};
}

RatioReport axis_strip_ratio(const StripPair& p, const QuadOptions& q) {
  if (!p.good) throw std::invalid_argument("axis_strip_ratio: pair is not in the good configuration");
  return strip_pair_ratio(p, q);
}

GromovReport gromov_check(std::span<const double> x, std::span<const double> f, std::span<const double> g,
                          double tol) {
  if (x.size() != f.size() || x.size() != g.size() || x.size() < 2)
    throw std::invalid_argument("gromov_check: need matching tables of length >= 2");
  GromovReport rep;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(g[i] > 0)) throw std::invalid_argument("gromov_check: g must be positive");
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double q0 = f[i] / g[i], q1 = f[i + 1] / g[i + 1];
    const double rise = q1 - q0;
    rep.worst_hypothesis_margin = std::max(rep.worst_hypothesis_margin, rise);
    if (rise > tol * std::max(1.0, std::abs(q0))) rep.hypothesis_holds = false;
  }
  if (!rep.hypothesis_holds) return rep;
  double F = 0, G = 0, prev = 0;
  bool holds = true;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    F += h * (f[i] + f[i + 1]) / 2;
    G += h * (g[i] + g[i + 1]) / 2;
    const double ratio = F / G;
    if (i > 0) {
      const double rise = ratio - prev;
      if (rise > rep.worst_conclusion_margin) {
        rep.worst_conclusion_margin = rise;
        rep.worst_x = x[i + 1];
      }
      if (rise > tol * std::max(1.0, std::abs(prev))) holds = false;
    }
    prev = ratio;
  }
  rep.conclusion_holds = holds;
  return rep;
}

std::vector<double> gaussian_window_profile(double b, double slope, std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(gauss_interval(-b + slope * x, b + slope * x) / (2 * kSqrtHalfPi));
  return out;
}

std::vector<double> power_window_profile(int m, double b, double slope, std::span<const double> ys) {
  std::vector<double> out;
  out.reserve(ys.size());
  const double total = power_total(m);
  for (double y : ys) out.push_back((power_primitive(m, b + slope * y) - power_primitive(m, -b + slope * y)) / total);
  return out;
}

double largest_increase(std::span<const double> values) {
  double best = -kInf;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) best = std::max(best, values[i + 1] - values[i]);
  return best;
}

CosIdentityReport cos_identity_check(int n, std::span<const double> xs) {
  if (n < 3) throw std::invalid_argument("cos_identity_check: n must be at least 3");
  CosIdentityReport rep;
  double prev = kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    if (!(x > 0 && x < kPi / 2)) throw std::invalid_argument("cos_identity_check: grid must lie in (0, pi/2)");
    // Antiderivative of cos^{n-1} by the reduction formula.
    double lhs = (n - 1) % 2 == 0 ? x : std::sin(x);
    for (int j = (n - 1) % 2 == 0 ? 2 : 3; j <= n - 1; j += 2)
      lhs = std::pow(std::cos(x), j - 1) * std::sin(x) / j + (j - 1.0) / j * lhs;
    const auto tail = integrate(
        [n](double t) { return std::pow(std::sin(t), 2) * std::pow(std::cos(t), n - 3); }, 0.0, x, {},
        QuadOptions{1e-14, 1e-15, 4000});
    const double boundary = std::sin(x) * std::pow(std::cos(x), n - 2);
    rep.max_residual = std::max(rep.max_residual, std::abs(lhs - (boundary + (n - 2) * tail.value)));
    const double ratio = boundary / lhs;
    if (i == 0) rep.ratio_near_zero = ratio;
    if (ratio >= prev) rep.ratio_decreasing = false;
    prev = ratio;
  }
  return rep;
}

ScanReport counterexample_scan(int k, std::span<const double> widths, std::span<const double> angles, bool good,
                               double threshold, unsigned jobs) {
  ScanReport rep;
  for (double a : widths)
    for (double b : widths)
      for (double rho : angles) rep.rows.push_back({StripPair{a, b, rho, k, good}, 0, 0, false});
  parallel_for(rep.rows.size(), jobs, [&](std::size_t i) {
    auto& row = rep.rows[i];
    const RatioReport r = strip_pair_ratio(row.pair);
    row.ratio = r.ratio;
    row.abs_err = r.abs_err;
    row.violation = r.ratio < 1 - threshold;
  });
  for (std::size_t i = 0; i < rep.rows.size(); ++i)
    if (rep.rows[i].violation) rep.violations.push_back(i);
  return rep;
}

std::string ratio_heatmap_svg(int k, double b, std::span<const double> widths, std::span<const double> angles,
                              bool good) {
  const int cell = 28, left = 70, top = 40;
  const int w = left + cell * static_cast<int>(widths.size()) + 120;
  const int h = top + cell * static_cast<int>(angles.size()) + 60;
  std::vector<double> ratios;
  double lo = kInf, hi = -kInf;
  for (double rho : angles)
    for (double a : widths) {
      const double r = strip_pair_ratio(StripPair{a, b, rho, k, good}).ratio;
      ratios.push_back(r);
      lo = std::min(lo, std::log(r));
      hi = std::max(hi, std::log(r));
    }
  const double span = std::max({std::abs(lo), std::abs(hi), 1e-12});
  // Log-ratio colour scale: blue below 1, red above 1, white at 1.
  auto colour = [&](double r) {
    const double t = std::clamp(std::log(r) / span, -1.0, 1.0);
    const int fade = static_cast<int>(255 * (1 - std::abs(t)));
    std::ostringstream c;
    if (t < 0) c << "rgb(" << fade << ',' << fade << ",255)";
    else c << "rgb(255," << fade << ',' << fade << ')';
    return c.str();
  };
  std::ostringstream svg;
  svg << std::setprecision(4);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  svg << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\">strip ratio, k=" << k << ", b=" << b
      << (good ? ", good configuration" : ", generic pair") << "</text>\n";
  for (std::size_t i = 0; i < angles.size(); ++i)
    for (std::size_t j = 0; j < widths.size(); ++j) {
      const double r = ratios[i * widths.size() + j];
      svg << "<rect x=\"" << left + cell * j << "\" y=\"" << top + cell * i << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << colour(r) << "\"><title>a=" << widths[j]
          << " rho=" << angles[i] << " ratio=" << r << "</title></rect>\n";
    }
  for (std::size_t j = 0; j < widths.size(); ++j)
    svg << "<text x=\"" << left + cell * j + 2 << "\" y=\"" << top + cell * angles.size() + 14
        << "\" font-size=\"9\">" << widths[j] << "</text>\n";
  for (std::size_t i = 0; i < angles.size(); ++i)
    svg << "<text x=\"4\" y=\"" << top + cell * i + cell / 2 + 3 << "\" font-size=\"9\">" << angles[i]
        << "</text>\n";
  svg << "<text x=\"" << left << "\" y=\"" << h - 12 << "\" font-size=\"11\">a (columns), rho (rows); ratio range ["
      << std::exp(lo) << ", " << std::exp(hi) << "]</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gcl
