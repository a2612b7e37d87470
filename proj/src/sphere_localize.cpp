#include "gcl/sphere_localize.hpp"

#include "gcl/measures.hpp"
#include "gcl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gcl {

// ---------------------------------------------------------------- needles

Needle Needle::make(Eigen::VectorXd e1, Eigen::VectorXd e2, double t_a, double t_b, double phase, int k) {
  if (e1.size() != e2.size() || e1.size() < 2) throw std::invalid_argument("needle: frame dimensions differ");
  if (std::abs(e1.norm() - 1) > 1e-10 || std::abs(e2.norm() - 1) > 1e-10 || std::abs(e1.dot(e2)) > 1e-10)
    throw std::invalid_argument("needle: frame must be orthonormal");
  if (!(t_b > t_a) || t_b - t_a > kPi + 1e-12) throw std::invalid_argument("needle: interval must have length in (0, pi]");
  if (k < 0) throw std::invalid_argument("needle: k must be non-negative");
  if (std::max(std::abs(t_a - phase), std::abs(t_b - phase)) > kPi / 2 + 1e-12)
    throw std::invalid_argument("needle: density cos^k(t - phase) must be non-negative on the interval");
  Needle nd;
  nd.e1_ = std::move(e1);
  nd.e2_ = std::move(e2);
  nd.t_a_ = t_a;
  nd.t_b_ = t_b;
  nd.phase_ = phase;
  nd.k_ = k;
  nd.norm_ = 1.0 / angular_weight(k, phase, t_a, t_b);
  return nd;
}

Needle Needle::half_circle(Eigen::VectorXd e1, Eigen::VectorXd e2, double phase, int k) {
  return make(std::move(e1), std::move(e2), phase - kPi / 2, phase + kPi / 2, phase, k);
}

double Needle::density(double t) const {
  if (t < t_a_ || t > t_b_) return 0.0;
  return norm_ * std::pow(std::max(0.0, std::cos(t - phase_)), k_);
}

Eigen::VectorXd Needle::point(double t) const { return std::cos(t) * e1_ + std::sin(t) * e2_; }

Needle Needle::antipodal() const {
  Needle nd = *this;
  nd.e1_ = -e1_;
  nd.e2_ = -e2_;
  return nd;
}

double needle_integral(const std::function<double(double)>& fn, const Needle& nd) {
  std::vector<double> breaks;
  if (nd.phase() > nd.t_a() && nd.phase() < nd.t_b()) breaks.push_back(nd.phase());
  auto res = integrate([&](double t) { return fn(t) * nd.density(t); }, nd.t_a(), nd.t_b(),
                       std::span<const double>(breaks));
  return res.value;
}

// ---------------------------------------------------------------- regions

namespace {

using Polygon3 = std::vector<Vec3>;

std::vector<Polygon3> octants() {
  std::vector<Polygon3> out;
  for (int sx : {1, -1})
    for (int sy : {1, -1})
      for (int sz : {1, -1}) out.push_back({Vec3(sx, 0, 0), Vec3(0, sy, 0), Vec3(0, 0, sz)});
  return out;
}

// Sutherland–Hodgman against the plane n·x = 0; edges are minor arcs.
Polygon3 clip(const Polygon3& poly, const Vec3& n) {
  Polygon3 out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& p = poly[i];
    const Vec3& q = poly[(i + 1) % m];
    const double dp = n.dot(p), dq = n.dot(q);
    if (dp >= 0) out.push_back(p);
    if ((dp > 0 && dq < 0) || (dp < 0 && dq > 0)) out.push_back((p + dp / (dp - dq) * (q - p)).normalized());
  }
  Polygon3 clean;
  for (const auto& v : out)
    if (clean.empty() || (v - clean.back()).norm() > 1e-15) clean.push_back(v);
  while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= 1e-15) clean.pop_back();
  if (clean.size() < 3) return {};
  return clean;
}

// Spherical excess of a geodesic triangle.
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double triple = std::abs(a.dot(b.cross(c)));
  return 2 * std::atan2(triple, 1 + a.dot(b) + b.dot(c) + c.dot(a));
}

template <class Values>
struct Accumulator {
  Values fine;
  Values coarse;
};

// Centroid rule over the 4^depth subtriangles, plus the rule one level up.
template <class Fn, class Values>
void subdivide(const Vec3& a, const Vec3& b, const Vec3& c, int level, int depth, const Fn& fn,
               Accumulator<Values>& acc) {
  if (level == depth - 1 || depth == 0) {
    const Values here = fn((a + b + c).normalized());
    const double area = triangle_area(a, b, c);
    acc.coarse += area * here;
    if (depth == 0) {
      acc.fine += area * here;
      return;
    }
    const Vec3 ab = (a + b).normalized(), bc = (b + c).normalized(), ca = (c + a).normalized();
    const Vec3* tris[4][3] = {{&a, &ab, &ca}, {&ab, &b, &bc}, {&ca, &bc, &c}, {&ab, &bc, &ca}};
    for (const auto& t : tris) acc.fine += triangle_area(*t[0], *t[1], *t[2]) * fn((*t[0] + *t[1] + *t[2]).normalized());
    return;
  }
  const Vec3 ab = (a + b).normalized(), bc = (b + c).normalized(), ca = (c + a).normalized();
  subdivide(a, ab, ca, level + 1, depth, fn, acc);
  subdivide(ab, b, bc, level + 1, depth, fn, acc);
  subdivide(ca, bc, c, level + 1, depth, fn, acc);
  subdivide(ab, bc, ca, level + 1, depth, fn, acc);
}

template <class Fn, class Values>
Accumulator<Values> integrate_pieces(const std::vector<Polygon3>& pieces, const Fn& fn, int depth, Values zero) {
  Accumulator<Values> acc{zero, zero};
  for (const auto& poly : pieces)
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) subdivide(poly[0], poly[i], poly[i + 1], 0, depth, fn, acc);
  return acc;
}

}  // namespace

SphericalRegion::SphericalRegion() { build(); }

SphericalRegion::SphericalRegion(std::vector<Vec3> normals) : normals_(std::move(normals)) {
  for (auto& n : normals_) {
    if (!(n.norm() > 0)) throw std::invalid_argument("hemisphere normal must be non-zero");
    n.normalize();
  }
  build();
}

void SphericalRegion::build() {
  pieces_ = octants();
  for (const auto& n : normals_) {
    std::vector<Polygon3> next;
    for (const auto& p : pieces_)
      if (auto c = clip(p, n); !c.empty()) next.push_back(std::move(c));
    pieces_ = std::move(next);
  }
}

SphericalRegion SphericalRegion::cut(const Vec3& normal) const {
  auto normals = normals_;
  normals.push_back(normal);
  return SphericalRegion(std::move(normals));
}

bool SphericalRegion::contains(const Vec3& x) const {
  for (const auto& n : normals_)
    if (!(n.dot(x) > 0)) return false;
  return true;
}

SphereQuadrature sphere_integral(const SphericalRegion& region, const SphereFunction& fn, int depth) {
  if (depth < 1) throw std::invalid_argument("sphere_integral: depth must be at least 1");
  const auto acc = integrate_pieces(region.pieces(), fn, depth, 0.0);
  return {acc.fine, acc.coarse, acc.fine + (acc.fine - acc.coarse) / 3, std::abs(acc.fine - acc.coarse)};
}

double region_area(const SphericalRegion& region, int depth) {
  return sphere_integral(region, [](const Vec3&) { return 1.0; }, depth).value;
}

// ---------------------------------------------------------------- width

namespace {

// Largest |m·x| over the minor arc from a to b.
double arc_peak(const Vec3& m, const Vec3& a, const Vec3& b) {
  const double ends = std::max(std::abs(m.dot(a)), std::abs(m.dot(b)));
  Vec3 c = b - a.dot(b) * a;
  const double cn = c.norm();
  if (cn < 1e-15) return ends;
  c /= cn;
  const double theta = std::atan2(cn, a.dot(b));
  const double A = m.dot(a), B = m.dot(c);
  double t = std::atan2(B, A);
  if (t < 0) t += kPi;
  return t <= theta ? std::max(ends, std::hypot(A, B)) : ends;
}

double peak_distance(const SphericalRegion& region, const Vec3& m) {
  if (region.contains(m) || region.contains(-m)) return 1.0;
  double best = 0;
  for (const auto& poly : region.pieces())
    for (std::size_t i = 0; i < poly.size(); ++i) best = std::max(best, arc_peak(m, poly[i], poly[(i + 1) % poly.size()]));
  return std::min(best, 1.0);
}

Vec3 spherical(double polar, double azimuth) {
  return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)};
}

// Orthonormal pair spanning the tangent plane at n.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& n) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 a = n.cross(helper).normalized();
  return {a, n.cross(a)};
}

}  // namespace

RegionWidth region_width(const SphericalRegion& region) {
  if (region.is_empty()) return {0.0, Vec3::UnitZ()};
  double best = kInf;
  Vec3 best_m = Vec3::UnitZ();
  const int na = 64, np = 32;
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < na; ++j) {
      const Vec3 m = spherical(kPi / 2 * (i + 0.5) / np, 2 * kPi * j / na);
      const double v = peak_distance(region, m);
      if (v < best) {
        best = v;
        best_m = m;
      }
    }
  // Pattern search in the tangent plane.
  for (double step = kPi / 64; step > 1e-7; step /= 2) {
    bool moved = true;
    while (moved) {
      moved = false;
      const auto [a, b] = tangent_basis(best_m);
      for (const Vec3& d : {a, Vec3(-a), b, Vec3(-b)}) {
        const Vec3 m = (best_m + step * d).normalized();
        const double v = peak_distance(region, m);
        if (v < best) {
          best = v;
          best_m = m;
          moved = true;
          break;
        }
      }
    }
  }
  return {std::asin(best), best_m};
}

// ---------------------------------------------------------------- halving

namespace {

struct HalfIntegrals {
  Eigen::Vector2d plus;
  Eigen::Vector2d minus;
};

HalfIntegrals half_integrals(const SphericalRegion& region, const SphereFunction& g1, const SphereFunction& g2,
                             const Vec3& normal, int depth) {
  auto both = [&](const Vec3& x) { return Eigen::Vector2d(g1(x), g2(x)); };
  const SphericalRegion plus = region.cut(normal), minus = region.cut(-normal);
  return {integrate_pieces(plus.pieces(), both, depth, Eigen::Vector2d::Zero().eval()).fine,
          integrate_pieces(minus.pieces(), both, depth, Eigen::Vector2d::Zero().eval()).fine};
}

struct Scaled {
  Eigen::Vector2d residual;  // relative to the region integrals
  HalfIntegrals halves;
};

Scaled scaled_residual(const SphericalRegion& region, const SphereFunction& g1, const SphereFunction& g2,
                       const Vec3& normal, int depth, const Eigen::Vector2d& scale) {
  const HalfIntegrals h = half_integrals(region, g1, g2, normal, depth);
  return {(h.plus - h.minus).cwiseQuotient(scale), h};
}

std::vector<Vec3> direction_grid(const HalvingOptions& opt) {
  std::vector<Vec3> dirs;
  if (opt.orthogonal_to) {
    const auto [a, b] = tangent_basis(opt.orthogonal_to->normalized());
    const int n = opt.grid_azimuth * opt.grid_polar;
    for (int i = 0; i < n; ++i) {
      const double t = kPi * i / n;
      dirs.push_back(std::cos(t) * a + std::sin(t) * b);
    }
    return dirs;
  }
  for (int i = 0; i < opt.grid_polar; ++i)
    for (int j = 0; j < opt.grid_azimuth; ++j)
      dirs.push_back(spherical(kPi * (i + 0.5) / opt.grid_polar, 2 * kPi * j / opt.grid_azimuth));
  return dirs;
}

HalvingResult refine(const SphericalRegion& region, const SphereFunction& g1, const SphereFunction& g2, Vec3 n,
                     int depth, const Eigen::Vector2d& scale, const HalvingOptions& opt, int max_iterations) {
  HalvingResult out;
  Scaled cur = scaled_residual(region, g1, g2, n, depth, scale);
  int it = 0;
  for (; it < max_iterations && cur.residual.cwiseAbs().maxCoeff() > opt.tol; ++it) {
    // Tangent coordinates; a single coordinate along the allowed circle when constrained.
    std::vector<Vec3> dirs;
    if (opt.orthogonal_to) {
      dirs.push_back(opt.orthogonal_to->normalized().cross(n).normalized());
    } else {
      const auto [a, b] = tangent_basis(n);
      dirs = {a, b};
    }
    const double h = 1e-4;
    Eigen::MatrixXd J(2, static_cast<Eigen::Index>(dirs.size()));
    for (std::size_t c = 0; c < dirs.size(); ++c) {
      const auto fwd = scaled_residual(region, g1, g2, (n + h * dirs[c]).normalized(), depth, scale).residual;
      const auto bwd = scaled_residual(region, g1, g2, (n - h * dirs[c]).normalized(), depth, scale).residual;
      J.col(static_cast<Eigen::Index>(c)) = (fwd - bwd) / (2 * h);
    }
    // Least-squares step; the pseudo-inverse copes with the rank loss of constant G.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const Eigen::VectorXd step = -svd.solve(cur.residual);
    bool improved = false;
    for (double damp = 1; damp > 1e-4; damp /= 2) {
      Vec3 trial = n;
      for (std::size_t c = 0; c < dirs.size(); ++c) trial += damp * step(static_cast<Eigen::Index>(c)) * dirs[c];
      trial.normalize();
      Scaled next = scaled_residual(region, g1, g2, trial, depth, scale);
      if (next.residual.squaredNorm() < cur.residual.squaredNorm()) {
        n = trial;
        cur = std::move(next);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  out.normal = n;
  out.iterations = it;
  out.residual1 = cur.halves.plus(0) - cur.halves.minus(0);
  out.residual2 = cur.halves.plus(1) - cur.halves.minus(1);
  out.plus1 = cur.halves.plus(0);
  out.plus2 = cur.halves.plus(1);
  out.minus1 = cur.halves.minus(0);
  out.minus2 = cur.halves.minus(1);
  out.converged = cur.residual.cwiseAbs().maxCoeff() <= opt.tol;
  out.positive = out.plus1 > 0 && out.plus2 > 0 && out.minus1 > 0 && out.minus2 > 0;
  return out;
}

Eigen::Vector2d region_scale(const SphericalRegion& region, const SphereFunction& g1, const SphereFunction& g2,
                             int depth) {
  auto mag = [&](const Vec3& x) { return Eigen::Vector2d(std::abs(g1(x)), std::abs(g2(x))); };
  Eigen::Vector2d s = integrate_pieces(region.pieces(), mag, depth, Eigen::Vector2d::Zero().eval()).fine;
  if (!(s(0) > 0) || !(s(1) > 0)) throw std::domain_error("hemisphere_halving: G integrals must be positive");
  return s;
}

// Refined cuts from the best local minima of the coarse residual map.
std::vector<HalvingResult> halving_candidates(const SphericalRegion& region, const SphereFunction& g1,
                                              const SphereFunction& g2, const HalvingOptions& opt) {
  const Eigen::Vector2d coarse_scale = region_scale(region, g1, g2, opt.coarse_depth);
  const auto dirs = direction_grid(opt);
  std::vector<double> score(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i)
    score[i] = scaled_residual(region, g1, g2, dirs[i], opt.coarse_depth, coarse_scale).residual.squaredNorm();

  std::vector<std::size_t> minima;
  const bool ring = opt.orthogonal_to.has_value();
  const int na = opt.grid_azimuth, np = opt.grid_polar;
  for (std::size_t idx = 0; idx < dirs.size(); ++idx) {
    bool is_min = true;
    if (ring) {
      const std::size_t n = dirs.size();
      is_min = score[idx] <= score[(idx + 1) % n] && score[idx] <= score[(idx + n - 1) % n];
    } else {
      const int i = static_cast<int>(idx) / na, j = static_cast<int>(idx) % na;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int ii = i + di;
          if ((di == 0 && dj == 0) || ii < 0 || ii >= np) continue;
          if (score[static_cast<std::size_t>(ii * na + (j + dj + na) % na)] < score[idx]) {
            is_min = false;
            break;
          }
        }
    }
    if (is_min) minima.push_back(idx);
  }
  std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  std::vector<Vec3> starts;
  for (std::size_t idx : minima) {
    const Vec3& d = dirs[idx];
    bool fresh = true;
    for (const auto& s : starts) fresh = fresh && std::abs(s.dot(d)) < 0.999;
    if (fresh) starts.push_back(d);
    if (static_cast<int>(starts.size()) >= opt.candidates) break;
  }
  const int mid = std::min(opt.depth, 5);
  const Eigen::Vector2d scale = region_scale(region, g1, g2, mid);
  std::vector<HalvingResult> out;
  for (const auto& s : starts) out.push_back(refine(region, g1, g2, s, mid, scale, opt, opt.max_iterations));
  return out;
}

HalvingResult polish(const SphericalRegion& region, const SphereFunction& g1, const SphereFunction& g2,
                     const HalvingResult& start, const HalvingOptions& opt) {
  const Eigen::Vector2d scale = region_scale(region, g1, g2, opt.depth);
  HalvingResult r = refine(region, g1, g2, start.normal, opt.depth, scale, opt, 8);
  r.iterations += start.iterations;
  return r;
}

double residual_size(const HalvingResult& r) { return std::max(std::abs(r.residual1), std::abs(r.residual2)); }

}  // namespace

std::pair<double, double> halving_residuals(const SphericalRegion& region, const SphereFunction& g1,
                                            const SphereFunction& g2, const Vec3& normal, int depth) {
  const HalfIntegrals h = half_integrals(region, g1, g2, normal, depth);
  return {h.plus(0) - h.minus(0), h.plus(1) - h.minus(1)};
}

HalvingResult hemisphere_halving(const SphericalRegion& region, const SphereFunction& g1, const SphereFunction& g2,
                                 const HalvingOptions& opt) {
  auto cands = halving_candidates(region, g1, g2, opt);
  if (cands.empty()) throw std::runtime_error("hemisphere_halving: no candidate directions");
  const auto best = std::min_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    return residual_size(a) < residual_size(b);
  });
  return polish(region, g1, g2, *best, opt);
}

// ---------------------------------------------------------------- needle fit

namespace {

// Angular length of the meridian through p (toward ±m) inside the region.
double meridian_thickness(const SphericalRegion& region, const Vec3& p, const Vec3& m) {
  double lo = -kPi / 2, hi = kPi / 2;
  for (const auto& n : region.normals()) {
    const double psi = std::atan2(n.dot(m), n.dot(p));
    lo = std::max(lo, psi - kPi / 2);
    hi = std::min(hi, psi + kPi / 2);
  }
  return std::max(0.0, hi - lo);
}

struct LogFit {
  double exponent;
  double rms;
};

LogFit log_fit(std::span<const double> t, std::span<const double> y, double t0) {
  const std::size_t n = t.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(std::cos(t[i] - t0));
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  const double k = den != 0 ? (n * sxy - sx * sy) / den : 0.0;
  const double c = (sy - k * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) ss += std::pow(y[i] - c - k * x[i], 2);
  return {k, std::sqrt(ss / n)};
}

}  // namespace

std::optional<NeedleFit> fit_needle(const SphericalRegion& region) {
  if (region.normals().empty() || region.is_empty()) return std::nullopt;
  const RegionWidth w = region_width(region);
  const Vec3 m = w.circle_normal;
  Vec3 centroid = Vec3::Zero();
  for (const auto& poly : region.pieces())
    for (const auto& v : poly) centroid += v;
  Vec3 e1 = centroid - centroid.dot(m) * m;
  if (e1.norm() < 1e-12) return std::nullopt;
  e1.normalize();
  const Vec3 e2 = m.cross(e1);
  auto thickness = [&](double t) { return meridian_thickness(region, std::cos(t) * e1 + std::sin(t) * e2, m); };

  // Support of the thickness around t = 0.
  const int coarse = 2048;
  double t_lo = 0, t_hi = 0;
  if (!(thickness(0) > 0)) return std::nullopt;
  for (int i = 1; i < coarse / 2; ++i) {
    const double t = kPi * i / (coarse / 2);
    if (thickness(t) > 0) t_hi = t; else break;
  }
  for (int i = 1; i < coarse / 2; ++i) {
    const double t = -kPi * i / (coarse / 2);
    if (thickness(t) > 0) t_lo = t; else break;
  }
  const double span = t_hi - t_lo;
  if (!(span > 0) || span >= kPi) return std::nullopt;
  std::vector<double> ts, ys;
  const int samples = 200;
  for (int i = 0; i < samples; ++i) {
    const double t = t_lo + span * (0.05 + 0.9 * i / (samples - 1));
    const double th = thickness(t);
    if (th > 0) {
      ts.push_back(t);
      ys.push_back(std::log(th));
    }
  }
  if (ts.size() < 10) return std::nullopt;
  // Phases keeping cos(t - t0) positive on the samples.
  const double lo = ts.back() - kPi / 2 + 1e-6, hi = ts.front() + kPi / 2 - 1e-6;
  double best_t0 = (lo + hi) / 2;
  LogFit best = log_fit(ts, ys, best_t0);
  for (int i = 0; i <= 400; ++i) {
    const double t0 = lo + (hi - lo) * i / 400.0;
    const LogFit f = log_fit(ts, ys, t0);
    if (f.rms < best.rms) {
      best = f;
      best_t0 = t0;
    }
  }
  double a = std::max(lo, best_t0 - (hi - lo) / 400), b = std::min(hi, best_t0 + (hi - lo) / 400);
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 80; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (log_fit(ts, ys, c).rms < log_fit(ts, ys, d).rms) b = d; else a = c;
  }
  const double t0 = (a + b) / 2;
  const LogFit fin = log_fit(ts, ys, t0);
  NeedleFit out;
  out.circle_normal = m;
  out.e1 = e1;
  out.e2 = e2;
  out.phase = t0;
  out.exponent = fin.exponent;
  out.rms = fin.rms;
  out.samples = static_cast<int>(ts.size());
  return out;
}

// ---------------------------------------------------------------- pancakes

PancakeReport pancake_iterate(const SphericalRegion& region, const SphereFunction& g1, const SphereFunction& g2,
                              int depth, const PancakeOptions& opt) {
  if (depth < 0) throw std::invalid_argument("pancake_iterate: depth must be non-negative");
  PancakeReport rep;
  rep.regions.push_back(region);
  SphericalRegion cur = region;
  double width = region_width(cur).width;
  for (int step = 0; step < depth; ++step) {
    if (opt.target_width > 0 && width < opt.target_width) break;
    auto cands = halving_candidates(cur, g1, g2, opt.halving);
    // Prefer converged cuts, then the thinnest retained half.
    struct Option {
      std::size_t index;
      bool plus_side;
      double width;
    };
    std::optional<Option> pick;
    bool pick_converged = false;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const auto& c = cands[i];
      for (bool plus : {true, false}) {
        if (!opt.keep_thinner && !plus) continue;
        const double wd = region_width(cur.cut(plus ? c.normal : Vec3(-c.normal))).width;
        const bool better = !pick || (c.converged && !pick_converged) ||
                            (c.converged == pick_converged && wd < pick->width);
        if (better) {
          pick = Option{i, plus, wd};
          pick_converged = c.converged;
        }
      }
    }
    if (!pick) break;
    const HalvingResult fin = polish(cur, g1, g2, cands[pick->index], opt.halving);
    const Vec3 side = pick->plus_side ? fin.normal : Vec3(-fin.normal);
    cur = cur.cut(side);
    width = region_width(cur).width;
    PancakeStep s;
    s.normal = side;
    s.width = width;
    s.area = region_area(cur, 1);
    s.g1 = pick->plus_side ? fin.plus1 : fin.minus1;
    s.g2 = pick->plus_side ? fin.plus2 : fin.minus2;
    s.residual1 = fin.residual1;
    s.residual2 = fin.residual2;
    s.positive = fin.positive;
    rep.all_positive = rep.all_positive && s.positive;
    rep.steps.push_back(s);
    rep.regions.push_back(cur);
  }
  rep.achieved_width = width;
  rep.reached_target = opt.target_width > 0 && width < opt.target_width;
  if (!rep.steps.empty()) rep.needle = fit_needle(cur);
  return rep;
}

// ---------------------------------------------------------------- distances, F, display

namespace {

std::vector<Vec3> edge_samples(const SphericalRegion& r, int per_edge) {
  std::vector<Vec3> pts;
  for (const auto& poly : r.pieces())
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec3& a = poly[i];
      const Vec3& b = poly[(i + 1) % poly.size()];
      for (int s = 0; s < per_edge; ++s) pts.push_back((a + (b - a) * (static_cast<double>(s) / per_edge)).normalized());
    }
  return pts;
}

double directed_distance(const std::vector<Vec3>& from, const SphericalRegion& to, const std::vector<Vec3>& to_pts) {
  double worst = 0;
  for (const auto& p : from) {
    if (to.contains(p)) continue;
    double best = kPi;
    for (const auto& q : to_pts) best = std::min(best, std::acos(std::clamp(p.dot(q), -1.0, 1.0)));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double region_hausdorff(const SphericalRegion& a, const SphericalRegion& b, int samples_per_edge) {
  const auto pa = edge_samples(a, samples_per_edge), pb = edge_samples(b, samples_per_edge);
  return std::max(directed_distance(pa, b, pb), directed_distance(pb, a, pa));
}

double needle_F(const Needle& nd, const Body2D& k1, const Body2D& k2) {
  const Measure2D m{nd.k(), nd.phase(), RadialDensity::gaussian()};
  const double len = nd.t_b() - nd.t_a();
  const Cone2D cone = len >= kPi - 1e-12 ? Cone2D::full() : Cone2D::make((nd.t_a() + nd.t_b()) / 2, len / 2);
  const double all = body_mass(m, Body2D::full_plane(), cone).value;
  const double m1 = body_mass(m, k1, cone).value;
  const double m2 = body_mass(m, k2, cone).value;
  const double both = body_mass(m, intersect_min(k1, k2), cone).value;
  if (!(m1 > 0) || !(m2 > 0)) throw std::domain_error("needle_F: a body misses the needle's cone");
  return all * both / (m1 * m2);
}

std::string regions_svg(std::span<const SphericalRegion> regions, const Vec3& view) {
  const Vec3 v = view.normalized();
  const auto [u, w] = tangent_basis(v);
  const double size = 400, half = size / 2, scale = 180;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
  svg << "<circle cx=\"" << half << "\" cy=\"" << half << "\" r=\"" << scale
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const double shade = regions.size() > 1 ? static_cast<double>(i) / (regions.size() - 1) : 1.0;
    for (const auto& poly : regions[i].pieces()) {
      svg << "<polygon fill=\"rgba(30,90,200," << 0.08 + 0.3 * shade << ")\" stroke=\"#124\" stroke-width=\"0.5\" points=\"";
      for (std::size_t e = 0; e < poly.size(); ++e) {
        const Vec3& a = poly[e];
        const Vec3& b = poly[(e + 1) % poly.size()];
        for (int s = 0; s < 8; ++s) {
          const Vec3 p = (a + (b - a) * (s / 8.0)).normalized();
          svg << half + scale * p.dot(u) << ',' << half - scale * p.dot(w) << ' ';
        }
      }
      svg << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gcl
