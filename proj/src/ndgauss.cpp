#include "gcl/ndgauss.hpp"

#include "gcl/parallel.hpp"
#include "gcl/philox.hpp"
#include "gcl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gcl {

namespace {

void check_dimension(int n) {
  if (n < 2 || n > kMaxDimension) throw std::invalid_argument("dimension must lie in [2, 64]");
}

}  // namespace

BodyND BodyND::whole_space(int n) {
  check_dimension(n);
  return BodyND(n);
}

BodyND BodyND::slabs(int n, std::vector<Slab> slabs) {
  check_dimension(n);
  BodyND b(n);
  for (auto& s : slabs) {
    if (s.normal.size() != n) throw std::invalid_argument("slab normal has the wrong dimension");
    const double len = s.normal.norm();
    if (!(len > 0) || !std::isfinite(len)) throw std::invalid_argument("slab normal must be non-zero");
    if (!(s.half_width > 0)) throw std::invalid_argument("slab half-width must be positive");
    s.normal /= len;
  }
  b.slabs_ = std::move(slabs);
  return b;
}

BodyND BodyND::ellipsoid(Eigen::MatrixXd form) {
  const int n = static_cast<int>(form.rows());
  check_dimension(n);
  if (form.cols() != n || !form.isApprox(form.transpose(), 1e-12))
    throw std::invalid_argument("ellipsoid form must be square and symmetric");
  if (Eigen::LLT<Eigen::MatrixXd>(form).info() != Eigen::Success)
    throw std::invalid_argument("ellipsoid form must be positive definite");
  BodyND b(n);
  b.forms_.push_back(0.5 * (form + form.transpose()));
  return b;
}

BodyND BodyND::intersection(const BodyND& a, const BodyND& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("intersection of bodies of different dimension");
  BodyND out = a;
  out.slabs_.insert(out.slabs_.end(), b.slabs_.begin(), b.slabs_.end());
  out.forms_.insert(out.forms_.end(), b.forms_.begin(), b.forms_.end());
  return out;
}

bool BodyND::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  for (const auto& s : slabs_)
    if (!(std::abs(s.normal.dot(x)) < s.half_width)) return false;
  for (const auto& a : forms_)
    if (!(x.dot(a * x) < 1)) return false;
  return true;
}

double BodyND::radial_extent(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  double x = kInf;
  for (const auto& s : slabs_) {
    const double c = std::abs(s.normal.dot(u));
    if (c > 0) x = std::min(x, s.half_width / c);
  }
  for (const auto& a : forms_) x = std::min(x, 1 / std::sqrt(u.dot(a * u)));
  return x;
}

int BodyND::active_constraint(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  double x = kInf;
  int best = -1, idx = 0;
  for (const auto& s : slabs_) {
    const double c = std::abs(s.normal.dot(u));
    if (c > 0 && s.half_width / c < x) {
      x = s.half_width / c;
      best = idx;
    }
    ++idx;
  }
  for (const auto& a : forms_) {
    const double e = 1 / std::sqrt(u.dot(a * u));
    if (e < x) {
      x = e;
      best = idx;
    }
    ++idx;
  }
  return best;
}

Body2D BodyND::plane_section(const Eigen::VectorXd& e1, const Eigen::VectorXd& e2) const {
  if (e1.size() != n_ || e2.size() != n_) throw std::invalid_argument("plane_section: frame has the wrong dimension");
  std::optional<Body2D> out;
  auto add = [&](Body2D b) { out = out ? Body2D::intersection(*out, std::move(b)) : std::move(b); };
  for (const auto& s : slabs_) {
    const double w1 = s.normal.dot(e1), w2 = s.normal.dot(e2);
    const double c = std::hypot(w1, w2);
    // A slab whose normal is orthogonal to the plane contains the whole section.
    if (c <= 1e-14) continue;
    add(Body2D::strip(std::atan2(w2, w1), s.half_width / c));
  }
  Eigen::MatrixXd frame(n_, 2);
  frame << e1, e2;
  for (const auto& a : forms_) add(Body2D::ellipse(frame.transpose() * a * frame));
  return out ? *out : Body2D::full_plane();
}

// ---------------------------------------------------------------- Monte Carlo

namespace {

struct Counts {
  std::uint64_t first = 0, second = 0, both = 0;
};

// Runs visit(x) for sample indices [0, samples) in fixed chunks keyed by (seed, index).
template <class Visit>
std::vector<Counts> chunked(int n, std::uint64_t samples, std::uint64_t seed, const MCOptions& opt,
                            const Visit& visit) {
  const std::uint64_t chunk = std::max<std::uint64_t>(1, opt.chunk);
  const std::size_t chunks = static_cast<std::size_t>((samples + chunk - 1) / chunk);
  std::vector<Counts> out(chunks);
  parallel_for(chunks, opt.jobs, [&](std::size_t c) {
    Eigen::VectorXd x(n);
    const std::uint64_t lo = c * chunk, hi = std::min(samples, lo + chunk);
    for (std::uint64_t i = lo; i < hi; ++i) {
      NormalStream stream(seed, i);
      stream.fill(x, n);
      visit(x, out[c]);
    }
  });
  return out;
}

}  // namespace

MCEstimate gaussian_mc(const BodyND& body, std::uint64_t samples, std::uint64_t seed, const MCOptions& opt) {
  if (samples < 1) throw std::invalid_argument("gaussian_mc: samples must be at least 1");
  // first counts hits of x, second hits of -x.
  const auto parts = chunked(body.dim(), samples, seed, opt, [&](const Eigen::VectorXd& x, Counts& c) {
    c.first += body.contains(x);
    c.second += body.contains(-x);
  });
  std::uint64_t hits = 0;
  for (const auto& c : parts) hits += c.first + c.second;
  const double p = static_cast<double>(hits) / (2.0 * static_cast<double>(samples));
  return {p, std::sqrt(p * (1 - p) / static_cast<double>(samples)), samples, seed};
}

AntitheticReport antithetic_efficiency(const BodyND& body, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("antithetic_efficiency: need at least two samples");
  // first: I(x); second: I(-x); both: I(x)·I(-x).
  const auto parts = chunked(body.dim(), samples, seed, {}, [&](const Eigen::VectorXd& x, Counts& c) {
    const bool a = body.contains(x), b = body.contains(-x);
    c.first += a;
    c.second += b;
    c.both += a && b;
  });
  Counts t;
  for (const auto& c : parts) {
    t.first += c.first;
    t.second += c.second;
    t.both += c.both;
  }
  const double N = static_cast<double>(samples);
  const double p = t.first / N, q = t.second / N, pq = t.both / N;
  const double naive = p * (1 - p);
  // E[((a+b)/2)²] = (p + q + 2·pq) / 4.
  const double mean = (p + q) / 2;
  const double anti = (p + q + 2 * pq) / 4 - mean * mean;
  return {naive, anti, anti > 0 ? naive / anti : kInf};
}

CorrelationReport correlation_check_nd(const BodyND& k1, const BodyND& k2, std::uint64_t samples, std::uint64_t seed,
                                       const MCOptions& opt) {
  if (k1.dim() != k2.dim()) throw std::invalid_argument("correlation_check_nd: dimensions differ");
  if (samples < 1) throw std::invalid_argument("correlation_check_nd: samples must be at least 1");
  const auto parts = chunked(k1.dim(), samples, seed, opt, [&](const Eigen::VectorXd& x, Counts& c) {
    const bool a = k1.contains(x), b = k2.contains(x);
    c.first += a;
    c.second += b;
    c.both += a && b;
  });
  Counts t;
  for (const auto& c : parts) {
    t.first += c.first;
    t.second += c.second;
    t.both += c.both;
  }
  const double N = static_cast<double>(samples);
  const double p1 = t.first / N, p2 = t.second / N, p12 = t.both / N;
  CorrelationReport r{p1, p2, p12, p12 - p1 * p2, 0, 0, samples, seed};
  // Influence function φ = I12 − p2·I1 − p1·I2, moments from the indicator identities.
  const double mean = p12 - 2 * p1 * p2;
  const double second_moment = p12 + p2 * p2 * p1 + p1 * p1 * p2 - 2 * (p1 + p2) * p12 + 2 * p1 * p2 * p12;
  r.se = std::sqrt(std::max(0.0, second_moment - mean * mean) / N);
  r.z = r.se > 0 ? r.margin / r.se : 0.0;
  return r;
}

// ---------------------------------------------------------------- profiles and needles

double radial_profile_f(const BodyND& body, const Eigen::VectorXd& u, std::optional<int> exponent_dim) {
  const int n = exponent_dim.value_or(body.dim());
  if (n < 2) throw std::invalid_argument("radial_profile_f: exponent dimension must be at least 2");
  if (u.size() != body.dim()) throw std::invalid_argument("radial_profile_f: direction has the wrong dimension");
  return radial_mass(RadialDensity::gaussian(), n - 2, body.radial_extent(u));
}

namespace {

// Parameters in (t_a, t_b) where the active constraint of the body changes.
std::vector<double> switch_points(const BodyND& body, const Needle& nd) {
  std::vector<double> out;
  const int samples = 2048;
  auto active = [&](double t) { return body.active_constraint(nd.point(t)); };
  double prev_t = nd.t_a();
  int prev = active(prev_t);
  for (int i = 1; i <= samples; ++i) {
    const double t = nd.t_a() + (nd.t_b() - nd.t_a()) * i / samples;
    const int cur = active(t);
    if (cur != prev) {
      double lo = prev_t, hi = t;
      for (int it = 0; it < 60; ++it) {
        const double mid = (lo + hi) / 2;
        (active(mid) == prev ? lo : hi) = mid;
      }
      out.push_back((lo + hi) / 2);
    }
    prev = cur;
    prev_t = t;
  }
  return out;
}

double needle_profile_integral(const BodyND& body, const Needle& nd) {
  auto breaks = switch_points(body, nd);
  if (nd.phase() > nd.t_a() && nd.phase() < nd.t_b()) breaks.push_back(nd.phase());
  std::sort(breaks.begin(), breaks.end());
  const int k = body.dim() - 2;
  auto fn = [&](double t) {
    return radial_mass(RadialDensity::gaussian(), k, body.radial_extent(nd.point(t))) * nd.density(t);
  };
  return integrate(fn, nd.t_a(), nd.t_b(), std::span<const double>(breaks)).value;
}

}  // namespace

NeedleCheckND needle_check_nd(const BodyND& k1, const BodyND& k2, const Needle& nd) {
  if (k1.dim() != k2.dim()) throw std::invalid_argument("needle_check_nd: dimensions differ");
  if (nd.e1().size() != k1.dim()) throw std::invalid_argument("needle_check_nd: needle frame has the wrong dimension");
  NeedleCheckND r;
  r.first = needle_profile_integral(k1, nd);
  r.second = needle_profile_integral(k2, nd);
  r.intersection = needle_profile_integral(BodyND::intersection(k1, k2), nd);
  r.whole = radial_mass(RadialDensity::gaussian(), k1.dim() - 2, kInf);
  r.F = r.whole * r.intersection / (r.first * r.second);
  r.margin = (r.whole * r.intersection - r.first * r.second) / (r.whole * r.whole);
  r.direction = nd.point((nd.t_a() + nd.t_b()) / 2);
  return r;
}

}  // namespace gcl
