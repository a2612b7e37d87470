#include "gcl/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gcl {

namespace {

// Angular distance between two directions modulo π, in [0, π/2].
double projective_distance(double a, double b) {
  const double d = wrap_angle(a - b, kPi);
  return std::min(d, kPi - d);
}

double cap_mass(const Measure2D& m, double alpha, double eps) {
  if (eps >= kPi / 2) return m.circle_weight();
  if (eps <= 0) return 0.0;
  return 2 * angular_weight(m.k, m.pole, alpha - eps, alpha + eps);
}

// Inverts cap_mass in ε by safeguarded Newton iteration.
double solve_cap(double target, double alpha, const Measure2D& m) {
  const double circle = m.circle_weight();
  if (target <= 0) return 0.0;
  if (target >= circle) return kPi / 2;
  double lo = 0, hi = kPi / 2;
  double e = kPi / 2 * (target / circle);
  for (int it = 0; it < 200; ++it) {
    const double f = cap_mass(m, alpha, e) - target;
    if (f == 0) return e;
    if (f > 0) hi = e; else lo = e;
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) break;
    const double slope = 2 * (m.weight(alpha + e) + m.weight(alpha - e));
    const double next = slope > 0 ? e - f / slope : lo;
    e = (next > lo && next < hi) ? next : (lo + hi) / 2;
  }
  return e;
}

double cone_weight(const Measure2D& m, const Cone2D& cone) {
  return cone.is_full() ? m.circle_weight() : m.arc_mass(cone.arcs());
}

std::vector<double> cone_radii(const Body2D& body, const Cone2D& cone) {
  if (cone.is_full()) return {};
  std::vector<double> out;
  for (double t : {cone.center - cone.half_angle, cone.center + cone.half_angle}) {
    const double e = radial_extent(body, t);
    if (std::isfinite(e)) out.push_back(e);
  }
  return out;
}

std::vector<double> body_breaks(const Body2D& body, const Cone2D& cone) {
  auto out = kink_radii(body);
  auto more = cone_radii(body, cone);
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

struct RadialValue {
  double value;
  double err;
};

// ∫_0^{rmax} r^{k+1} f(r) ring(r) dr.
template <class Ring>
RadialValue radial_integral(const Measure2D& m, Ring&& ring, std::vector<double> breaks, const QuadOptions& q) {
  const double upper = m.radial.rmax();
  auto integrand = [&](double r) {
    if (r <= 0) return 0.0;
    const double w = std::pow(r, m.k + 1) * m.radial(r);
    if (w == 0) return 0.0;
    return w * ring(r);
  };
  std::sort(breaks.begin(), breaks.end());
  auto res = integrate(integrand, 0.0, upper, std::span<const double>(breaks), q);
  return {res.value, res.abs_err};
}

StageRecord make_stage(std::string name, RadialValue whole, RadialValue both, RadialValue a, RadialValue b) {
  StageRecord s;
  s.name = std::move(name);
  s.numerator = whole.value * both.value;
  s.denominator = a.value * b.value;
  s.ratio = s.numerator / s.denominator;
  const auto rel = [](RadialValue v) { return v.value != 0 ? std::abs(v.err / v.value) : 0.0; };
  s.error = std::abs(s.ratio) * (rel(whole) + rel(both) + rel(a) + rel(b));
  return s;
}

StageRecord ratio_stage(std::string name, double ratio, double error) {
  return {std::move(name), ratio, 1.0, ratio, error};
}

// Largest offset δ in [0, π/2] such that the pole symmetral of `body` lies in
// the pole symmetral of the strip of half-width inradius(body) with axis
// pole + δ. Containment is monotone in δ.
struct OffsetResult {
  double delta;
  bool ok;
};

OffsetResult largest_offset(const Body2D& body, const Measure2D& m, const Cone2D& cone,
                            std::span<const double> radii) {
  const double width = inradius(body);
  const double tol = 1e-12 * m.circle_weight();
  std::vector<double> source;
  source.reserve(radii.size());
  for (double r : radii) source.push_back(normalized_ring_mass(body, r, m, cone));
  auto contained = [&](double delta) {
    const Body2D strip = Body2D::strip(m.pole + delta + kPi / 2, width);
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (source[i] > normalized_ring_mass(strip, radii[i], m, cone) + tol) return false;
    return true;
  };
  if (contained(kPi / 2)) return {kPi / 2, true};
  if (!contained(0)) return {0.0, false};
  double lo = 0, hi = kPi / 2;
  for (int it = 0; it < 60; ++it) {
    const double mid = (lo + hi) / 2;
    if (contained(mid)) lo = mid; else hi = mid;
  }
  return {lo, true};
}

std::vector<RadiusRecord> overlap_records(const Body2D& k1, const Body2D& k2, const AngularProfile& p1,
                                          const AngularProfile& p2, const Measure2D& m, const Cone2D& cone,
                                          bool& all_hold) {
  std::vector<double> radii(p1.radii().begin(), p1.radii().end());
  radii.insert(radii.end(), p2.radii().begin(), p2.radii().end());
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  const Body2D both = intersect_min(k1, k2);
  const double circle = m.circle_weight();
  std::vector<RadiusRecord> out;
  all_hold = true;
  for (double r : radii) {
    RadiusRecord rec;
    rec.r = r;
    rec.source_overlap = normalized_ring_mass(both, r, m, cone) / circle;
    rec.cap_overlap = m.arc_mass(p1.cap(r).intersect(p2.cap(r))) / circle;
    rec.bound_holds = rec.cap_overlap <= rec.source_overlap + 1e-9;
    all_hold = all_hold && rec.bound_holds;
    out.push_back(rec);
  }
  return out;
}

}  // namespace

double cap_epsilon(double source_mass, double alpha, const Measure2D& m, const Cone2D& cone) {
  const double circle = m.circle_weight();
  const double available = cone_weight(m, cone);
  if (source_mass < 0) throw std::domain_error("cap_epsilon: negative source mass");
  if (source_mass > available * (1 + 1e-9))
    throw std::domain_error("cap_epsilon: source mass exceeds the available angular mass");
  const double target = cone.is_full() ? source_mass : source_mass * circle / available;
  return solve_cap(std::min(target, circle), alpha, m);
}

AngularProfile::AngularProfile(double center, std::function<double(double)> half_width, Measure2D m,
                               std::vector<double> radii)
    : center_(center), half_width_(std::move(half_width)), measure_(std::move(m)), radii_(std::move(radii)) {
  eps_.reserve(radii_.size());
  for (double r : radii_) eps_.push_back(half_width_(r));
}

std::vector<double> radius_grid(double r_min, double r_max, int nodes, std::span<const double> breaks) {
  if (!(r_min > 0) || !(r_max > r_min) || nodes < 2) throw std::invalid_argument("radius_grid: bad bounds");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(nodes) + breaks.size());
  const double ratio = std::log(r_max / r_min);
  for (int i = 0; i < nodes; ++i) out.push_back(r_min * std::exp(ratio * i / (nodes - 1)));
  out.back() = r_max;
  for (double b : breaks)
    if (b > r_min && b < r_max) out.push_back(b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double normalized_ring_mass(const Body2D& body, double r, const Measure2D& m, const Cone2D& cone) {
  ArcSet arcs = angular_arcs(body, r);
  if (cone.is_full()) return m.arc_mass(arcs);
  const ArcSet slice = cone.arcs();
  return m.arc_mass(arcs.intersect(slice)) * m.circle_weight() / m.arc_mass(slice);
}

AngularProfile double_cap_symmetrize(const Body2D& body, double alpha, const Measure2D& m, const Cone2D& cone,
                                     const ProfileOptions& opt) {
  const double in = inradius(body);
  const double circ = circumradius(body);
  const double r_min = opt.r_min > 0 ? opt.r_min : 1e-3 * std::min(1.0, in);
  double r_max = opt.r_max > 0 ? opt.r_max : m.radial.rmax();
  if (opt.r_max <= 0 && std::isfinite(circ)) r_max = std::min(r_max, circ * (1 + 1e-6));
  auto breaks = body_breaks(body, cone);
  auto eps = [body, alpha, m, cone](double r) {
    return solve_cap(normalized_ring_mass(body, r, m, cone), alpha, m);
  };
  AngularProfile p(alpha, eps, m, radius_grid(r_min, r_max, opt.nodes, breaks));
  const double circle = m.circle_weight();
  for (std::size_t i = 0; i < p.radii_.size(); ++i) {
    const double target = normalized_ring_mass(body, p.radii_[i], m, cone);
    p.mass_residual_ = std::max(p.mass_residual_, std::abs(cap_mass(m, alpha, p.eps_[i]) - target) / circle);
  }
  return p;
}

AngularProfile strip_profile(double axis, double half_width, const Measure2D& m, const ProfileOptions& opt) {
  const double r_min = opt.r_min > 0 ? opt.r_min : 1e-3 * std::min(1.0, half_width);
  const double r_max = opt.r_max > 0 ? opt.r_max : m.radial.rmax();
  const double breaks[] = {half_width};
  auto eps = [half_width](double r) { return r <= half_width ? kPi / 2 : std::asin(half_width / r); };
  return AngularProfile(axis, eps, m, radius_grid(r_min, r_max, opt.nodes, breaks));
}

WidthReport width_decreasing_check(const AngularProfile& profile, double slack) {
  WidthReport rep;
  const auto radii = profile.radii();
  const auto eps = profile.epsilons();
  constexpr double plateau = kPi / 2 - 1e-12;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    if (eps[i] >= plateau) continue;
    // r·sin ε(r) is the half-width of the matched strip; it must not grow.
    const double margin = std::sin(eps[i + 1]) - radii[i] / radii[i + 1] * std::sin(eps[i]);
    if (margin > rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_r = radii[i + 1];
    }
    if (margin > slack) rep.pass = false;
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double e = eps[i];
    if (!(e > 1e-9 && e < kPi / 2 - 1e-3)) continue;
    const double r = radii[i];
    const double h = 1e-5 * r;
    const double deriv = (profile.epsilon(r + h) - profile.epsilon(r - h)) / (2 * h);
    const double margin = deriv + std::tan(e) / r;
    if (margin > rep.fd_worst_margin) {
      rep.fd_worst_margin = margin;
      rep.fd_worst_r = r;
    }
  }
  return rep;
}

SymmetrizationResult three_step_procedure(const Body2D& k1, const Body2D& k2, const Measure2D& m,
                                          const Cone2D& cone, const ChainOptions& opt) {
  if (m.k < 1) throw std::invalid_argument("three_step_procedure: k must be at least 1");
  const double pole = m.pole;
  const double perp = m.pole + kPi / 2;
  auto sym = [&](const Body2D& b, double alpha) { return double_cap_symmetrize(b, alpha, m, cone, opt.profile); };
  std::ostringstream trace;

  auto finish = [&](AngularProfile a, AngularProfile b, int step, bool containment_ok) {
    SymmetrizationResult res{std::move(a), std::move(b), step, {}, true, containment_ok, ""};
    res.per_radius = overlap_records(k1, k2, res.first, res.second, m, cone, res.inter_bound_holds);
    res.trace = trace.str();
    return res;
  };

  AngularProfile perp1 = sym(k1, perp);
  const WidthReport w1 = width_decreasing_check(perp1, opt.slack);
  trace << "step1: perpendicular symmetral of K1 width-decreasing=" << w1.pass << "\n";
  if (w1.pass) return finish(std::move(perp1), sym(k2, pole), 1, true);
  AngularProfile perp2 = sym(k2, perp);
  const WidthReport w2 = width_decreasing_check(perp2, opt.slack);
  trace << "step1: perpendicular symmetral of K2 width-decreasing=" << w2.pass << "\n";
  if (w2.pass) return finish(sym(k1, pole), std::move(perp2), 1, true);

  AngularProfile pole1 = sym(k1, pole);
  AngularProfile pole2 = sym(k2, pole);
  const OffsetResult off2 = largest_offset(k2, m, cone, pole2.radii());
  trace << "step2: offset for K2 = " << off2.delta << (off2.ok ? "" : " (containment failed on grid)") << "\n";
  AngularProfile tilt2 = sym(k2, pole + off2.delta);

  const std::vector<double> breaks = [&] {
    auto b = body_breaks(k1, cone);
    auto c = body_breaks(k2, cone);
    auto d = kink_radii(intersect_min(k1, k2));
    b.insert(b.end(), c.begin(), c.end());
    b.insert(b.end(), d.begin(), d.end());
    return b;
  }();
  const Body2D both = intersect_min(k1, k2);
  const auto source = radial_integral(
      m, [&](double r) { return normalized_ring_mass(both, r, m, cone); }, breaks, opt.quad);
  const auto caps = radial_integral(
      m, [&](double r) { return m.arc_mass(pole1.cap(r).intersect(tilt2.cap(r))); }, breaks, opt.quad);
  trace << "step2: source overlap " << source.value << " vs cap overlap " << caps.value << "\n";
  if (source.value >= caps.value) return finish(std::move(pole1), std::move(tilt2), 2, off2.ok);

  const OffsetResult off1 = largest_offset(k1, m, cone, pole1.radii());
  trace << "step3: offset for K1 = " << off1.delta << (off1.ok ? "" : " (containment failed on grid)") << "\n";
  return finish(sym(k1, pole - off1.delta), std::move(tilt2), 3, off1.ok && off2.ok);
}

namespace {

struct CapField {
  double center;
  std::function<double(double)> eps;
  ArcSet at(double r) const { return ArcSet::double_cap(center, eps(r)); }
};

// sup{r : direction t lies in the cap of `field` at r}; the caps shrink with r.
double field_extent(const CapField& field, double t, double upper) {
  const double d = projective_distance(t, field.center);
  if (d > field.eps(1e-12)) return 0.0;
  if (d <= field.eps(upper)) return kInf;
  double lo = 1e-12, hi = upper;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = (lo + hi) / 2;
    if (d <= field.eps(mid)) lo = mid; else hi = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

ChainReport reduce_to_strips(const Body2D& k1, const Body2D& k2, const Cone2D& cone, const Measure2D& m,
                             const ChainOptions& opt) {
  ChainReport rep;
  SymmetrizationResult sym = three_step_procedure(k1, k2, m, cone, opt);
  rep.step = sym.step;
  rep.alpha1 = sym.first.center();
  rep.alpha2 = sym.second.center();
  rep.per_radius = sym.per_radius;
  rep.inter_bound_holds = sym.inter_bound_holds;
  rep.trace = sym.trace;

  const double circle = m.circle_weight();
  const double slice = cone_weight(m, cone);
  const Body2D both = intersect_min(k1, k2);
  const ArcSet cone_arcs = cone.arcs();
  std::vector<double> breaks = body_breaks(k1, cone);
  {
    auto more = body_breaks(k2, cone);
    auto inter = kink_radii(both);
    breaks.insert(breaks.end(), more.begin(), more.end());
    breaks.insert(breaks.end(), inter.begin(), inter.end());
  }
  auto radial = [&](auto&& ring, std::vector<double> extra = {}) {
    extra.insert(extra.end(), breaks.begin(), breaks.end());
    return radial_integral(m, ring, std::move(extra), opt.quad);
  };
  auto ring_of = [&](const Body2D& b) {
    return [&m, &cone_arcs, b](double r) { return m.arc_mass(angular_arcs(b, r).intersect(cone_arcs)); };
  };

  const RadialValue mu_cone = radial([&](double) { return slice; });
  const RadialValue mu_plane = radial([&](double) { return circle; });
  rep.stages.push_back(make_stage("original", mu_cone, radial(ring_of(both)), radial(ring_of(k1)), radial(ring_of(k2))));

  const CapField s1{sym.first.center(), sym.first.half_width()};
  const CapField s2{sym.second.center(), sym.second.half_width()};
  auto cap_ring = [&m](const CapField& f) { return [&m, f](double r) { return m.arc_mass(f.at(r)); }; };
  auto overlap_ring = [&m](const CapField& a, const CapField& b) {
    return [&m, a, b](double r) { return m.arc_mass(a.at(r).intersect(b.at(r))); };
  };
  rep.stages.push_back(make_stage("symmetrized", mu_plane, radial(overlap_ring(s1, s2)), radial(cap_ring(s1)),
                                  radial(cap_ring(s2))));

  // r0 = inf{r : ε1(r) + ε2(r) <= π/2}.
  const double upper = m.radial.rmax();
  auto excess = [&](double r) { return s1.eps(r) + s2.eps(r) - kPi / 2; };
  const bool full1 = k1.is_full_plane(), full2 = k2.is_full_plane();
  if (full1 || full2) {
    // Any strip paired with the whole plane gives ratio one; match where ε = π/4.
    const CapField& other = full1 ? s2 : s1;
    double lo = 1e-12, hi = upper;
    if (other.eps(hi) > kPi / 4) {
      rep.degenerate = true;
    } else {
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = (lo + hi) / 2;
        if (other.eps(mid) > kPi / 4) lo = mid; else hi = mid;
      }
    }
    rep.r0 = hi;
  } else if (excess(upper) > 0) {
    rep.degenerate = true;
    rep.r0 = upper;
  } else {
    double lo = 1e-12, hi = upper;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = (lo + hi) / 2;
      if (excess(mid) > 0) lo = mid; else hi = mid;
    }
    rep.r0 = hi;
  }
  if (rep.degenerate) {
    rep.trace += "degenerate r0: angular lengths never sum below pi/2 on the radial domain\n";
    rep.monotone = false;
    return rep;
  }
  const double r0 = rep.r0;
  const double h1 = full1 ? kInf : r0 * std::sin(s1.eps(r0));
  const double h2 = full2 ? kInf : r0 * std::sin(s2.eps(r0));
  rep.strip1 = {s1.center, h1};
  rep.strip2 = {s2.center, h2};

  auto strip_eps = [](double h) {
    return [h](double r) { return r <= h ? kPi / 2 : std::asin(h / r); };
  };
  auto hybrid = [&](const CapField& sym_field, double h) {
    auto inner = sym_field.eps;
    auto outer = strip_eps(h);
    return CapField{sym_field.center, [inner, outer, r0](double r) { return r < r0 ? inner(r) : outer(r); }};
  };
  const CapField E = hybrid(s1, h1);
  const CapField F = hybrid(s2, h2);
  const CapField S1{s1.center, strip_eps(h1)};
  const CapField S2{s2.center, strip_eps(h2)};
  std::vector<double> extra{r0};
  if (std::isfinite(h1)) extra.push_back(h1);
  if (std::isfinite(h2)) extra.push_back(h2);

  const RadialValue mu_E = radial(cap_ring(E), extra);
  const RadialValue mu_F = radial(cap_ring(F), extra);
  rep.stages.push_back(make_stage("hybrid", mu_plane, radial(overlap_ring(E, F), extra), mu_E, mu_F));

  // Degenerate strips are lines: the ratio becomes a one-dimensional mass fraction.
  const double line_total = m.k >= 1 ? radial_mass(m.radial, m.k - 1, kInf) : 1.0;
  auto line_ratio = [&](double extent, const RadialValue& other_mass) {
    const double frac = radial_mass(m.radial, m.k - 1, extent) / line_total;
    const double ratio = mu_plane.value * frac / other_mass.value;
    return ratio_stage("", ratio, std::abs(ratio) * (mu_plane.err / mu_plane.value + other_mass.err / other_mass.value));
  };
  const bool line1 = !(h1 > 1e-14), line2 = !(h2 > 1e-14);
  StageRecord strip_hybrid;
  if (line1) {
    strip_hybrid = line_ratio(field_extent(F, S1.center, upper), mu_F);
  } else {
    strip_hybrid = make_stage("", mu_plane, radial(overlap_ring(S1, F), extra), radial(cap_ring(S1), extra), mu_F);
  }
  strip_hybrid.name = "strip_hybrid";
  rep.stages.push_back(strip_hybrid);

  StageRecord strips;
  if (line1 || line2) {
    const CapField& line = line1 ? S1 : S2;
    const CapField& wide = line1 ? S2 : S1;
    strips = line_ratio(field_extent(wide, line.center, upper), radial(cap_ring(wide), extra));
  } else {
    strips = make_stage("", mu_plane, radial(overlap_ring(S1, S2), extra), radial(cap_ring(S1), extra),
                        radial(cap_ring(S2), extra));
  }
  strips.name = "strips";
  rep.stages.push_back(strips);

  const char* names[] = {"original>=symmetrized", "symmetrized>=hybrid", "hybrid>=strip_hybrid",
                         "strip_hybrid>=strips"};
  for (std::size_t i = 0; i + 1 < rep.stages.size(); ++i) {
    ChainCheck c{names[i], rep.stages[i].ratio, rep.stages[i + 1].ratio, false};
    c.holds = c.lhs >= c.rhs - opt.slack;
    rep.monotone = rep.monotone && c.holds;
    rep.checks.push_back(c);
  }
  return rep;
}

BetaScanReport beta_scan(const Body2D& k1, const Body2D& k2, const std::function<Cone2D(double)>& cones, int k,
                         std::span<const double> betas, double angle_tol, const ChainOptions& opt) {
  BetaScanReport rep;
  const Body2D both = intersect_min(k1, k2);
  const double in = std::min(1.0, inradius(both));
  const double circ = circumradius(both);
  const double top = std::isfinite(circ) ? circ : 12.0;
  for (double r : radius_grid(1e-3 * in, top, 256, kink_radii(both)))
    rep.max_arcs = std::max(rep.max_arcs, angular_arcs(both, r).component_count());
  for (double beta : betas) {
    Measure2D m;
    m.k = k;
    m.pole = beta;
    BetaRow row{beta, reduce_to_strips(k1, k2, cones(beta), m, opt), false};
    for (const StripSpec* s : {&row.chain.strip1, &row.chain.strip2})
      if (!row.chain.degenerate && projective_distance(s->axis + kPi / 2, beta) <= angle_tol) row.good_strip = true;
    if (row.good_strip && !rep.beta0) rep.beta0 = beta;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace gcl
