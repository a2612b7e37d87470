#include "gcl/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gcl {

double wrap_angle(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

// ---------------------------------------------------------------- ArcSet

ArcSet ArcSet::full() {
  ArcSet s;
  s.full_ = true;
  return s;
}

ArcSet ArcSet::from_arcs(std::vector<Arc> arcs) {
  std::vector<Arc> pieces;
  for (const Arc& a : arcs) {
    const double len = a.hi - a.lo;
    if (!(len > 0)) continue;
    if (len >= kPi) return full();
    const double lo = wrap_angle(a.lo, kPi);
    const double hi = lo + len;
    if (hi > kPi) {
      pieces.push_back({lo, kPi});
      pieces.push_back({0.0, hi - kPi});
    } else {
      pieces.push_back({lo, hi});
    }
  }
  std::sort(pieces.begin(), pieces.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
  ArcSet s;
  for (const Arc& p : pieces) {
    if (!s.arcs_.empty() && p.lo <= s.arcs_.back().hi) {
      s.arcs_.back().hi = std::max(s.arcs_.back().hi, p.hi);
    } else {
      s.arcs_.push_back(p);
    }
  }
  if (s.arcs_.size() == 1 && s.arcs_[0].lo <= 0 && s.arcs_[0].hi >= kPi) return full();
  return s;
}

ArcSet ArcSet::double_cap(double center, double half_width) {
  if (half_width >= kPi / 2) return full();
  if (!(half_width > 0)) return empty();
  return from_arcs({{center - half_width, center + half_width}});
}

std::vector<ArcSet::Arc> ArcSet::circle_arcs() const {
  if (full_) return {{0.0, 2 * kPi}};
  std::vector<Arc> comps(arcs_.begin(), arcs_.end());
  if (comps.size() >= 2 && comps.front().lo <= 0 && comps.back().hi >= kPi) {
    comps.back().hi = kPi + comps.front().hi;
    comps.erase(comps.begin());
  }
  std::vector<Arc> out;
  for (const Arc& c : comps) out.push_back(c);
  for (const Arc& c : comps) out.push_back({c.lo + kPi, c.hi + kPi});
  return out;
}

int ArcSet::component_count() const {
  if (full_) return 1;
  if (arcs_.empty()) return 0;
  int c = static_cast<int>(arcs_.size());
  if (c >= 2 && arcs_.front().lo <= 0 && arcs_.back().hi >= kPi) --c;
  if (c == 1 && arcs_.front().lo <= 0 && arcs_.front().hi >= kPi) return 1;
  return 2 * c;
}

double ArcSet::total_angle() const {
  if (full_) return 2 * kPi;
  double sum = 0;
  for (const Arc& a : arcs_) sum += a.hi - a.lo;
  return 2 * sum;
}

bool ArcSet::contains(double t) const {
  if (full_) return true;
  const double u = wrap_angle(t, kPi);
  for (const Arc& a : arcs_)
    if (u >= a.lo && u <= a.hi) return true;
  return false;
}

ArcSet ArcSet::intersect(const ArcSet& other) const {
  if (full_) return other;
  if (other.full_) return *this;
  ArcSet s;
  std::size_t i = 0, j = 0;
  while (i < arcs_.size() && j < other.arcs_.size()) {
    const double lo = std::max(arcs_[i].lo, other.arcs_[j].lo);
    const double hi = std::min(arcs_[i].hi, other.arcs_[j].hi);
    if (hi > lo) s.arcs_.push_back({lo, hi});
    if (arcs_[i].hi < other.arcs_[j].hi) ++i; else ++j;
  }
  return s;
}

Cone2D Cone2D::make(double center, double half_angle) {
  if (!(half_angle > 0) || half_angle > kPi / 2)
    throw std::invalid_argument("cone half-angle must lie in (0, pi/2]");
  return {center, half_angle};
}

ArcSet Cone2D::arcs() const {
  if (is_full()) return ArcSet::full();
  return ArcSet::double_cap(center, half_angle);
}

// ---------------------------------------------------------------- Body2D

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::Vector2d direction(double t) { return {std::cos(t), std::sin(t)}; }

Eigen::Matrix2d rotation(double d) {
  Eigen::Matrix2d r;
  r << std::cos(d), -std::sin(d), std::sin(d), std::cos(d);
  return r;
}

// Roots of 1/e1 - 1/e2 on [0, π); reciprocal extents are finite everywhere.
std::vector<double> switch_angles(const Body2D& a, const Body2D& b) {
  constexpr int kSamples = 4096;
  auto phi = [&](double t) { return 1.0 / radial_extent(a, t) - 1.0 / radial_extent(b, t); };
  std::vector<double> roots;
  double t0 = 0, f0 = phi(0);
  for (int i = 1; i <= kSamples; ++i) {
    const double t1 = kPi * i / kSamples;
    const double f1 = phi(t1);
    if (f0 == 0) {
      roots.push_back(t0);
    } else if (f0 * f1 < 0) {
      double lo = t0, hi = t1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = (lo + hi) / 2;
        const double fm = phi(mid);
        if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; } else { hi = mid; }
      }
      roots.push_back((lo + hi) / 2);
    }
    t0 = t1;
    f0 = f1;
  }
  return roots;
}

// Local maxima of the extent, mod π.
std::vector<double> peak_angles(const Body2D& body) {
  return std::visit(
      [&](const auto& k) -> std::vector<double> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polygon>) {
          std::vector<double> out;
          for (std::size_t i = 0; i < k.vertices.size() / 2; ++i)
            out.push_back(wrap_angle(std::atan2(k.vertices[i].y(), k.vertices[i].x()), kPi));
          return out;
        } else if constexpr (std::is_same_v<K, Strip>) {
          return {wrap_angle(k.normal_angle + kPi / 2, kPi)};
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(k.form);
          const Eigen::Vector2d v = es.eigenvectors().col(0);
          return {wrap_angle(std::atan2(v.y(), v.x()), kPi)};
        } else if constexpr (std::is_same_v<K, Intersection2D>) {
          auto out = peak_angles(*k.first);
          auto more = peak_angles(*k.second);
          auto sw = switch_angles(*k.first, *k.second);
          out.insert(out.end(), more.begin(), more.end());
          out.insert(out.end(), sw.begin(), sw.end());
          return out;
        } else {
          return {};
        }
      },
      body.kind());
}

// Angles mod π at which radial_extent(body, t) may equal r.
std::vector<double> crossings(const Body2D& body, double r) {
  std::vector<double> out;
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polygon>) {
          const std::size_t m = k.vertices.size() / 2;
          for (std::size_t i = 0; i < m; ++i) {
            const Eigen::Vector2d& p = k.vertices[i];
            const Eigen::Vector2d e = k.vertices[i + 1] - p;
            const double a = e.squaredNorm();
            const double b = 2 * p.dot(e);
            const double c = p.squaredNorm() - r * r;
            const double disc = b * b - 4 * a * c;
            if (disc < 0) continue;
            const double sq = std::sqrt(disc);
            // At r = |vertex| rounding can push the root just off the edge on
            // both sides of the vertex; losing it would merge arcs.
            for (double s : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
              if (s < -1e-12 || s > 1 + 1e-12) continue;
              s = std::clamp(s, 0.0, 1.0);
              const Eigen::Vector2d x = p + s * e;
              out.push_back(wrap_angle(std::atan2(x.y(), x.x()), kPi));
            }
          }
        } else if constexpr (std::is_same_v<K, Strip>) {
          if (r > k.half_width) {
            const double w = std::acos(k.half_width / r);
            out.push_back(wrap_angle(k.normal_angle + w, kPi));
            out.push_back(wrap_angle(k.normal_angle - w, kPi));
          }
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          const double a11 = k.form(0, 0), a12 = k.form(0, 1), a22 = k.form(1, 1);
          const double mean = (a11 + a22) / 2;
          const double amp = std::hypot((a11 - a22) / 2, a12);
          if (amp > 0) {
            const double rhs = (1 / (r * r) - mean) / amp;
            if (std::abs(rhs) <= 1) {
              const double phase = std::atan2(a12, (a11 - a22) / 2);
              const double w = std::acos(rhs);
              out.push_back(wrap_angle((phase + w) / 2, kPi));
              out.push_back(wrap_angle((phase - w) / 2, kPi));
            }
          }
        }
      },
      body.kind());
  return out;
}

}  // namespace

Body2D Body2D::polygon(std::vector<Eigen::Vector2d> v) {
  const std::size_t n = v.size();
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("polygon needs an even number (>= 4) of vertices");
  double area2 = 0;
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    area2 += cross(v[i], v[(i + 1) % n]);
    scale = std::max(scale, v[i].norm());
  }
  if (area2 < 0) std::reverse(v.begin(), v.end());
  const std::size_t m = n / 2;
  for (std::size_t i = 0; i < m; ++i) {
    if ((v[i] + v[i + m]).norm() > 1e-12 * scale)
      throw std::invalid_argument("polygon is not centrally symmetric");
    v[i + m] = -v[i];
  }
  Polygon p;
  p.vertices = v;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = v[i];
    const Eigen::Vector2d& b = v[(i + 1) % n];
    const Eigen::Vector2d& c = v[(i + 2) % n];
    if (!(cross(b - a, c - b) > 0)) throw std::invalid_argument("polygon vertices not in strictly convex position");
    const Eigen::Vector2d e = b - a;
    const Eigen::Vector2d normal = Eigen::Vector2d(e.y(), -e.x()) / e.norm();
    const double offset = normal.dot(a);
    if (!(offset > 0)) throw std::invalid_argument("polygon does not contain the origin in its interior");
    p.normals.push_back(normal);
    p.offsets.push_back(offset);
  }
  return Body2D(std::move(p));
}

Body2D Body2D::symmetric_polygon(std::vector<Eigen::Vector2d> half) {
  const std::size_t m = half.size();
  for (std::size_t i = 0; i < m; ++i) half.push_back(-half[i]);
  return polygon(std::move(half));
}

Body2D Body2D::strip(double normal_angle, double half_width) {
  if (!(half_width > 0)) throw std::invalid_argument("strip half-width must be positive");
  if (std::isinf(half_width)) return full_plane();
  return Body2D(Strip{wrap_angle(normal_angle, kPi), half_width});
}

Body2D Body2D::ellipse(const Eigen::Matrix2d& form) {
  if (std::abs(form(0, 1) - form(1, 0)) > 1e-14 * form.norm())
    throw std::invalid_argument("ellipse form must be symmetric");
  Eigen::Matrix2d sym = (form + form.transpose()) / 2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sym);
  if (!(es.eigenvalues().minCoeff() > 0)) throw std::invalid_argument("ellipse form must be positive definite");
  return Body2D(Ellipse{sym});
}

Body2D Body2D::intersection(Body2D a, Body2D b) {
  return Body2D(Intersection2D{std::make_shared<const Body2D>(std::move(a)),
                               std::make_shared<const Body2D>(std::move(b))});
}

bool operator==(const Body2D& a, const Body2D& b) {
  if (a.kind_.index() != b.kind_.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using K = std::decay_t<decltype(x)>;
        const K& y = std::get<K>(b.kind_);
        if constexpr (std::is_same_v<K, Polygon>) {
          return x.vertices == y.vertices;
        } else if constexpr (std::is_same_v<K, Strip>) {
          return x.normal_angle == y.normal_angle && x.half_width == y.half_width;
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          return x.form == y.form;
        } else if constexpr (std::is_same_v<K, Intersection2D>) {
          return *x.first == *y.first && *x.second == *y.second;
        } else {
          return true;
        }
      },
      a.kind_);
}

double radial_extent(const Body2D& body, double t) {
  const Eigen::Vector2d d = direction(t);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polygon>) {
          double best = kInf;
          for (std::size_t i = 0; i < k.vertices.size() / 2; ++i) {
            const double c = std::abs(d.dot(k.normals[i]));
            if (c > 0) best = std::min(best, k.offsets[i] / c);
          }
          return best;
        } else if constexpr (std::is_same_v<K, Strip>) {
          // cos(π/2) rounds to ~6e-17; treat that as an exactly parallel ray.
          const double c = std::abs(std::cos(t - k.normal_angle));
          return c > 4 * std::numeric_limits<double>::epsilon() ? k.half_width / c : kInf;
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          return 1.0 / std::sqrt(d.dot(k.form * d));
        } else if constexpr (std::is_same_v<K, Intersection2D>) {
          return std::min(radial_extent(*k.first, t), radial_extent(*k.second, t));
        } else {
          return kInf;
        }
      },
      body.kind());
}

ArcSet angular_arcs(const Body2D& body, double r) {
  if (body.is_full_plane()) return ArcSet::full();
  if (const auto* in = std::get_if<Intersection2D>(&body.kind()))
    return angular_arcs(*in->first, r).intersect(angular_arcs(*in->second, r));
  std::vector<double> cuts = crossings(body, r);
  cuts.push_back(0.0);
  cuts.push_back(kPi);
  std::sort(cuts.begin(), cuts.end());
  std::vector<ArcSet::Arc> arcs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    if (radial_extent(body, (cuts[i] + cuts[i + 1]) / 2) >= r) arcs.push_back({cuts[i], cuts[i + 1]});
  }
  return ArcSet::from_arcs(std::move(arcs));
}

double angular_length(const Body2D& body, double r) { return angular_arcs(body, r).total_angle() / 4; }

Body2D intersect_min(const Body2D& a, const Body2D& b) {
  if (a.is_full_plane()) return b;
  if (b.is_full_plane()) return a;
  if (a == b) return a;
  return Body2D::intersection(a, b);
}

Body2D rotate(const Body2D& body, double delta) {
  return std::visit(
      [&](const auto& k) -> Body2D {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polygon>) {
          const Eigen::Matrix2d rot = rotation(delta);
          std::vector<Eigen::Vector2d> v;
          for (const auto& p : k.vertices) v.push_back(rot * p);
          return Body2D::polygon(std::move(v));
        } else if constexpr (std::is_same_v<K, Strip>) {
          return Body2D::strip(k.normal_angle + delta, k.half_width);
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          const Eigen::Matrix2d rot = rotation(delta);
          return Body2D::ellipse(rot * k.form * rot.transpose());
        } else if constexpr (std::is_same_v<K, Intersection2D>) {
          return Body2D::intersection(rotate(*k.first, delta), rotate(*k.second, delta));
        } else {
          return Body2D::full_plane();
        }
      },
      body.kind());
}

double inradius(const Body2D& body) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polygon>) {
          return *std::min_element(k.offsets.begin(), k.offsets.end());
        } else if constexpr (std::is_same_v<K, Strip>) {
          return k.half_width;
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(k.form);
          return 1.0 / std::sqrt(es.eigenvalues().maxCoeff());
        } else if constexpr (std::is_same_v<K, Intersection2D>) {
          return std::min(inradius(*k.first), inradius(*k.second));
        } else {
          return kInf;
        }
      },
      body.kind());
}

double circumradius(const Body2D& body) {
  if (body.is_full_plane()) return kInf;
  double best = 0;
  for (double t : peak_angles(body)) best = std::max(best, radial_extent(body, t));
  return best;
}

std::vector<double> kink_angles(const Body2D& body) {
  return std::visit(
      [&](const auto& k) -> std::vector<double> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polygon> || std::is_same_v<K, Strip>) {
          return peak_angles(body);
        } else if constexpr (std::is_same_v<K, Intersection2D>) {
          auto out = kink_angles(*k.first);
          auto more = kink_angles(*k.second);
          auto sw = switch_angles(*k.first, *k.second);
          out.insert(out.end(), more.begin(), more.end());
          out.insert(out.end(), sw.begin(), sw.end());
          return out;
        } else {
          return {};
        }
      },
      body.kind());
}

std::vector<double> kink_radii(const Body2D& body) {
  return std::visit(
      [&](const auto& k) -> std::vector<double> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Polygon>) {
          std::vector<double> out;
          for (std::size_t i = 0; i < k.vertices.size() / 2; ++i) {
            out.push_back(k.vertices[i].norm());
            out.push_back(k.offsets[i]);
          }
          return out;
        } else if constexpr (std::is_same_v<K, Strip>) {
          return {k.half_width};
        } else if constexpr (std::is_same_v<K, Ellipse>) {
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(k.form);
          return {1.0 / std::sqrt(es.eigenvalues()(0)), 1.0 / std::sqrt(es.eigenvalues()(1))};
        } else if constexpr (std::is_same_v<K, Intersection2D>) {
          auto out = kink_radii(*k.first);
          auto more = kink_radii(*k.second);
          out.insert(out.end(), more.begin(), more.end());
          for (double t : switch_angles(*k.first, *k.second)) {
            const double e = radial_extent(body, t);
            if (std::isfinite(e)) out.push_back(e);
          }
          return out;
        } else {
          return {};
        }
      },
      body.kind());
}

}  // namespace gcl
