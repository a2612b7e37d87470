#pragma once

#include "gcl/geometry2d.hpp"
#include "gcl/measures.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gcl {

struct ProfileOptions {
  // Grid bounds; non-positive values select defaults derived from the body.
  double r_min = 0;
  double r_max = 0;
  int nodes = 512;
};

// Half-width ε solving 2∫_{α-ε}^{α+ε} |cos(t-β)|^k dt = source mass, where the
// source mass of a cone slice is first rescaled to the whole circle.
double cap_epsilon(double source_mass, double alpha, const Measure2D& m, const Cone2D& cone = Cone2D::full());

// Radius-indexed family of double caps centered at `center`, tabulated on a
// geometric grid. Evaluation off the grid recomputes ε exactly.
class AngularProfile {
 public:
  AngularProfile(double center, std::function<double(double)> half_width, Measure2D m,
                 std::vector<double> radii);

  double center() const { return center_; }
  const Measure2D& measure() const { return measure_; }
  double epsilon(double r) const { return half_width_(r); }
  ArcSet cap(double r) const { return ArcSet::double_cap(center_, half_width_(r)); }

  std::span<const double> radii() const { return radii_; }
  std::span<const double> epsilons() const { return eps_; }
  // Largest |cap mass - source mass| over the grid, relative to the circle weight.
  double mass_residual() const { return mass_residual_; }

  const std::function<double(double)>& half_width() const { return half_width_; }

 private:
  friend AngularProfile double_cap_symmetrize(const Body2D&, double, const Measure2D&, const Cone2D&,
                                              const ProfileOptions&);
  double center_;
  std::function<double(double)> half_width_;
  Measure2D measure_;
  std::vector<double> radii_;
  std::vector<double> eps_;
  double mass_residual_ = 0;
};

// Geometric grid on [r_min, r_max] with the given breakpoints merged in.
std::vector<double> radius_grid(double r_min, double r_max, int nodes, std::span<const double> breaks = {});

// Ring mass of body ∩ (cone ∪ -cone) at radius r, rescaled to the whole circle.
double normalized_ring_mass(const Body2D& body, double r, const Measure2D& m, const Cone2D& cone);

AngularProfile double_cap_symmetrize(const Body2D& body, double alpha, const Measure2D& m,
                                     const Cone2D& cone = Cone2D::full(), const ProfileOptions& opt = {});

// Profile of the strip with axis direction `axis`: ε(r) = arcsin(min(1, h/r)).
AngularProfile strip_profile(double axis, double half_width, const Measure2D& m, const ProfileOptions& opt = {});

struct WidthReport {
  bool pass = true;
  // Largest normalized increase of r·sin ε(r) between consecutive grid radii.
  double worst_margin = 0;
  double worst_r = 0;
  // Largest ε'(r) + tan ε(r) / r from central differences.
  double fd_worst_margin = -kInf;
  double fd_worst_r = 0;
};

WidthReport width_decreasing_check(const AngularProfile& profile, double slack = 1e-7);

struct RadiusRecord {
  double r;
  double source_overlap;  // fraction of the cone slice covered by both bodies
  double cap_overlap;     // fraction of the circle covered by both caps
  bool bound_holds;
};

struct SymmetrizationResult {
  AngularProfile first;
  AngularProfile second;
  int step = 0;
  std::vector<RadiusRecord> per_radius;
  bool inter_bound_holds = true;
  bool containment_ok = true;
  std::string trace;
};

struct ChainOptions {
  ProfileOptions profile{};
  double slack = 1e-7;
  QuadOptions quad{};
};

SymmetrizationResult three_step_procedure(const Body2D& k1, const Body2D& k2, const Measure2D& m,
                                          const Cone2D& cone = Cone2D::full(), const ChainOptions& opt = {});

struct StageRecord {
  std::string name;
  double numerator;
  double denominator;
  double ratio;
  double error;
};

struct StripSpec {
  double axis;        // direction of the strip's axis
  double half_width;  // zero marks the degenerate line limit
  Body2D body() const { return Body2D::strip(axis + kPi / 2, half_width); }
};

struct ChainCheck {
  std::string name;
  double lhs;
  double rhs;
  bool holds;
};

struct ChainReport {
  int step = 0;
  double alpha1 = 0;
  double alpha2 = 0;
  double r0 = 0;
  bool degenerate = false;
  StripSpec strip1{};
  StripSpec strip2{};
  std::vector<StageRecord> stages;
  std::vector<ChainCheck> checks;
  std::vector<RadiusRecord> per_radius;
  bool inter_bound_holds = true;
  bool monotone = true;
  std::string trace;
};

ChainReport reduce_to_strips(const Body2D& k1, const Body2D& k2, const Cone2D& cone, const Measure2D& m,
                             const ChainOptions& opt = {});

struct BetaRow {
  double beta;
  ChainReport chain;
  bool good_strip;
};

struct BetaScanReport {
  std::vector<BetaRow> rows;
  std::optional<double> beta0;
  int max_arcs = 0;
};

BetaScanReport beta_scan(const Body2D& k1, const Body2D& k2, const std::function<Cone2D(double)>& cones, int k,
                         std::span<const double> betas, double angle_tol = 1e-6, const ChainOptions& opt = {});

}  // namespace gcl
