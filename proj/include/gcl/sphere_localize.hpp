#pragma once

#include "gcl/geometry2d.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gcl {

using Vec3 = Eigen::Vector3d;
using SphereFunction = std::function<double(const Vec3&)>;

// Geodesic segment t -> cos t·e1 + sin t·e2, t in [t_a, t_b], carrying the
// probability density C cos^k(t - phase). The frame may live in any R^n.
class Needle {
 public:
  static Needle make(Eigen::VectorXd e1, Eigen::VectorXd e2, double t_a, double t_b, double phase, int k);
  // The half-circle centred on the density maximum.
  static Needle half_circle(Eigen::VectorXd e1, Eigen::VectorXd e2, double phase, int k);

  const Eigen::VectorXd& e1() const { return e1_; }
  const Eigen::VectorXd& e2() const { return e2_; }
  double t_a() const { return t_a_; }
  double t_b() const { return t_b_; }
  double phase() const { return phase_; }
  int k() const { return k_; }
  double normalization() const { return norm_; }
  double density(double t) const;
  Eigen::VectorXd point(double t) const;
  // Same segment traversed through the antipodal points.
  Needle antipodal() const;

 private:
  Eigen::VectorXd e1_, e2_;
  double t_a_ = 0, t_b_ = 0, phase_ = 0;
  int k_ = 0;
  double norm_ = 1;
};

double needle_integral(const std::function<double(double)>& fn, const Needle& nd);

// Intersection of open hemispheres {x : x·n > 0}; no normals means the whole sphere.
class SphericalRegion {
 public:
  SphericalRegion();
  explicit SphericalRegion(std::vector<Vec3> normals);

  SphericalRegion cut(const Vec3& normal) const;
  std::span<const Vec3> normals() const { return normals_; }
  bool contains(const Vec3& x) const;
  bool is_empty() const { return pieces_.empty(); }
  // Convex spherical polygons, each inside one octant, whose union is the region.
  const std::vector<std::vector<Vec3>>& pieces() const { return pieces_; }

 private:
  void build();
  std::vector<Vec3> normals_;
  std::vector<std::vector<Vec3>> pieces_;
};

struct SphereQuadrature {
  double value;       // centroid rule at the requested depth
  double coarse;      // the same rule one level coarser
  double richardson;  // value + (value - coarse) / 3
  double error;       // |value - coarse|
};

// Recursive geodesic subdivision; leaf areas are exact spherical excesses.
SphereQuadrature sphere_integral(const SphericalRegion& region, const SphereFunction& fn, int depth = 7);
double region_area(const SphericalRegion& region, int depth = 4);

// Width: min over great circles of the largest angular distance of the region from it.
struct RegionWidth {
  double width;
  Vec3 circle_normal;
};
RegionWidth region_width(const SphericalRegion& region);

struct HalvingOptions {
  int coarse_depth = 3;
  int depth = 7;
  int grid_azimuth = 64;
  int grid_polar = 32;
  int candidates = 6;
  int max_iterations = 40;
  double tol = 1e-9;  // on residuals relative to the region integrals
  // Restricts cut normals to the great circle orthogonal to this axis.
  std::optional<Vec3> orthogonal_to;
};

struct HalvingResult {
  Vec3 normal;
  double residual1 = 0;  // ∫_{R∩x∨} G1 - ∫_{R∖x∨} G1
  double residual2 = 0;
  double plus1 = 0, plus2 = 0;    // integrals over R ∩ {x·n > 0}
  double minus1 = 0, minus2 = 0;  // integrals over R ∩ {x·n < 0}
  bool converged = false;
  bool positive = false;
  int iterations = 0;
};

// Residual pair of a given cut at a given quadrature depth.
std::pair<double, double> halving_residuals(const SphericalRegion& region, const SphereFunction& g1,
                                            const SphereFunction& g2, const Vec3& normal, int depth);

HalvingResult hemisphere_halving(const SphericalRegion& region, const SphereFunction& g1, const SphereFunction& g2,
                                 const HalvingOptions& opt = {});

struct NeedleFit {
  Vec3 circle_normal;
  Vec3 e1, e2;
  double phase = 0;     // t0 of the fitted cos^k(t - t0) profile
  double exponent = 0;  // fitted k
  double rms = 0;       // residual of the log-linear fit
  int samples = 0;
};

// Cross-section thickness along meridians of the width circle, fitted by
// log thickness = c + k log cos(t - t0).
std::optional<NeedleFit> fit_needle(const SphericalRegion& region);

struct PancakeStep {
  Vec3 normal;
  double width;
  double area;
  double g1;
  double g2;
  double residual1;
  double residual2;
  bool positive;
};

struct PancakeOptions {
  double target_width = 0;  // stop once the width falls below this; 0 disables
  HalvingOptions halving{};
  bool keep_thinner = true;  // otherwise the half on the positive side of the cut
};

struct PancakeReport {
  std::vector<SphericalRegion> regions;  // regions[0] is the input
  std::vector<PancakeStep> steps;
  double achieved_width = 0;
  bool reached_target = false;
  bool all_positive = true;
  std::optional<NeedleFit> needle;
};

PancakeReport pancake_iterate(const SphericalRegion& region, const SphereFunction& g1, const SphereFunction& g2,
                              int depth, const PancakeOptions& opt = {});

// Sampled Hausdorff distance between two regions, in radians.
double region_hausdorff(const SphericalRegion& a, const SphericalRegion& b, int samples_per_edge = 32);

// F = μ(C) μ(C∩K1∩K2) / (μ(C∩K1) μ(C∩K2)) for the needle's cone in its plane,
// with plane sections given as bodies in the frame (e1, e2).
double needle_F(const Needle& nd, const Body2D& k1, const Body2D& k2);

// Orthographic projection of a region sequence, viewed from `view`.
std::string regions_svg(std::span<const SphericalRegion> regions, const Vec3& view);

}  // namespace gcl
