#pragma once

#include "gcl/geometry2d.hpp"
#include "gcl/measures.hpp"
#include "gcl/sphere_localize.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace gcl {

inline constexpr int kMaxDimension = 64;

struct Slab {
  Eigen::VectorXd normal;  // unit after construction
  double half_width;
};

// Centrally symmetric convex body in R^n: slabs ∩ ellipsoids (either list may be empty).
class BodyND {
 public:
  static BodyND whole_space(int n);
  static BodyND slabs(int n, std::vector<Slab> slabs);
  // {x : xᵀ A x < 1} for positive-definite A.
  static BodyND ellipsoid(Eigen::MatrixXd form);
  static BodyND intersection(const BodyND& a, const BodyND& b);

  int dim() const { return n_; }
  const std::vector<Slab>& slab_list() const { return slabs_; }
  const std::vector<Eigen::MatrixXd>& ellipsoids() const { return forms_; }
  bool is_whole_space() const { return slabs_.empty() && forms_.empty(); }

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // Length of the segment from the origin along unit u inside the body.
  double radial_extent(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  // Index of the constraint attaining the radial extent: slabs first, then ellipsoids; -1 if unbounded.
  int active_constraint(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  // Section by span(e1, e2) in the coordinates (x·e1, x·e2).
  Body2D plane_section(const Eigen::VectorXd& e1, const Eigen::VectorXd& e2) const;

 private:
  explicit BodyND(int n) : n_(n) {}
  int n_;
  std::vector<Slab> slabs_;
  std::vector<Eigen::MatrixXd> forms_;
};

struct MCEstimate {
  double estimate = 0;
  double standard_error = 0;  // √(p̂(1−p̂)/N)
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

struct MCOptions {
  unsigned jobs = 1;
  std::uint64_t chunk = 1u << 16;
};

// Hit rate over N antithetic pairs (x, −x); the pair mean is the estimator.
MCEstimate gaussian_mc(const BodyND& body, std::uint64_t samples, std::uint64_t seed, const MCOptions& opt = {});

struct AntitheticReport {
  double naive_variance;       // per-draw variance of the plain indicator
  double antithetic_variance;  // per-draw variance of the pair mean
  double factor;               // naive / antithetic at equal draws
};

AntitheticReport antithetic_efficiency(const BodyND& body, std::uint64_t samples, std::uint64_t seed);

// ∫_0^{x(u)} t^{n−1} e^{−t²/2} dt with n = exponent_dim (defaults to the body dimension).
double radial_profile_f(const BodyND& body, const Eigen::VectorXd& u, std::optional<int> exponent_dim = {});

struct NeedleCheckND {
  double first;         // ∫ f_{K1} dν
  double second;        // ∫ f_{K2} dν
  double intersection;  // ∫ f_{K1∩K2} dν
  double whole;         // ∫ f_{R^n} dν
  double F;             // whole·intersection / (first·second)
  double margin;        // (whole·intersection − first·second) / whole²
  Eigen::VectorXd direction;  // needle midpoint
};

// The four needle integrals of the radial profiles; the radial exponent is n − 1.
NeedleCheckND needle_check_nd(const BodyND& k1, const BodyND& k2, const Needle& nd);

struct CorrelationReport {
  double gamma_first;
  double gamma_second;
  double gamma_both;
  double margin;  // γ(K1∩K2) − γ(K1)γ(K2)
  double se;      // delta-method standard error of the margin
  double z;
  std::uint64_t samples;
  std::uint64_t seed;
};

// Common random numbers for all three estimates.
CorrelationReport correlation_check_nd(const BodyND& k1, const BodyND& k2, std::uint64_t samples, std::uint64_t seed,
                                       const MCOptions& opt = {});

}  // namespace gcl
