#pragma once

#include "gcl/geometry2d.hpp"
#include "gcl/quadrature.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gcl {

// Strips in the pole frame: the angular weight is |x|^k, so angle 0 is the pole.
struct PlaneStrip {
  double normal_angle;
  double half_width;  // perpendicular half-width; +∞ is the whole plane
};

struct StripPairMasses {
  double plane = 0;
  double first = 0;
  double second = 0;
  double both = 0;
  double abs_err = 0;  // largest quadrature error among the four masses

  double ratio() const { return plane * both / (first * second); }
};

// Masses of two strips and their intersection under |x|^k e^{-(x²+y²)/2}.
StripPairMasses strip_pair_masses(int k, const PlaneStrip& s1, const PlaneStrip& s2, const QuadOptions& q = {});

// Closed-form masses of {|x| < a} and {|y| < b}, which separate in x and y.
StripPairMasses separable_masses(int k, double a, double b);

struct StripPair {
  double a;    // half-width of the first strip
  double b;    // half-width of the second strip
  double rho;  // tilt in [0, π/2]
  int k;
  // Good: the first strip's normal is the pole and the second strip's axis is
  // tilted by rho from the x-axis ({|y - tan(rho) x| < b / cos(rho)}).
  // Generic: the normals sit at +rho and -rho from the pole.
  bool good = true;

  PlaneStrip first() const;
  PlaneStrip second() const;
};

struct RatioReport {
  double ratio;
  double abs_err;
};

// μ(R²) μ(S1 ∩ S2) / (μ(S1) μ(S2)).
RatioReport strip_pair_ratio(const StripPair& p, const QuadOptions& q = {});
// The same ratio for a pair that must be in the good configuration.
RatioReport axis_strip_ratio(const StripPair& p, const QuadOptions& q = {});

struct GromovReport {
  bool hypothesis_holds = true;          // f/g non-increasing on the grid
  std::optional<bool> conclusion_holds;  // only evaluated under the hypothesis
  double worst_hypothesis_margin = 0;    // largest increase of f/g
  double worst_conclusion_margin = 0;    // largest increase of the cumulative ratio
  double worst_x = 0;
};

// Cumulative ratios use the trapezoid rule, whose increment ratios are
// mediants of neighbouring f/g values, so the discrete lemma is exact.
GromovReport gromov_check(std::span<const double> x, std::span<const double> f, std::span<const double> g,
                          double tol = 1e-12);

// ∫_{-b+slope·x}^{b+slope·x} e^{-y²/2} dy / √(2π) at each x.
std::vector<double> gaussian_window_profile(double b, double slope, std::span<const double> xs);
// ∫_{-b+slope·y}^{b+slope·y} |x|^m e^{-x²/2} dx / ∫_R |x|^m e^{-x²/2} dx at each y.
std::vector<double> power_window_profile(int m, double b, double slope, std::span<const double> ys);

// Largest increase between consecutive samples; positive means an increasing stretch.
double largest_increase(std::span<const double> values);

struct CosIdentityReport {
  double max_residual = 0;
  bool ratio_decreasing = true;
  double ratio_near_zero = 0;  // sin x cos^{n-2} x / ∫_0^x cos^{n-1} at the first grid point
};

// ∫_0^x cos^{n-1} = sin x cos^{n-2} x + (n-2) ∫_0^x sin² cos^{n-3}, and the
// decrease of sin x cos^{n-2} x / ∫_0^x cos^{n-1} over (0, π/2).
CosIdentityReport cos_identity_check(int n, std::span<const double> xs);

struct ScanRow {
  StripPair pair;
  double ratio;
  double abs_err;
  bool violation;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  std::vector<std::size_t> violations;  // indices into rows
};

ScanReport counterexample_scan(int k, std::span<const double> widths, std::span<const double> angles,
                               bool good = false, double threshold = 1e-9, unsigned jobs = 1);

// Heat map of the ratio over (a, rho) at fixed b.
std::string ratio_heatmap_svg(int k, double b, std::span<const double> widths, std::span<const double> angles,
                              bool good = true);

}  // namespace gcl
