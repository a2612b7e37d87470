#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace gcl {

struct QuadOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-11;
  std::size_t max_intervals = 4000;
};

template <std::floating_point T = double>
struct QuadResult {
  T value{};
  T abs_err{};
  std::size_t nodes = 0;
  bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::floating_point T>
struct Segment {
  T lo, hi, value, err;
  bool operator<(const Segment& other) const { return err < other.err; }
};

template <std::floating_point T, class F>
Segment<T> gauss_kronrod(F& f, T lo, T hi) {
  const T center = (lo + hi) / 2;
  const T half = (hi - lo) / 2;
  const T fc = f(center);
  T kronrod = fc * T(kKronrodWeights[7]);
  T gauss = fc * T(kGaussWeights[3]);
  for (int j = 0; j < 7; ++j) {
    const T dx = half * T(kKronrodNodes[j]);
    const T pair = f(center - dx) + f(center + dx);
    kronrod += T(kKronrodWeights[j]) * pair;
    if (j % 2 == 1) gauss += T(kGaussWeights[j / 2]) * pair;
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration over [lo, hi]. Interior
// breakpoints are honored as mandatory segment boundaries. The returned error
// is the raw |K15 - G7| sum, which overestimates the true error for smooth
// integrands.
template <std::floating_point T = double, class F>
QuadResult<T> integrate(F&& f, T lo, T hi, std::span<const T> breakpoints = {},
                        const QuadOptions& opt = {}) {
  QuadResult<T> out;
  if (!(hi > lo)) return out;
  std::vector<T> cuts{lo};
  for (T b : breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Segment<T>> heap;
  T total = 0;
  T error = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto s = detail::gauss_kronrod<T>(f, cuts[i], cuts[i + 1]);
    out.nodes += 15;
    total += s.value;
    error += s.err;
    heap.push(s);
  }
  const auto target = [&] {
    return T(opt.abs_tol) + T(opt.rel_tol) * std::abs(total);
  };
  while (error > target() && heap.size() < opt.max_intervals) {
    auto worst = heap.top();
    const T mid = (worst.lo + worst.hi) / 2;
    if (!(mid > worst.lo && mid < worst.hi)) break;
    heap.pop();
    auto left = detail::gauss_kronrod<T>(f, worst.lo, mid);
    auto right = detail::gauss_kronrod<T>(f, mid, worst.hi);
    out.nodes += 30;
    total += left.value + right.value - worst.value;
    error += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum in a fixed order so the result does not depend on heap history.
  std::vector<detail::Segment<T>> segments;
  segments.reserve(heap.size());
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo; });
  out.value = 0;
  out.abs_err = 0;
  for (const auto& s : segments) {
    out.value += s.value;
    out.abs_err += s.err;
  }
  total = out.value;
  out.converged = out.abs_err <= target();
  return out;
}

template <std::floating_point T = double, class F>
QuadResult<T> integrate(F&& f, T lo, T hi, std::initializer_list<T> breakpoints,
                        const QuadOptions& opt = {}) {
  std::vector<T> b(breakpoints);
  return integrate<T>(std::forward<F>(f), lo, hi, std::span<const T>(b), opt);
}

}  // namespace gcl
