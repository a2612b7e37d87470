#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>

namespace gcl {

namespace detail {

// Power series for P(a, x); converges quickly for x < a + 1.
template <std::floating_point T>
T gamma_p_series(T a, T x) {
  T term = T(1) / a;
  T sum = term;
  for (int n = 1; n < 1000; ++n) {
    term *= x / (a + T(n));
    sum += term;
    if (std::abs(term) < std::abs(sum) * std::numeric_limits<T>::epsilon()) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), modified Lentz; used for x >= a + 1.
template <std::floating_point T>
T gamma_q_fraction(T a, T x) {
  constexpr T tiny = std::numeric_limits<T>::min() / std::numeric_limits<T>::epsilon();
  T b = x + T(1) - a;
  T c = T(1) / tiny;
  T d = T(1) / b;
  T h = d;
  for (int i = 1; i < 1000; ++i) {
    const T an = -T(i) * (T(i) - a);
    b += T(2);
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = T(1) / d;
    const T delta = d * c;
    h *= delta;
    if (std::abs(delta - T(1)) < std::numeric_limits<T>::epsilon()) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Regularized lower incomplete gamma P(a, x) = γ(a, x) / Γ(a).
template <std::floating_point T>
T gamma_p(T a, T x) {
  if (!(a > T(0))) throw std::domain_error("gamma_p: a must be positive");
  if (x < T(0)) throw std::domain_error("gamma_p: x must be non-negative");
  if (x == T(0)) return T(0);
  if (std::isinf(x)) return T(1);
  if (x < a + T(1)) return detail::gamma_p_series(a, x);
  return T(1) - detail::gamma_q_fraction(a, x);
}

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), accurate in the tail.
template <std::floating_point T>
T gamma_q(T a, T x) {
  if (!(a > T(0))) throw std::domain_error("gamma_q: a must be positive");
  if (x < T(0)) throw std::domain_error("gamma_q: x must be non-negative");
  if (x == T(0)) return T(1);
  if (std::isinf(x)) return T(0);
  if (x < a + T(1)) return T(1) - detail::gamma_p_series(a, x);
  return detail::gamma_q_fraction(a, x);
}

// Unregularized lower incomplete gamma γ(a, x).
template <std::floating_point T>
T lower_gamma(T a, T x) {
  return gamma_p(a, x) * std::tgamma(a);
}

}  // namespace gcl
