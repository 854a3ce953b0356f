#pragma once

/// Closed-form query-complexity bounds.
///
/// Three formulas drive everything here:
///   - upper_T(K, eps) = min(c ln K / eps, K): queries sufficient for an
///     eps-equilibrium (c is a chart constant, default 8, never asserted by
///     tests), with the large-eps regimes reporting 2 (eps >= 1/2) and
///     0 (eps >= 1 - 1/K).
///   - lower_eps(K, T) = (1/(2^10 K^4)) * (1/(2^{11/2} K^{5/2} T))^{T+1}:
///     below this accuracy, T adaptive queries cannot suffice. The square of
///     this value is an exact rational (all half-integer powers cancel), so
///     the implementation computes lower_eps^2 exactly and takes exact
///     square roots when they exist.
///   - lower_T(K, eps) = invert_query_bound(2^-11 K^-4, 2^{5.5} K^{2.5}, eps) - 1
///     on the guard region eps <= 1/(e 2^11 K^4), clamped to [0, K/2 - 1].
///
/// invert_query_bound(a, b, eps) = log(a/eps) / log(b log(a/eps)) inverts
/// "eps <= a x^-x-style" decay. Its stated domain is eps <= a/e; that alone
/// does not keep the denominator positive (a=1, b=1, eps = 1/4 gives
/// log(b log(a/eps)) = log(log 4) < 1/3 and a useless huge "bound";
/// b log(a/eps) < 1 would even flip the sign), so the implementation also
/// requires b log(a/eps) >= e, which restores the intended implication
/// "eps <= a (1/(bx))^x implies result <= x" on the whole accepted domain.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "gamequery/numerics.hpp"

namespace gq {

/// Raised when invert_query_bound is evaluated outside its domain.
struct GuardViolationError : std::runtime_error {
  GuardViolationError() : std::runtime_error("guard violated") {}
};

/// log(a/eps) / log(b log(a/eps)). Domain: a, b, eps > 0, eps <= a/e, and
/// b log(a/eps) >= e (see the header comment for why the second guard is
/// load-bearing).
inline double invert_query_bound(double a, double b, double eps) {
  if (!(a > 0) || !(b > 0) || !(eps > 0)) {
    throw std::invalid_argument("invert_query_bound needs positive a, b, eps");
  }
  const double y = std::log(a / eps);
  if (y < 1.0) throw GuardViolationError{};
  const double z = b * y;
  if (z < std::exp(1.0)) throw GuardViolationError{};
  return y / std::log(z);
}

namespace detail {

inline void require_bound_dims(int k, int horizon) {
  if (k < 2) throw std::invalid_argument("bounds need K >= 2");
  if (horizon < 1) throw std::invalid_argument("bounds need T >= 1");
}

}  // namespace detail

/// lower_eps(K, T)^2 as an exact rational:
/// (1/(2^20 K^8)) * (1/(2^11 K^5 T^2))^{T+1}.
inline Rational lower_eps_sq_exact(int k, int horizon) {
  detail::require_bound_dims(k, horizon);
  const Rational kk{k};
  const Rational tt{horizon};
  Rational prefactor = Rational{1} / (pow2_rational(20) * pow_rational(kk, 8));
  Rational base = Rational{1} / (pow2_rational(11) * pow_rational(kk, 5) * tt * tt);
  return prefactor * pow_rational(base, static_cast<unsigned long>(horizon) + 1);
}

/// Exact lower_eps(K, T) when its square is a perfect rational square
/// (e.g. K=8, T=2 gives exactly 2^-64); empty otherwise.
inline std::optional<Rational> lower_eps_exact(int k, int horizon) {
  return sqrt_exact(lower_eps_sq_exact(k, horizon));
}

/// lower_eps(K, T) as a double (may underflow to 0 for very large K, T; the
/// exact-square form above never does).
inline double lower_eps_value(int k, int horizon) {
  return std::sqrt(to_double(lower_eps_sq_exact(k, horizon)));
}

/// ceil(K/2 - 1): queries provably necessary for an exact equilibrium.
inline int exact_lower_T(int k) {
  if (k < 2) throw std::invalid_argument("bounds need K >= 2");
  return (k - 1) / 2;
}

/// Sufficient queries at accuracy eps; c is the chart constant.
inline double upper_T_for(int k, double eps, double c = 8.0) {
  if (k < 2) throw std::invalid_argument("bounds need K >= 2");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (eps >= 1.0 - 1.0 / k) return 0.0;
  const double base = std::min(c * std::log(static_cast<double>(k)) / eps,
                               static_cast<double>(k));
  if (eps >= 0.5) return std::min(2.0, base);
  return base;
}

/// Necessary queries at accuracy eps: invert_query_bound(2^-11 K^-4,
/// 2^{5.5} K^{2.5}, eps) - 1 on the guard region eps <= 1/(e 2^11 K^4),
/// clamped to [0, K/2 - 1]; zero outside the guard region (the bound is
/// vacuous there).
inline double lower_T_for(int k, double eps) {
  if (k < 2) throw std::invalid_argument("bounds need K >= 2");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  const double kd = static_cast<double>(k);
  const double a = std::pow(2.0, -11.0) * std::pow(kd, -4.0);
  const double b = std::pow(2.0, 5.5) * std::pow(kd, 2.5);
  // Test the guard exactly as the inversion does, so a boundary eps == a/e
  // that rounds to log(a/eps) just under 1 falls into the zero branch
  // instead of tripping the inversion's guard.
  const double y = std::log(a / eps);
  if (y < 1.0 || b * y < std::exp(1.0)) return 0.0;
  double t = invert_query_bound(a, b, eps) - 1.0;
  const double cap = kd / 2.0 - 1.0;
  if (t > cap) t = cap;
  if (t < 0.0) t = 0.0;
  return t;
}

/// One row of the query-complexity picture, parameterized by either an
/// accuracy eps (upper_T / lower_T filled) or a horizon T (lower_eps
/// filled). Unused scalar fields are NaN / zero.
struct BoundsRecord {
  int k = 0;
  double eps = std::numeric_limits<double>::quiet_NaN();
  int T = 0;
  double upper_T = std::numeric_limits<double>::quiet_NaN();
  double lower_T = std::numeric_limits<double>::quiet_NaN();
  double lower_eps = std::numeric_limits<double>::quiet_NaN();
  Rational lower_eps_sq{0};             // exact square (horizon records)
  std::optional<Rational> lower_eps_rational;  // exact root when one exists
  int exact_lower_T = 0;
};

/// Bounds as a function of accuracy.
inline BoundsRecord theoretical_bounds(int k, double eps, double c = 8.0) {
  BoundsRecord r;
  r.k = k;
  r.eps = eps;
  r.upper_T = upper_T_for(k, eps, c);
  r.lower_T = lower_T_for(k, eps);
  r.exact_lower_T = exact_lower_T(k);
  return r;
}

/// Bounds as a function of the horizon.
inline BoundsRecord horizon_bounds(int k, int horizon) {
  BoundsRecord r;
  r.k = k;
  r.T = horizon;
  r.lower_eps_sq = lower_eps_sq_exact(k, horizon);
  r.lower_eps_rational = lower_eps_exact(k, horizon);
  r.lower_eps = lower_eps_value(k, horizon);
  r.exact_lower_T = exact_lower_T(k);
  return r;
}

}  // namespace gq
