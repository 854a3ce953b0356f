#pragma once

/// Scalar modes and small exact-vector utilities.
///
/// The library runs every algorithm in one of two numeric modes, selected at
/// compile time through the scalar template parameter:
///   - gq::Rational : arbitrary-precision rationals (GMP-backed). All
///     adversary simulations and invariant verification run here, because
///     the tracked quantities shrink far below double precision.
///   - double       : fast mode for learner benchmarking. In-span decisions
///     use a relative tolerance of 1e-9, always compared in squared form so
///     no square roots are ever taken.

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gq {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

template <class S>
using Vector = std::vector<S>;

/// Raised when two operands have incompatible dimensions.
struct DimensionMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a scalar string cannot be parsed in the requested mode.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-mode numeric policy. `exact` modes compare with =; the float mode
/// uses the relative in-span tolerance below and squared comparisons.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<Rational> {
  static constexpr bool exact = true;
  /// A residual is "in span" only when it is identically zero.
  static bool residual_in_span(const Rational& res_norm_sq, const Rational& /*ref_norm_sq*/) {
    return res_norm_sq == 0;
  }
  static bool is_zero(const Rational& x) { return x == 0; }
};

template <>
struct ScalarOps<double> {
  static constexpr bool exact = false;
  /// Relative in-span tolerance (1e-9), applied to squared norms.
  static constexpr double span_rel_tol = 1e-9;
  static bool residual_in_span(double res_norm_sq, double ref_norm_sq) {
    return res_norm_sq <= span_rel_tol * span_rel_tol * ref_norm_sq;
  }
  static bool is_zero(double x) { return x == 0.0; }
};

// ---------------------------------------------------------------------------
// Vector arithmetic
// ---------------------------------------------------------------------------

template <class S>
inline void require_same_dim(const Vector<S>& a, const Vector<S>& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatchError("vector dimensions differ: " + std::to_string(a.size()) +
                                 " vs " + std::to_string(b.size()));
  }
}

template <class S>
inline S dot(const Vector<S>& a, const Vector<S>& b) {
  require_same_dim(a, b);
  S acc{0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class S>
inline S norm_sq(const Vector<S>& a) {
  S acc{0};
  for (const S& x : a) acc += x * x;
  return acc;
}

template <class S>
inline S abs_scalar(const S& x) {
  return x < 0 ? S(-x) : x;
}

/// Largest absolute entry (the vector infinity norm).
template <class S>
inline S inf_norm(const Vector<S>& a) {
  S best{0};
  for (const S& x : a) {
    S m = abs_scalar(x);
    if (m > best) best = m;
  }
  return best;
}

template <class S>
inline Vector<S> add(const Vector<S>& a, const Vector<S>& b) {
  require_same_dim(a, b);
  Vector<S> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

template <class S>
inline Vector<S> sub(const Vector<S>& a, const Vector<S>& b) {
  require_same_dim(a, b);
  Vector<S> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

template <class S>
inline Vector<S> scale(const Vector<S>& a, const S& c) {
  Vector<S> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * c;
  return out;
}

/// a += c * b, in place.
template <class S>
inline void axpy(Vector<S>& a, const S& c, const Vector<S>& b) {
  require_same_dim(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += c * b[i];
}

template <class S>
inline bool is_zero_vector(const Vector<S>& a) {
  for (const S& x : a) {
    if (!ScalarOps<S>::is_zero(x)) return false;
  }
  return true;
}

template <class S>
inline Vector<S> zero_vector(int dim) {
  return Vector<S>(static_cast<std::size_t>(dim), S{0});
}

/// Standard basis vector e_i (1-based index).
template <class S>
inline Vector<S> basis_vector(int dim, int index_1based) {
  if (index_1based < 1 || index_1based > dim) {
    throw DimensionMismatchError("basis index out of range");
  }
  Vector<S> v = zero_vector<S>(dim);
  v[static_cast<std::size_t>(index_1based - 1)] = S{1};
  return v;
}

template <class S>
inline Vector<S> uniform_vector(int dim) {
  return Vector<S>(static_cast<std::size_t>(dim), S{1} / static_cast<S>(dim));
}

// ---------------------------------------------------------------------------
// Integer/rational helpers
// ---------------------------------------------------------------------------

/// 2^e for any integer e (exact).
inline Rational pow2_rational(long e) {
  Rational r{1};
  BigInt p{1};
  p <<= static_cast<unsigned>(e < 0 ? -e : e);
  if (e >= 0) return Rational(p);
  return Rational(1) / Rational(p);
}

/// x^e for e >= 0 (exact).
inline Rational pow_rational(const Rational& x, unsigned long e) {
  Rational acc{1};
  Rational base = x;
  while (e > 0) {
    if (e & 1UL) acc *= base;
    base *= base;
    e >>= 1UL;
  }
  return acc;
}

/// Floor of a rational as a big integer.
inline BigInt floor_rational(const Rational& x) {
  BigInt n = numerator(x);
  BigInt d = denominator(x);  // always > 0 in canonical form
  BigInt q = n / d;
  if (n < 0 && q * d != n) --q;
  return q;
}

/// Exact square root when the argument is a perfect square of a rational;
/// empty otherwise. Never approximates.
inline std::optional<Rational> sqrt_exact(const Rational& x) {
  if (x < 0) return std::nullopt;
  BigInt n = numerator(x);
  BigInt d = denominator(x);
  BigInt sn = sqrt(n);
  BigInt sd = sqrt(d);
  if (sn * sn != n || sd * sd != d) return std::nullopt;
  return Rational(sn) / Rational(sd);
}

// ---------------------------------------------------------------------------
// Serialization: canonical "num/den" for rationals, shortest round-trip
// decimals for doubles.
// ---------------------------------------------------------------------------

inline std::string format_scalar(const Rational& x) {
  return numerator(x).str() + "/" + denominator(x).str();
}

inline std::string format_scalar(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

template <class S>
S parse_scalar(const std::string& text);

/// Accepts "num/den" or a bare integer; canonicalizes and rejects zero
/// denominators.
template <>
inline Rational parse_scalar<Rational>(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational token");
  auto slash = text.find('/');
  if (slash == 0 || slash == text.size() - 1) {
    throw ParseError("malformed rational: " + text);
  }
  try {
    if (slash == std::string::npos) {
      return Rational(BigInt(text));
    }
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in rational: " + text);
    return Rational(num) / Rational(den);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("malformed rational: " + text);
  }
}

template <>
inline double parse_scalar<double>(const std::string& text) {
  double value = 0.0;
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    // Allow rational-style tokens in float mode for convenience.
    double num = parse_scalar<double>(text.substr(0, slash));
    double den = parse_scalar<double>(text.substr(slash + 1));
    if (den == 0.0) throw ParseError("zero denominator: " + text);
    return num / den;
  }
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError("malformed number: " + text);
  }
  return value;
}

/// Nearest-double view of a rational (for reporting columns only).
inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

template <class S>
inline std::string format_vector(const Vector<S>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_scalar(v[i]);
  }
  return out;
}

}  // namespace gq
