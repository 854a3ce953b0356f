#pragma once

/// Deterministic random sampling.
///
/// All randomized components draw from this wrapper around std::mt19937_64.
/// Reductions (bounded integers, unit doubles, rational grids) are hand-rolled
/// from raw 64-bit draws, because the standard distribution adapters are
/// implementation-defined and would break byte-for-byte reproducibility
/// across toolchains.

#include "gamequery/game.hpp"

#include <cmath>
#include <random>

namespace gq {

class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, bound), bound >= 1. Rejection sampling; unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      std::uint64_t draw = engine_();
      if (draw < limit) return draw % bound;
    }
  }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("empty integer range");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_below(span));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Uniform rational n/denominator with n ranging over the integer grid
/// covering [lo, hi] (endpoints included when on-grid).
inline Rational sample_rational(DeterministicRng& rng, const Rational& lo, const Rational& hi,
                                std::int64_t denominator) {
  if (denominator < 1) throw std::invalid_argument("denominator must be positive");
  Rational d{denominator};
  BigInt lo_n = -floor_rational(Rational(-lo * d));  // ceil(lo * d)
  BigInt hi_n = floor_rational(Rational(hi * d));
  if (lo_n > hi_n) throw std::invalid_argument("empty rational grid");
  std::int64_t lo_i = lo_n.convert_to<std::int64_t>();
  std::int64_t hi_i = hi_n.convert_to<std::int64_t>();
  return Rational(rng.next_int(lo_i, hi_i)) / d;
}

/// Uniform grid matrix with entries in [lo, hi] and the given denominator.
inline GameMatrix<Rational> sample_rational_matrix(DeterministicRng& rng, int k,
                                                   const Rational& lo, const Rational& hi,
                                                   std::int64_t denominator) {
  std::vector<Rational> entries;
  entries.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  for (int i = 0; i < k * k; ++i) entries.push_back(sample_rational(rng, lo, hi, denominator));
  return GameMatrix<Rational>::create(k, lo, hi, std::move(entries));
}

inline GameMatrix<double> sample_float_matrix(DeterministicRng& rng, int k, double lo,
                                              double hi) {
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  for (int i = 0; i < k * k; ++i) entries.push_back(lo + (hi - lo) * rng.next_unit());
  return GameMatrix<double>::create(k, lo, hi, std::move(entries));
}

/// Uniform draw from {-1, 1}^{k x k}.
inline GameMatrix<Rational> sample_sign_matrix(DeterministicRng& rng, int k) {
  std::vector<Rational> entries;
  entries.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  for (int i = 0; i < k * k; ++i) {
    entries.push_back(rng.next_below(2) == 0 ? Rational{-1} : Rational{1});
  }
  return GameMatrix<Rational>::create(k, Rational{-1}, Rational{1}, std::move(entries));
}

/// Random exact mixed strategy on the denominator grid (never degenerate:
/// resamples until the weights have a positive sum, then normalizes).
inline Vector<Rational> sample_simplex_rational(DeterministicRng& rng, int k,
                                                std::int64_t denominator) {
  for (;;) {
    Vector<Rational> w(static_cast<std::size_t>(k));
    Rational sum{0};
    for (auto& x : w) {
      x = Rational(rng.next_int(0, denominator));
      sum += x;
    }
    if (sum == 0) continue;
    for (auto& x : w) x /= sum;
    return w;
  }
}

/// Random float strategy via normalized exponential draws.
inline Vector<double> sample_simplex_float(DeterministicRng& rng, int k) {
  Vector<double> w(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (auto& x : w) {
    // -log(1-u) is exponential; 1-u avoids log(0).
    double u = rng.next_unit();
    x = -std::log(1.0 - u);
    sum += x;
  }
  if (sum <= 0.0) return uniform_vector<double>(k);
  for (auto& x : w) x /= sum;
  return w;
}

/// Uniform matrix inside the max-entry ball of the given radius around
/// (1/2) I_k, on the grid with the given denominator refinement.
inline GameMatrix<Rational> sample_ball_matrix(DeterministicRng& rng, int k,
                                               const Rational& radius,
                                               std::int64_t refinement) {
  GameMatrix<Rational> center = half_identity<Rational>(k);
  std::vector<Rational> entries = center.entries;
  for (auto& x : entries) {
    Rational delta = Rational(rng.next_int(-refinement, refinement)) * radius /
                     Rational(refinement);
    x += delta;
  }
  return GameMatrix<Rational>::create(k, Rational{-1}, Rational{1}, std::move(entries));
}

}  // namespace gq
