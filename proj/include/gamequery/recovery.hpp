#pragma once

/// Single-query matrix identification over finite alphabets, plus the
/// K-query full reconstruction.
///
/// When every entry of M lies in a known finite set {a_1/r, ..., a_n/r},
/// one query with the geometric probe p_i proportional to b^{-i} (base
/// b = spread + 1) makes the observation M^T p a positional encoding: each
/// column's observation carries the column's K digits in base b, most
/// significant first. decode_matrix inverts that encoding exactly.

#include "gamequery/oracle.hpp"
#include "gamequery/rng.hpp"

#include <algorithm>

namespace gq {

/// Raised when an alphabet description is invalid.
struct AlphabetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an observation cannot have come from an alphabet matrix under
/// the probe (wrong alphabet or corrupted feedback).
struct InconsistentObservationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A finite entry alphabet {a_1/r, ..., a_n/r} with integer numerators
/// (sorted, distinct, n >= 2) over a positive integer denominator r.
struct Alphabet {
  std::int64_t denominator = 1;
  std::vector<std::int64_t> numerators;

  static Alphabet create(std::int64_t denominator, std::vector<std::int64_t> numerators) {
    if (denominator < 1) throw AlphabetError("alphabet denominator must be >= 1");
    if (numerators.size() < 2) throw AlphabetError("alphabet needs at least two values");
    std::vector<std::int64_t> sorted = numerators;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw AlphabetError("alphabet numerators must be distinct");
    }
    Alphabet a;
    a.denominator = denominator;
    a.numerators = std::move(sorted);
    return a;
  }

  std::int64_t a_min() const { return numerators.front(); }
  std::int64_t a_max() const { return numerators.back(); }
  /// Positional base: spread + 1, the smallest base that keeps distinct
  /// digit strings distinct.
  std::int64_t base() const { return a_max() - a_min() + 1; }
  Rational lo() const { return Rational(a_min()) / Rational(denominator); }
  Rational hi() const { return Rational(a_max()) / Rational(denominator); }

  bool contains_numerator(std::int64_t v) const {
    return std::binary_search(numerators.begin(), numerators.end(), v);
  }
};

/// The geometric probe p with p_i proportional to b^{-i}: exactly
/// p_i = b^{K-i} (b-1) / (b^K - 1).
inline Vector<Rational> encode_probe(const Alphabet& alphabet, int k) {
  if (k < 1) throw AlphabetError("probe dimension must be >= 1");
  const Rational b{alphabet.base()};
  Vector<Rational> powers(static_cast<std::size_t>(k));
  Rational total{0};
  Rational cur{1};
  for (int i = k - 1; i >= 0; --i) {
    powers[static_cast<std::size_t>(i)] = cur;  // b^{K-i} with i 0-based
    total += cur;
    cur *= b;
  }
  for (auto& x : powers) x /= total;
  return powers;
}

/// Inverts one observation obs = M^T p (the negated column-player loss of
/// the probe query) into the unique alphabet matrix producing it. Exact;
/// throws InconsistentObservationError when no alphabet matrix matches.
inline GameMatrix<Rational> decode_matrix(const Alphabet& alphabet, int k,
                                          const Vector<Rational>& observed) {
  if (static_cast<int>(observed.size()) != k) {
    throw DimensionMismatchError("observation has wrong dimension");
  }
  const std::int64_t b = alphabet.base();
  const Rational r{alphabet.denominator};

  // Z = sum_i b^{-i}; the probe is b^{-i}/Z, so u = obs * Z recovers
  // sum_i b^{-i} a_ij / r per column.
  Rational z{0};
  Rational binv = Rational{1} / Rational{b};
  Rational cur = binv;
  for (int i = 0; i < k; ++i) {
    z += cur;
    cur *= binv;
  }

  std::vector<Rational> entries(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    // w = sum_i d_i b^{-i} with shifted digits d_i = a_ij - a_min in [0, b-1].
    Rational u = observed[static_cast<std::size_t>(j)] * z;
    Rational w = (u - Rational(alphabet.a_min()) * z / r) * r;
    if (w < 0 || w >= 1) {
      throw InconsistentObservationError("inconsistent observation");
    }
    for (int i = 0; i < k; ++i) {
      w *= Rational{b};
      BigInt dig = floor_rational(w);
      if (dig < 0 || dig >= b) throw InconsistentObservationError("inconsistent observation");
      auto d = dig.convert_to<std::int64_t>();
      w -= Rational(d);
      std::int64_t numerator = d + alphabet.a_min();
      if (!alphabet.contains_numerator(numerator)) {
        throw InconsistentObservationError("inconsistent observation");
      }
      entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
              static_cast<std::size_t>(j)] = Rational(numerator) / r;
    }
    if (w != 0) throw InconsistentObservationError("inconsistent observation");
  }
  return GameMatrix<Rational>::create(k, alphabet.lo(), alphabet.hi(), std::move(entries));
}

/// Issues the probe query (probe, uniform) and decodes the hidden matrix
/// from the single observation -loss_q = M^T p.
inline GameMatrix<Rational> one_query_recovery(Session<Rational>& session,
                                               const Alphabet& alphabet) {
  const int k = session.k();
  Vector<Rational> probe = encode_probe(alphabet, k);
  QueryRecord<Rational> r = session.query(probe, uniform_vector<Rational>(k));
  return decode_matrix(alphabet, k, scale(r.loss_q, Rational{-1}));
}

/// K basis queries (e_t, e_t): assembles M row-by-row from -loss_q and
/// verifies each entry against the column reads loss_p. Exact agreement is
/// required; disagreement means the oracle answered inconsistently.
inline GameMatrix<Rational> full_recovery(Session<Rational>& session, int k) {
  if (k != session.k()) throw DimensionMismatchError("dimension does not match session");
  std::vector<Rational> rows(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  std::vector<Rational> cols(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  Rational lo{0}, hi{0};
  for (int t = 1; t <= k; ++t) {
    Vector<Rational> e = basis_vector<Rational>(k, t);
    QueryRecord<Rational> r = session.query(e, e);
    for (int j = 0; j < k; ++j) {
      const Rational row_entry = -r.loss_q[static_cast<std::size_t>(j)];  // M[t-1][j]
      const Rational col_entry = r.loss_p[static_cast<std::size_t>(j)];   // M[j][t-1]
      rows[static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(k) +
           static_cast<std::size_t>(j)] = row_entry;
      cols[static_cast<std::size_t>(j) * static_cast<std::size_t>(k) +
           static_cast<std::size_t>(t - 1)] = col_entry;
      if (row_entry < lo) lo = row_entry;
      if (row_entry > hi) hi = row_entry;
    }
  }
  if (rows != cols) {
    throw InconsistentObservationError("row and column reconstructions disagree");
  }
  return GameMatrix<Rational>::create(k, lo, hi, std::move(rows));
}

/// Uniform random matrix with every entry drawn from the alphabet; bounds
/// are the alphabet's own value range.
inline GameMatrix<Rational> sample_alphabet_matrix(DeterministicRng& rng,
                                                   const Alphabet& alphabet, int k) {
  std::vector<Rational> entries;
  entries.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  const auto n = static_cast<std::uint64_t>(alphabet.numerators.size());
  for (int i = 0; i < k * k; ++i) {
    std::uint64_t pick = rng.next_below(n);
    entries.emplace_back(Rational(alphabet.numerators[static_cast<std::size_t>(pick)]) /
                         Rational(alphabet.denominator));
  }
  return GameMatrix<Rational>::create(k, alphabet.lo(), alphabet.hi(), std::move(entries));
}

}  // namespace gq
