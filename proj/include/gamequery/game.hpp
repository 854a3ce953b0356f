#pragma once

/// Zero-sum matrix games on the simplex: bounded matrices, mixed strategies,
/// and the joint suboptimality gap.
///
/// Conventions (row player minimizes, column player maximizes):
///   - the row player plays p, suffers loss vector M q,
///   - the column player plays q, suffers loss vector -M^T p,
///   - gap(M, p, q) = max_j (M^T p)_j - min_i (M q)_i >= 0,
///   - a pair is an eps-equilibrium iff gap <= 2 eps.

#include "gamequery/numerics.hpp"

namespace gq {

/// Raised when matrix entries violate the declared bounds or the shape is
/// invalid.
struct MatrixBoundsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a vector fails simplex validation.
struct DistributionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A K x K payoff matrix with declared entry bounds [lo, hi]. Construction
/// validates every entry against the bounds, so a GameMatrix is always
/// in-envelope by construction.
template <class S>
struct GameMatrix {
  int k = 0;
  S lo{0};
  S hi{0};
  std::vector<S> entries;  // row-major, k*k

  static GameMatrix create(int k, S lo, S hi, std::vector<S> entries) {
    if (k < 1) throw MatrixBoundsError("matrix dimension must be at least 1");
    if (!(lo <= hi)) throw MatrixBoundsError("invalid bounds: lo > hi");
    if (entries.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k)) {
      throw MatrixBoundsError("entry count does not match dimension");
    }
    for (const S& x : entries) {
      if (x < lo || x > hi) {
        throw MatrixBoundsError("entry out of declared bounds");
      }
    }
    GameMatrix m;
    m.k = k;
    m.lo = std::move(lo);
    m.hi = std::move(hi);
    m.entries = std::move(entries);
    return m;
  }

  const S& at(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                   static_cast<std::size_t>(j)];
  }
  S& at(int i, int j) {
    return entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                   static_cast<std::size_t>(j)];
  }

  Vector<S> row(int i) const {
    Vector<S> out(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] = at(i, j);
    return out;
  }
  Vector<S> col(int j) const {
    Vector<S> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = at(i, j);
    return out;
  }

  /// M q — the row player's loss vector under column strategy q.
  Vector<S> apply(const Vector<S>& q) const {
    if (static_cast<int>(q.size()) != k) throw DimensionMismatchError("M*q dimension mismatch");
    Vector<S> out = zero_vector<S>(k);
    for (int i = 0; i < k; ++i) {
      S acc{0};
      for (int j = 0; j < k; ++j) acc += at(i, j) * q[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = std::move(acc);
    }
    return out;
  }

  /// M^T p — the column player's payoff vector under row strategy p.
  Vector<S> apply_transposed(const Vector<S>& p) const {
    if (static_cast<int>(p.size()) != k) throw DimensionMismatchError("M^T*p dimension mismatch");
    Vector<S> out = zero_vector<S>(k);
    for (int j = 0; j < k; ++j) {
      S acc{0};
      for (int i = 0; i < k; ++i) acc += at(i, j) * p[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(j)] = std::move(acc);
    }
    return out;
  }

  /// Largest absolute entry of M - other (the matrix max-entry norm of the
  /// difference).
  S max_entry_distance(const GameMatrix& other) const {
    if (other.k != k) throw DimensionMismatchError("matrix dimension mismatch");
    S best{0};
    for (std::size_t i = 0; i < entries.size(); ++i) {
      S d = abs_scalar(S(entries[i] - other.entries[i]));
      if (d > best) best = d;
    }
    return best;
  }
};

/// (1/2) I_K with entry box [-1, 1].
template <class S>
GameMatrix<S> half_identity(int k) {
  std::vector<S> e(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), S{0});
  for (int i = 0; i < k; ++i) {
    e[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) + static_cast<std::size_t>(i)] =
        S{1} / S{2};
  }
  return GameMatrix<S>::create(k, S{-1}, S{1}, std::move(e));
}

/// Validates that v is a mixed strategy of dimension k: entries >= 0 and sum
/// exactly 1 (rational mode) or within 1e-9 of 1 (float mode).
template <class S>
void require_distribution(const Vector<S>& v, int k) {
  if (static_cast<int>(v.size()) != k) {
    throw DistributionError("strategy has wrong dimension");
  }
  S sum{0};
  for (const S& x : v) {
    if (x < 0) throw DistributionError("strategy has a negative weight");
    sum += x;
  }
  if constexpr (ScalarOps<S>::exact) {
    if (sum != 1) throw DistributionError("strategy weights do not sum to 1");
  } else {
    if (abs_scalar(S(sum - S{1})) > S(1e-9)) {
      throw DistributionError("strategy weights do not sum to 1");
    }
  }
}

/// Lowest index attaining the minimum (0-based).
template <class S>
int argmin_index(const Vector<S>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[static_cast<std::size_t>(i)] < v[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

/// Lowest index attaining the maximum (0-based).
template <class S>
int argmax_index(const Vector<S>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

/// The joint suboptimality gap of a strategy pair, with the extremizing
/// indices (ties broken toward the lowest index) and both payoff vectors.
template <class S>
struct GapReport {
  S gap{0};
  int best_column = 0;       // argmax_j (M^T p)_j, 0-based
  int best_row = 0;          // argmin_i (M q)_i, 0-based
  Vector<S> col_payoffs;     // M^T p
  Vector<S> row_losses;      // M q

  const S& p_payoff_max() const { return col_payoffs[static_cast<std::size_t>(best_column)]; }
  const S& q_payoff_min() const { return row_losses[static_cast<std::size_t>(best_row)]; }
};

template <class S>
GapReport<S> gap(const GameMatrix<S>& m, const Vector<S>& p, const Vector<S>& q) {
  require_distribution(p, m.k);
  require_distribution(q, m.k);
  GapReport<S> out;
  out.col_payoffs = m.apply_transposed(p);
  out.row_losses = m.apply(q);
  out.best_column = argmax_index(out.col_payoffs);
  out.best_row = argmin_index(out.row_losses);
  out.gap = out.p_payoff_max() - out.q_payoff_min();
  return out;
}

/// gap <= 2 eps, the eps-equilibrium test. Requires eps >= 0.
template <class S>
bool is_eps_equilibrium(const GameMatrix<S>& m, const Vector<S>& p, const Vector<S>& q,
                        const S& eps) {
  if (eps < 0) throw std::invalid_argument("eps must be nonnegative");
  return gap(m, p, q).gap <= S{2} * eps;
}

/// Smallest strategy weight across both players.
template <class S>
S min_support(const Vector<S>& p, const Vector<S>& q) {
  if (p.empty() || q.empty()) throw DistributionError("empty strategy");
  S best = p[0];
  for (const S& x : p) {
    if (x < best) best = x;
  }
  for (const S& x : q) {
    if (x < best) best = x;
  }
  return best;
}

/// Support floor for equalizing strategies of near-isotropic games:
/// 1/K - 2 (alpha + eps) (K-1) / s.
template <class S>
S support_bound(const S& s, const S& alpha, const S& eps, int k) {
  if (s <= 0) throw std::invalid_argument("support_bound requires s > 0");
  return S{1} / S{k} - S{2} * (alpha + eps) * S{k - 1} / s;
}

}  // namespace gq
