#pragma once

/// Exact equilibrium oracle for zero-sum games via rational simplex.
///
/// The game value is found through the classic reduction: shift the matrix
/// entrywise so it is strictly positive, then solve
///     maximize 1^T x   subject to  M'^T x <= 1,  x >= 0
/// with the all-slack basis as the feasible start. Bland's rule (lowest
/// eligible index entering; lowest basic index among minimum-ratio rows
/// leaving) guarantees termination without cycling under exact arithmetic.
/// The optimal primal gives p* and the slack reduced costs give the dual q*;
/// the returned pair always satisfies the exact saddle certificate
/// max_j (M^T p*)_j = v = min_i (M q*)_i.

#include "gamequery/game.hpp"

namespace gq {

/// Raised when the exact solver's preconditions are violated.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EquilibriumSolution {
  Vector<Rational> p_star;
  Vector<Rational> q_star;
  Rational value;
};

namespace detail {

/// Dense simplex tableau for  max c^T x  s.t.  A x <= b, x >= 0  with b > 0.
/// Columns 0..n-1 are structural, n..n+m-1 are slacks.
class BlandTableau {
 public:
  BlandTableau(const std::vector<Vector<Rational>>& a, const Vector<Rational>& b,
               const Vector<Rational>& c)
      : m_(static_cast<int>(a.size())), n_(static_cast<int>(c.size())) {
    rows_.assign(static_cast<std::size_t>(m_),
                 Vector<Rational>(static_cast<std::size_t>(n_ + m_ + 1), Rational{0}));
    basis_.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) rows_[i][static_cast<std::size_t>(j)] = a[i][static_cast<std::size_t>(j)];
      rows_[i][static_cast<std::size_t>(n_ + i)] = 1;
      rows_[i].back() = b[static_cast<std::size_t>(i)];
      basis_[static_cast<std::size_t>(i)] = n_ + i;
    }
    // Objective row stores reduced costs c_j - z_j; optimality when all <= 0.
    obj_.assign(static_cast<std::size_t>(n_ + m_ + 1), Rational{0});
    for (int j = 0; j < n_; ++j) obj_[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)];
  }

  void solve() {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < n_ + m_; ++j) {
        if (obj_[static_cast<std::size_t>(j)] > 0) {
          enter = j;
          break;  // Bland: lowest index with positive reduced cost
        }
      }
      if (enter < 0) return;  // optimal
      int leave = -1;
      Rational best_ratio{0};
      for (int i = 0; i < m_; ++i) {
        const Rational& coef = rows_[i][static_cast<std::size_t>(enter)];
        if (coef <= 0) continue;
        Rational ratio = rows_[i].back() / coef;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[static_cast<std::size_t>(i)] <
                                        basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave < 0) {
        throw SolverError("unbounded program (malformed game reduction)");
      }
      pivot(leave, enter);
    }
  }

  /// Value of structural variable j at the current basis.
  Rational structural_value(int j) const {
    for (int i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] == j) return rows_[i].back();
    }
    return Rational{0};
  }

  /// Dual multiplier of constraint i (negated reduced cost of its slack).
  Rational dual_value(int i) const { return -obj_[static_cast<std::size_t>(n_ + i)]; }

 private:
  void pivot(int leave, int enter) {
    Vector<Rational>& prow = rows_[static_cast<std::size_t>(leave)];
    Rational pivot_coef = prow[static_cast<std::size_t>(enter)];
    for (Rational& x : prow) x /= pivot_coef;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      eliminate(rows_[static_cast<std::size_t>(i)], prow, enter);
    }
    eliminate(obj_, prow, enter);
    basis_[static_cast<std::size_t>(leave)] = enter;
  }

  static void eliminate(Vector<Rational>& row, const Vector<Rational>& prow, int enter) {
    Rational factor = row[static_cast<std::size_t>(enter)];
    if (factor == 0) return;
    for (std::size_t j = 0; j < row.size(); ++j) row[j] -= factor * prow[j];
  }

  int m_, n_;
  std::vector<Vector<Rational>> rows_;
  Vector<Rational> obj_;
  std::vector<int> basis_;
};

}  // namespace detail

/// Exact Nash equilibrium of a zero-sum game, K <= 64. Rational mode only.
inline EquilibriumSolution solve_exact(const GameMatrix<Rational>& m) {
  if (m.k > 64) throw SolverError("exact solver supports dimensions up to 64");
  const int k = m.k;

  // Shift entries to be strictly positive: M' = M + sigma * ones.
  Rational min_entry = m.entries[0];
  for (const Rational& x : m.entries) {
    if (x < min_entry) min_entry = x;
  }
  Rational sigma = Rational{1} - min_entry;

  // Constraints (M'^T x)_j <= 1 for each column j; objective sum x_i.
  std::vector<Vector<Rational>> a(static_cast<std::size_t>(k),
                                  Vector<Rational>(static_cast<std::size_t>(k)));
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) {
      a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = m.at(i, j) + sigma;
    }
  }
  Vector<Rational> b(static_cast<std::size_t>(k), Rational{1});
  Vector<Rational> c(static_cast<std::size_t>(k), Rational{1});

  detail::BlandTableau tableau(a, b, c);
  tableau.solve();

  Rational total{0};
  Vector<Rational> x(static_cast<std::size_t>(k));
  Vector<Rational> y(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    x[static_cast<std::size_t>(i)] = tableau.structural_value(i);
    total += x[static_cast<std::size_t>(i)];
  }
  if (total <= 0) throw SolverError("degenerate optimum in game reduction");

  EquilibriumSolution sol;
  sol.value = Rational{1} / total - sigma;
  sol.p_star = scale(x, Rational(Rational{1} / total));
  Rational dual_total{0};
  for (int j = 0; j < k; ++j) {
    y[static_cast<std::size_t>(j)] = tableau.dual_value(j);
    dual_total += y[static_cast<std::size_t>(j)];
  }
  if (dual_total <= 0) throw SolverError("degenerate dual in game reduction");
  sol.q_star = scale(y, Rational(Rational{1} / dual_total));

  // Exact saddle certificate; failure here would be an internal bug.
  GapReport<Rational> report = gap(m, sol.p_star, sol.q_star);
  if (report.gap != 0 || report.p_payoff_max() != sol.value ||
      report.q_payoff_min() != sol.value) {
    throw SolverError("saddle certificate failed (internal error)");
  }
  return sol;
}

}  // namespace gq
