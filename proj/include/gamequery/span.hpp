#pragma once

/// Incremental span tracking and exact kernel computation.
///
/// SpanBasis holds a pairwise-orthogonal (unnormalized) basis maintained by
/// Gram-Schmidt with coefficients <v,e>/<e,e>, so rational mode never leaves
/// the rationals. Distances are reported squared for the same reason.

#include "gamequery/numerics.hpp"

namespace gq {

/// Raised when a full-rank constraint set admits no orthogonal complement.
struct NoComplementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A linear subspace of R^dim, represented by an orthogonal basis of the
/// vectors added so far. Basis vectors are kept unnormalized; their squared
/// norms are cached.
template <class S>
struct SpanBasis {
  int dim = 0;
  std::vector<Vector<S>> directions;
  std::vector<S> direction_norms_sq;

  SpanBasis() = default;
  explicit SpanBasis(int dimension) : dim(dimension) {}

  int size() const { return static_cast<int>(directions.size()); }
};

template <class S>
struct ProjectionSplit {
  Vector<S> projection;
  Vector<S> residual;
  S residual_norm_sq;
};

/// Splits v = projection + residual with projection in the span and residual
/// orthogonal to every basis direction (exactly, in rational mode).
template <class S>
ProjectionSplit<S> project_onto_span(const Vector<S>& v, const SpanBasis<S>& basis) {
  if (static_cast<int>(v.size()) != basis.dim) {
    throw DimensionMismatchError("vector/basis dimension mismatch");
  }
  Vector<S> residual = v;
  for (int i = 0; i < basis.size(); ++i) {
    const S& nsq = basis.direction_norms_sq[static_cast<std::size_t>(i)];
    if (ScalarOps<S>::is_zero(nsq)) continue;
    S coef = dot(residual, basis.directions[static_cast<std::size_t>(i)]) / nsq;
    axpy(residual, S(-coef), basis.directions[static_cast<std::size_t>(i)]);
  }
  ProjectionSplit<S> out;
  out.projection = sub(v, residual);
  out.residual = std::move(residual);
  out.residual_norm_sq = norm_sq(out.residual);
  return out;
}

/// Squared distance from v to the span.
template <class S>
S span_distance_sq(const Vector<S>& v, const SpanBasis<S>& basis) {
  return project_onto_span(v, basis).residual_norm_sq;
}

/// Adds v's residual direction to the basis when it is nonzero under the
/// mode's in-span rule (exact zero for rationals; relative 1e-9 for floats,
/// measured against ||v||). Returns true when the basis grew.
template <class S>
bool extend_span(SpanBasis<S>& basis, const Vector<S>& v) {
  ProjectionSplit<S> split = project_onto_span(v, basis);
  if (ScalarOps<S>::residual_in_span(split.residual_norm_sq, norm_sq(v))) {
    return false;
  }
  basis.directions.push_back(std::move(split.residual));
  basis.direction_norms_sq.push_back(std::move(split.residual_norm_sq));
  return true;
}

namespace detail {

/// Clears denominators so fraction-free elimination runs over integers.
inline void prescale_row(Vector<Rational>& row) {
  BigInt l{1};
  for (const Rational& x : row) {
    BigInt d = denominator(x);
    l = lcm(l, d);
  }
  if (l == 1) return;
  Rational f{l};
  for (Rational& x : row) x *= f;
}

inline void prescale_row(Vector<double>&) {}

template <class S>
inline bool pivot_usable(const S& x) {
  if constexpr (ScalarOps<S>::exact) {
    return x != 0;
  } else {
    return abs_scalar(x) > S(1e-12);
  }
}

}  // namespace detail

/// Deterministic kernel basis of the row span of `rows` inside R^dim:
/// fraction-free (Bareiss) forward elimination in row order, then one kernel
/// vector per free column, ordered by column index, each normalized so its
/// free coordinate equals 1.
template <class S>
std::vector<Vector<S>> kernel_basis(const std::vector<Vector<S>>& rows, int dim) {
  std::vector<Vector<S>> a;
  a.reserve(rows.size());
  for (const Vector<S>& r : rows) {
    if (static_cast<int>(r.size()) != dim) {
      throw DimensionMismatchError("constraint row has wrong dimension");
    }
    Vector<S> copy = r;
    detail::prescale_row(copy);
    a.push_back(std::move(copy));
  }
  const int m = static_cast<int>(a.size());

  std::vector<int> pivot_row_of;  // parallel arrays: pivot column -> row
  std::vector<int> pivot_col_of;
  S prev_pivot{1};
  int r = 0;
  for (int c = 0; c < dim && r < m; ++c) {
    int pr = -1;
    for (int i = r; i < m; ++i) {
      if (detail::pivot_usable(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])) {
        pr = i;
        break;
      }
    }
    if (pr < 0) continue;
    std::swap(a[static_cast<std::size_t>(r)], a[static_cast<std::size_t>(pr)]);
    const Vector<S>& prow = a[static_cast<std::size_t>(r)];
    S pivot = prow[static_cast<std::size_t>(c)];
    for (int i = r + 1; i < m; ++i) {
      Vector<S>& row = a[static_cast<std::size_t>(i)];
      S factor = row[static_cast<std::size_t>(c)];
      for (int j = c; j < dim; ++j) {
        S num = row[static_cast<std::size_t>(j)] * pivot -
                factor * prow[static_cast<std::size_t>(j)];
        row[static_cast<std::size_t>(j)] = num / prev_pivot;
      }
    }
    pivot_row_of.push_back(r);
    pivot_col_of.push_back(c);
    prev_pivot = pivot;
    ++r;
  }

  std::vector<bool> is_pivot_col(static_cast<std::size_t>(dim), false);
  for (int c : pivot_col_of) is_pivot_col[static_cast<std::size_t>(c)] = true;

  std::vector<Vector<S>> kernel;
  for (int f = 0; f < dim; ++f) {
    if (is_pivot_col[static_cast<std::size_t>(f)]) continue;
    Vector<S> x = zero_vector<S>(dim);
    x[static_cast<std::size_t>(f)] = S{1};
    for (int k = static_cast<int>(pivot_col_of.size()) - 1; k >= 0; --k) {
      int pc = pivot_col_of[static_cast<std::size_t>(k)];
      const Vector<S>& row = a[static_cast<std::size_t>(pivot_row_of[static_cast<std::size_t>(k)])];
      S acc{0};
      for (int j = pc + 1; j < dim; ++j) {
        acc += row[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
      }
      x[static_cast<std::size_t>(pc)] = -acc / row[static_cast<std::size_t>(pc)];
    }
    kernel.push_back(std::move(x));
  }
  return kernel;
}

/// Returns a nonzero vector orthogonal to every input (the kernel vector of
/// the lowest-index free column). Throws NoComplementError("no complement")
/// when the inputs span all of R^dim.
template <class S>
Vector<S> orthogonal_complement_vector(const std::vector<Vector<S>>& vectors, int dim) {
  std::vector<Vector<S>> kernel = kernel_basis(vectors, dim);
  if (kernel.empty()) throw NoComplementError("no complement");
  return kernel.front();
}

}  // namespace gq
