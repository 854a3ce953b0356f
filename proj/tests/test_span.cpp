#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "gamequery/numerics.hpp"
#include "gamequery/rng.hpp"
#include "gamequery/span.hpp"

using gq::Rational;
using gq::SpanBasis;
using gq::Vector;

namespace {

// Independent oracle: squared distance from v to span{w1, w2} via the Gram
// determinant ratio det Gram(w1, w2, v) / det Gram(w1, w2).
Rational gram_det3(const std::array<std::array<Rational, 3>, 3>& g) {
  return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
         g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
         g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
}

Rational distance_sq_oracle_two(const Vector<Rational>& w1, const Vector<Rational>& w2,
                                const Vector<Rational>& v) {
  std::array<const Vector<Rational>*, 3> vs = {&w1, &w2, &v};
  std::array<std::array<Rational, 3>, 3> g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g[i][j] = gq::dot(*vs[i], *vs[j]);
  Rational det2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  REQUIRE(det2 != Rational(0));  // oracle needs independent spanning vectors
  return gram_det3(g) / det2;
}

}  // namespace

TEST_CASE("distance to the empty span is the squared norm") {
  SpanBasis<Rational> basis(4);
  Vector<Rational> ones(4, Rational(1));
  CHECK(gq::span_distance_sq(ones, basis) == Rational(4));
  CHECK(basis.size() == 0);
}

TEST_CASE("frozen one-direction distance: ones against a single loss direction") {
  // Direction (-1/2, 1/8, -1/8, 0): ||ones||^2 = 4, <ones,l> = -1/2,
  // ||l||^2 = 9/32, so dist^2 = 4 - (1/4)/(9/32) = 28/9.
  SpanBasis<Rational> basis(4);
  Vector<Rational> l = {Rational(-1, 2), Rational(1, 8), Rational(-1, 8), Rational(0)};
  CHECK(gq::extend_span(basis, l));
  CHECK(basis.size() == 1);
  Vector<Rational> ones(4, Rational(1));
  CHECK(gq::span_distance_sq(ones, basis) == Rational(28, 9));
}

TEST_CASE("projection split is exact: v = projection + residual") {
  SpanBasis<Rational> basis(3);
  gq::extend_span(basis, Vector<Rational>{Rational(1), Rational(1), Rational(0)});
  Vector<Rational> v = {Rational(2), Rational(0), Rational(5)};
  auto split = gq::project_onto_span(v, basis);
  CHECK(gq::add(split.projection, split.residual) == v);
  CHECK(split.residual_norm_sq == gq::norm_sq(split.residual));
  // Residual orthogonal to the basis direction, exactly.
  CHECK(gq::dot(split.residual, basis.directions[0]) == Rational(0));
  // Frozen values: projection = (1,1,0), residual = (1,-1,5).
  CHECK(split.projection == Vector<Rational>{Rational(1), Rational(1), Rational(0)});
  CHECK(split.residual == Vector<Rational>{Rational(1), Rational(-1), Rational(5)});
  CHECK(split.residual_norm_sq == Rational(27));
}

TEST_CASE("extend_span refuses dependent vectors") {
  SpanBasis<Rational> basis(3);
  Vector<Rational> w = {Rational(1), Rational(2), Rational(3)};
  CHECK(gq::extend_span(basis, w));
  CHECK_FALSE(gq::extend_span(basis, w));
  CHECK_FALSE(gq::extend_span(basis, gq::scale(w, Rational(-7, 3))));
  CHECK_FALSE(gq::extend_span(basis, gq::zero_vector<Rational>(3)));
  CHECK(basis.size() == 1);

  Vector<Rational> w2 = {Rational(0), Rational(1), Rational(0)};
  CHECK(gq::extend_span(basis, w2));
  CHECK(basis.size() == 2);
  // Any combination of the two originals is now absorbed.
  CHECK_FALSE(gq::extend_span(basis, gq::add(w, gq::scale(w2, Rational(5)))));
}

TEST_CASE("dimension mismatches are rejected by span operations") {
  SpanBasis<Rational> basis(3);
  Vector<Rational> bad = {Rational(1), Rational(2)};
  CHECK_THROWS_AS(gq::project_onto_span(bad, basis), gq::DimensionMismatchError);
  std::vector<Vector<Rational>> rows = {bad};
  CHECK_THROWS_AS(gq::kernel_basis(rows, 3), gq::DimensionMismatchError);
}

TEST_CASE("orthogonal complements: frozen low-dimensional cases") {
  // {e1, ones} in R^4 -> kernel vector of the lowest free column.
  std::vector<Vector<Rational>> rows1 = {
      gq::basis_vector<Rational>(4, 1), Vector<Rational>(4, Rational(1))};
  Vector<Rational> u1 = gq::orthogonal_complement_vector(rows1, 4);
  CHECK(u1 == Vector<Rational>{Rational(0), Rational(-1), Rational(1), Rational(0)});

  // {(1,1)} in R^2.
  std::vector<Vector<Rational>> rows2 = {Vector<Rational>{Rational(1), Rational(1)}};
  CHECK(gq::orthogonal_complement_vector(rows2, 2) ==
        Vector<Rational>{Rational(-1), Rational(1)});

  // No constraints at all: first standard basis vector.
  CHECK(gq::orthogonal_complement_vector(std::vector<Vector<Rational>>{}, 2) ==
        Vector<Rational>{Rational(1), Rational(0)});
}

TEST_CASE("orthogonal complement fails exactly when the inputs span everything") {
  std::vector<Vector<Rational>> rows = {
      Vector<Rational>{Rational(1), Rational(1)},
      Vector<Rational>{Rational(1), Rational(-1)}};
  CHECK_THROWS_AS(gq::orthogonal_complement_vector(rows, 2), gq::NoComplementError);
}

TEST_CASE("kernel basis vectors annihilate every input row") {
  gq::DeterministicRng rng(20260822);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = static_cast<int>(rng.next_int(2, 6));
    const int nrows = static_cast<int>(rng.next_int(1, dim + 1));
    std::vector<Vector<Rational>> rows;
    for (int i = 0; i < nrows; ++i) {
      Vector<Rational> r;
      for (int j = 0; j < dim; ++j) {
        r.push_back(gq::sample_rational(rng, Rational(-1), Rational(1), 8));
      }
      rows.push_back(std::move(r));
    }
    std::vector<Vector<Rational>> kernel = gq::kernel_basis(rows, dim);
    // Rank from an independent Gram–Schmidt pass.
    SpanBasis<Rational> basis(dim);
    for (const auto& r : rows) gq::extend_span(basis, r);
    CHECK(static_cast<int>(kernel.size()) == dim - basis.size());
    for (const auto& v : kernel) {
      CHECK_FALSE(gq::is_zero_vector(v));
      for (const auto& r : rows) CHECK(gq::dot(v, r) == Rational(0));
    }
  }
}

TEST_CASE("span distance agrees with the Gram determinant oracle") {
  gq::DeterministicRng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 5;
    Vector<Rational> w1, w2, v;
    for (int j = 0; j < dim; ++j) {
      w1.push_back(gq::sample_rational(rng, Rational(-1), Rational(1), 6));
      w2.push_back(gq::sample_rational(rng, Rational(-1), Rational(1), 6));
      v.push_back(gq::sample_rational(rng, Rational(-2), Rational(2), 6));
    }
    SpanBasis<Rational> basis(dim);
    bool g1 = gq::extend_span(basis, w1);
    bool g2 = gq::extend_span(basis, w2);
    if (!(g1 && g2)) continue;  // oracle below requires independence
    CHECK(gq::span_distance_sq(v, basis) == distance_sq_oracle_two(w1, w2, v));
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("float spans satisfy Pythagoras and near-orthogonality") {
  gq::DeterministicRng rng(99);
  SpanBasis<double> basis(8);
  for (int i = 0; i < 3; ++i) {
    Vector<double> w;
    for (int j = 0; j < 8; ++j) w.push_back(rng.next_unit() * 2.0 - 1.0);
    CHECK(gq::extend_span(basis, w));
  }
  Vector<double> v;
  for (int j = 0; j < 8; ++j) v.push_back(rng.next_unit() * 2.0 - 1.0);
  auto split = gq::project_onto_span(v, basis);
  const double lhs = gq::norm_sq(v);
  const double rhs = gq::norm_sq(split.projection) + split.residual_norm_sq;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  for (const auto& d : basis.directions) {
    CHECK(std::abs(gq::dot(split.residual, d)) < 1e-12);
  }
  // A vector already in the span is recognized as such.
  Vector<double> combo = gq::add(basis.directions[0], gq::scale(basis.directions[1], 0.5));
  CHECK_FALSE(gq::extend_span(basis, combo));
}
