#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gamequery/bounds.hpp"
#include "gamequery/numerics.hpp"

using gq::Rational;

TEST_CASE("exact accuracy floor: frozen power of two at K = 8, T = 2") {
  // prefactor 2^-44, per-step base 2^-28, squared floor 2^-128.
  CHECK(gq::lower_eps_sq_exact(8, 2) == gq::pow2_rational(-128));
  auto root = gq::lower_eps_exact(8, 2);
  REQUIRE(root.has_value());
  CHECK(*root == gq::pow2_rational(-64));
  CHECK(gq::lower_eps_value(8, 2) == doctest::Approx(std::ldexp(1.0, -64)));
}

TEST_CASE("accuracy floor squares are not always perfect squares") {
  // K = 5, T = 2 leaves an odd power of five under the square.
  CHECK_FALSE(gq::lower_eps_exact(5, 2).has_value());
  // The squared value is still exact and positive.
  CHECK(gq::lower_eps_sq_exact(5, 2) > Rational(0));
}

TEST_CASE("accuracy floor decreases strictly in T and in K") {
  for (int k : {2, 5, 8}) {
    for (int t = 1; t < 4; ++t) {
      CHECK(gq::lower_eps_sq_exact(k, t + 1) < gq::lower_eps_sq_exact(k, t));
    }
  }
  for (int t : {1, 2, 3}) {
    CHECK(gq::lower_eps_sq_exact(5, t) < gq::lower_eps_sq_exact(2, t));
    CHECK(gq::lower_eps_sq_exact(8, t) < gq::lower_eps_sq_exact(5, t));
  }
}

TEST_CASE("bound inversion: frozen evaluations") {
  // a = b = 1, eps = e^{-e}: y = e, z = e, result e / log e = e.
  CHECK(gq::invert_query_bound(1.0, 1.0, std::exp(-std::exp(1.0))) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  // a = 1, b = 4, eps = 1/e: y = 1, result 1 / log 4.
  CHECK(gq::invert_query_bound(1.0, 4.0, std::exp(-1.0)) ==
        doctest::Approx(1.0 / std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("bound inversion: guard conditions") {
  // y = log(a/eps) < 1.
  CHECK_THROWS_AS(gq::invert_query_bound(1.0, 8.0, 0.5), gq::GuardViolationError);
  // y = 1 but b y < e.
  CHECK_THROWS_AS(gq::invert_query_bound(1.0, 1.0, std::exp(-1.0)),
                  gq::GuardViolationError);
  // Domain errors are invalid_argument, not guard violations.
  CHECK_THROWS_AS(gq::invert_query_bound(0.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(gq::invert_query_bound(1.0, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(gq::invert_query_bound(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("bound inversion: compression property on a grid") {
  // With eps = a e^{-y}, the inversion returns y / log(b y) <= y whenever the
  // guards pass (log(b y) >= 1 there).
  for (double a : {1.0, 2.0, 4.0}) {
    for (double b : {1.0, 2.0, 4.0}) {
      for (int yi = 1; yi <= 10; ++yi) {
        const double y = static_cast<double>(yi);
        const double eps = a * std::exp(-y);
        if (b * y < std::exp(1.0)) {
          CHECK_THROWS_AS(gq::invert_query_bound(a, b, eps), gq::GuardViolationError);
          continue;
        }
        const double got = gq::invert_query_bound(a, b, eps);
        CHECK(got == doctest::Approx(y / std::log(b * y)).epsilon(1e-12));
        CHECK(got <= y + 1e-9);
      }
    }
  }
}

TEST_CASE("upper query bound: regimes") {
  // Trivial accuracy: 0 queries.
  CHECK(gq::upper_T_for(4, 0.8) == 0.0);
  CHECK(gq::upper_T_for(2, 0.6) == 0.0);
  // Middling accuracy: two queries suffice.
  CHECK(gq::upper_T_for(4, 0.6) == 2.0);
  // Small eps: c log K / eps capped at K.
  CHECK(gq::upper_T_for(16, 0.1) == 16.0);
  const double fine = gq::upper_T_for(1000, 0.45);
  CHECK(fine == doctest::Approx(8.0 * std::log(1000.0) / 0.45));
  // The cap c is configurable.
  CHECK(gq::upper_T_for(16, 0.4, 1.0) == doctest::Approx(std::log(16.0) / 0.4));
  CHECK_THROWS_AS(gq::upper_T_for(1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(gq::upper_T_for(4, 0.0), std::invalid_argument);
}

TEST_CASE("lower query bound: zero outside the guard, capped inside") {
  // Above the guard threshold a/e the bound is vacuous.
  CHECK(gq::lower_T_for(8, 0.1) == 0.0);
  // Absurdly small eps pins the cap K/2 - 1.
  CHECK(gq::lower_T_for(8, 1e-300) == doctest::Approx(3.0));
  CHECK(gq::lower_T_for(64, 1e-300) == doctest::Approx(31.0));
  // In between: positive, below the cap, and never above the upper bound.
  for (int k : {5, 8, 16, 32, 64}) {
    const double a = std::pow(2.0, -11.0) * std::pow(static_cast<double>(k), -4.0);
    for (double eps : {a / std::exp(1.0), a / 4.0 / std::exp(1.0), a / 1024.0}) {
      const double low = gq::lower_T_for(k, eps);
      const double up = gq::upper_T_for(k, eps);
      CHECK(low >= 0.0);
      CHECK(low <= static_cast<double>(k) / 2.0 - 1.0);
      CHECK(low <= up);
    }
  }
  CHECK_THROWS_AS(gq::lower_T_for(1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(gq::lower_T_for(8, -0.5), std::invalid_argument);
}

TEST_CASE("lower query bound: robust at the guard boundary for every K") {
  // eps == a/e sits exactly on the guard edge; float rounding of log(a/eps)
  // may land a hair under 1. The bound must come back 0 there, never throw.
  for (int k = 5; k <= 64; ++k) {
    const double a = std::pow(2.0, -11.0) * std::pow(static_cast<double>(k), -4.0);
    const double low = gq::lower_T_for(k, a / std::exp(1.0));
    CHECK(low == 0.0);
  }
}

TEST_CASE("exact-equilibrium query floor") {
  CHECK(gq::exact_lower_T(2) == 0);
  CHECK(gq::exact_lower_T(3) == 1);
  CHECK(gq::exact_lower_T(4) == 1);
  CHECK(gq::exact_lower_T(5) == 2);
  CHECK(gq::exact_lower_T(16) == 7);
  CHECK(gq::exact_lower_T(17) == 8);
  CHECK_THROWS_AS(gq::exact_lower_T(1), std::invalid_argument);
}

TEST_CASE("records assemble the right fields per parameterization") {
  auto by_eps = gq::theoretical_bounds(16, 0.1);
  CHECK(by_eps.k == 16);
  CHECK(by_eps.eps == 0.1);
  CHECK(by_eps.upper_T == 16.0);
  CHECK(by_eps.lower_T == 0.0);
  CHECK(by_eps.exact_lower_T == 7);
  CHECK(by_eps.T == 0);
  CHECK(std::isnan(by_eps.lower_eps));

  auto by_T = gq::horizon_bounds(8, 2);
  CHECK(by_T.k == 8);
  CHECK(by_T.T == 2);
  CHECK(by_T.lower_eps_sq == gq::pow2_rational(-128));
  REQUIRE(by_T.lower_eps_rational.has_value());
  CHECK(*by_T.lower_eps_rational == gq::pow2_rational(-64));
  CHECK(by_T.lower_eps == doctest::Approx(std::ldexp(1.0, -64)));
  CHECK(std::isnan(by_T.eps));
  CHECK(std::isnan(by_T.upper_T));

  CHECK_THROWS_AS(gq::horizon_bounds(8, 0), std::invalid_argument);
  CHECK_THROWS_AS(gq::horizon_bounds(1, 2), std::invalid_argument);
}
