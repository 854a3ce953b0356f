#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "gamequery/game.hpp"
#include "gamequery/learners.hpp"
#include "gamequery/numerics.hpp"
#include "gamequery/oracle.hpp"
#include "gamequery/rng.hpp"
#include "gamequery/simplex.hpp"

using gq::GameMatrix;
using gq::Rational;
using gq::Vector;

namespace {

GameMatrix<Rational> pennies() {
  return GameMatrix<Rational>::create(
      2, Rational(-1), Rational(1),
      {Rational(1), Rational(-1), Rational(-1), Rational(1)});
}

}  // namespace

TEST_CASE("learner kind names parse and print") {
  CHECK(gq::parse_learner_kind("uniform") == gq::LearnerKind::Uniform);
  CHECK(gq::parse_learner_kind("two_query") == gq::LearnerKind::TwoQuery);
  CHECK(gq::parse_learner_kind("basis_recovery") == gq::LearnerKind::BasisRecovery);
  CHECK(gq::parse_learner_kind("fictitious_play") == gq::LearnerKind::FictitiousPlay);
  CHECK(gq::parse_learner_kind("optimistic_mwu") == gq::LearnerKind::OptimisticMWU);
  CHECK_THROWS_AS(gq::parse_learner_kind("nope"), gq::LearnerConfigError);
  for (auto kind :
       {gq::LearnerKind::Uniform, gq::LearnerKind::TwoQuery, gq::LearnerKind::BasisRecovery,
        gq::LearnerKind::FictitiousPlay, gq::LearnerKind::OptimisticMWU}) {
    CHECK(gq::parse_learner_kind(gq::learner_kind_name(kind)) == kind);
  }
}

TEST_CASE("uniform learner queries nothing and recommends the center") {
  auto session = gq::open_fixed_session(pennies());
  auto rec = gq::uniform_learner(*session);
  CHECK(session->rounds_used() == 0);
  CHECK(session->finalized());
  CHECK(rec.p == gq::uniform_vector<Rational>(2));
  CHECK(rec.q == gq::uniform_vector<Rational>(2));
}

TEST_CASE("two-query learner: frozen run on a 2x2 game") {
  // M = [[0, 1], [-1, 0]]. Row 1 peaks at column 2; column 2 bottoms at
  // row 2. Recommendation: p = (e_1 + e_2)/2, q = e_2, gap 1/2.
  auto m = GameMatrix<Rational>::create(
      2, Rational(-1), Rational(1),
      {Rational(0), Rational(1), Rational(-1), Rational(0)});
  auto session = gq::open_fixed_session(m);
  auto rec = gq::two_query_learner(*session);
  CHECK(session->rounds_used() == 2);
  CHECK(rec.p == Vector<Rational>{Rational(1, 2), Rational(1, 2)});
  CHECK(rec.q == Vector<Rational>{Rational(0), Rational(1)});
  CHECK(gq::gap(m, rec.p, rec.q).gap == Rational(1, 2));
}

TEST_CASE("two-query learner: gap at most 1 on [0,1] games") {
  gq::DeterministicRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = gq::sample_rational_matrix(rng, 4, Rational(0), Rational(1), 16);
    auto session = gq::open_fixed_session(m);
    auto rec = gq::two_query_learner(*session);
    CHECK(session->rounds_used() == 2);
    CHECK(gq::gap(m, rec.p, rec.q).gap <= Rational(1));
  }
}

TEST_CASE("basis recovery with full budget recovers the exact equilibrium") {
  gq::DeterministicRng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = gq::sample_rational_matrix(rng, 3, Rational(-1), Rational(1), 8);
    auto sol = gq::solve_exact(m);
    auto session = gq::open_fixed_session(m);
    auto rec = gq::basis_recovery_learner(*session);
    CHECK(session->rounds_used() == 3);
    CHECK(rec.p == sol.p_star);
    CHECK(rec.q == sol.q_star);
    CHECK(gq::gap(m, rec.p, rec.q).gap == Rational(0));
  }
}

TEST_CASE("basis recovery with a truncated budget zero-fills unread rows") {
  gq::DeterministicRng rng(22);
  auto m = gq::sample_rational_matrix(rng, 4, Rational(-1), Rational(1), 8);
  auto session = gq::open_fixed_session(m);
  auto rec = gq::basis_recovery_learner(*session, 2);
  CHECK(session->rounds_used() == 2);

  // Oracle: solve the matrix whose first two rows are real and the rest zero.
  std::vector<Rational> entries(16, Rational(0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) entries[static_cast<std::size_t>(i * 4 + j)] = m.at(i, j);
  auto guess = GameMatrix<Rational>::create(4, Rational(-1), Rational(1), std::move(entries));
  auto sol = gq::solve_exact(guess);
  CHECK(rec.p == sol.p_star);
  CHECK(rec.q == sol.q_star);
}

TEST_CASE("fictitious play opens at (e_1, e_1) and improves on pennies") {
  auto m = pennies();
  {
    auto session = gq::open_fixed_session(m);
    gq::fictitious_play_learner(*session, 1);
    const auto& r1 = session->transcript().rounds.at(0);
    CHECK(r1.p == gq::basis_vector<Rational>(2, 1));
    CHECK(r1.q == gq::basis_vector<Rational>(2, 1));
  }
  {
    auto session = gq::open_fixed_session(m);
    auto rec = gq::fictitious_play_learner(*session, 1000);
    CHECK(session->rounds_used() == 1000);
    CHECK(gq::gap(m, rec.p, rec.q).gap < Rational(3, 10));
  }
  {
    auto session = gq::open_fixed_session(m);
    CHECK_THROWS_AS(gq::fictitious_play_learner(*session, 0), gq::LearnerConfigError);
  }
}

TEST_CASE("online-to-batch certificate bounds T times the average-play gap") {
  auto m = pennies();
  auto session = gq::open_fixed_session(m);
  const int horizon = 100;
  auto rec = gq::fictitious_play_learner(*session, horizon);
  Rational cert = gq::gap_certificate(session->transcript());
  Rational g = gq::gap(m, rec.p, rec.q).gap;
  CHECK(cert >= Rational(0));
  CHECK(Rational(horizon) * g <= cert);
}

TEST_CASE("certificate of a single uniform round on pennies is zero") {
  auto session = gq::open_fixed_session(pennies());
  Vector<Rational> u = gq::uniform_vector<Rational>(2);
  session->query(u, u);
  session->finalize(u, u);
  CHECK(gq::gap_certificate(session->transcript()) == Rational(0));
  CHECK_THROWS_AS(gq::gap_certificate(gq::Transcript<Rational>{}), gq::LearnerConfigError);
}

TEST_CASE("optimistic weights: frozen second-round strategy") {
  // M = [[1,1],[0,0]] makes loss_p = (1,0) whatever q is. With eta = 1/4 and
  // the optimistic double-count of the last loss, round 2 weights are
  // proportional to (exp(-1/2), 1).
  auto m = GameMatrix<double>::create(2, 0.0, 1.0, {1.0, 1.0, 0.0, 0.0});
  auto session = gq::open_fixed_session(m);
  gq::optimistic_mwu_learner(*session, 2, 0.25);
  const auto& rounds = session->transcript().rounds;
  REQUIRE(rounds.size() == 2);
  CHECK(rounds[0].p[0] == doctest::Approx(0.5));
  CHECK(rounds[0].q[0] == doctest::Approx(0.5));
  const double w = std::exp(-0.5);
  CHECK(rounds[1].p[0] == doctest::Approx(w / (1.0 + w)));
  CHECK(rounds[1].p[1] == doctest::Approx(1.0 / (1.0 + w)));
}

TEST_CASE("optimistic weights satisfy the certificate bound within float slack") {
  auto m = GameMatrix<double>::create(
      2, -1.0, 1.0, {1.0, -1.0, -1.0, 1.0});
  auto session = gq::open_fixed_session(m);
  const int horizon = 200;
  auto rec = gq::optimistic_mwu_learner(*session, horizon, 0.25);
  double cert = gq::gap_certificate(session->transcript());
  double g = gq::gap(m, rec.p, rec.q).gap;
  CHECK(cert >= 0.0);
  CHECK(horizon * g <= cert + 1e-8);
  CHECK(g < 0.1);  // converges fast on pennies
}

TEST_CASE("optimistic weights reject bad configuration") {
  auto m = GameMatrix<double>::create(2, 0.0, 1.0, {1.0, 0.0, 0.0, 1.0});
  auto session = gq::open_fixed_session(m);
  CHECK_THROWS_AS(gq::optimistic_mwu_learner(*session, 0, 0.25), gq::LearnerConfigError);
  CHECK_THROWS_AS(gq::optimistic_mwu_learner(*session, 5, 0.0), gq::LearnerConfigError);
  CHECK_THROWS_AS(gq::optimistic_mwu_learner(*session, 5, -1.0), gq::LearnerConfigError);
}

TEST_CASE("random query driver is deterministic under a fixed seed") {
  gq::DeterministicRng rng_a(909);
  gq::DeterministicRng rng_b(909);
  auto m = gq::half_identity<Rational>(4);
  auto sa = gq::open_fixed_session(m);
  auto sb = gq::open_fixed_session(m);
  auto ra = gq::random_query_driver(*sa, 5, rng_a);
  auto rb = gq::random_query_driver(*sb, 5, rng_b);
  CHECK(ra.p == rb.p);
  CHECK(ra.q == rb.q);
  REQUIRE(sa->transcript().rounds.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(sa->transcript().rounds[i].p == sb->transcript().rounds[i].p);
    CHECK(sa->transcript().rounds[i].q == sb->transcript().rounds[i].q);
    CHECK(sa->transcript().rounds[i].loss_p == sb->transcript().rounds[i].loss_p);
  }
}

TEST_CASE("rationalized weights driver submits exact strategies and satisfies the certificate") {
  auto m = pennies();
  auto session = gq::open_fixed_session(m);
  const int horizon = 64;
  auto rec = gq::rationalized_mwu_driver(*session, horizon, 0.25);
  CHECK(session->rounds_used() == horizon);
  for (const auto& r : session->transcript().rounds) {
    Rational mass{0};
    for (const auto& x : r.p) {
      CHECK(x >= Rational(0));
      mass += x;
    }
    CHECK(mass == Rational(1));
  }
  Rational cert = gq::gap_certificate(session->transcript());
  Rational g = gq::gap(m, rec.p, rec.q).gap;
  CHECK(Rational(horizon) * g <= cert);
}
