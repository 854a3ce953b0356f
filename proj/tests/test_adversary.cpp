#include "doctest.h"

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gamequery/adversary.hpp"
#include "gamequery/game.hpp"
#include "gamequery/learners.hpp"
#include "gamequery/numerics.hpp"
#include "gamequery/rng.hpp"
#include "gamequery/span.hpp"

using gq::AdversaryMode;
using gq::AdversaryState;
using gq::Rational;
using gq::Vector;

TEST_CASE("exact adversary: frozen first round at K = 4") {
  AdversaryState s = gq::new_exact_adversary(4);
  CHECK(s.ball_radius == Rational(1, 2));
  CHECK(s.inner_radius == Rational(1, 4));
  CHECK(s.margin == Rational(1, 2));

  Vector<Rational> e1 = gq::basis_vector<Rational>(4, 1);
  auto r = gq::exact_respond(s, e1, e1);

  // The rank-one step lands entirely in row 1: (1/2, -1/8, 1/8, 0).
  CHECK(s.m_current.row(0) ==
        Vector<Rational>{Rational(1, 2), Rational(-1, 8), Rational(1, 8), Rational(0)});
  for (int i = 1; i < 4; ++i) CHECK(s.m_current.row(i) == s.ball_center.row(i));

  CHECK(r.loss_p == Vector<Rational>{Rational(1, 2), Rational(0), Rational(0), Rational(0)});
  CHECK(r.loss_q ==
        Vector<Rational>{Rational(-1, 2), Rational(1, 8), Rational(-1, 8), Rational(0)});

  CHECK(s.margin == Rational(1, 4));
  CHECK(s.inner_radius == Rational(1, 8));
  CHECK(s.t == 1);

  REQUIRE(s.trace.size() == 1);
  CHECK(s.trace[0].t == 1);
  CHECK(s.trace[0].u_norm_sq == Rational(1, 32));
  CHECK(s.trace[0].margin_or_alpha == Rational(1, 4));
  CHECK(s.trace[0].dist_sq == Rational(28, 9));
  CHECK(s.trace[0].drift == Rational(1, 8));
}

TEST_CASE("exact adversary: query budgets") {
  // K = 4 affords exactly one round: 2 (t+1) <= K - 2.
  AdversaryState s4 = gq::new_exact_adversary(4);
  Vector<Rational> e1 = gq::basis_vector<Rational>(4, 1);
  gq::exact_respond(s4, e1, e1);
  CHECK_THROWS_WITH_AS(gq::exact_respond(s4, e1, e1), "query budget exceeded",
                       gq::AdversaryError);

  // K = 3 affords none.
  AdversaryState s3 = gq::new_exact_adversary(3);
  Vector<Rational> u3 = gq::uniform_vector<Rational>(3);
  CHECK_THROWS_WITH_AS(gq::exact_respond(s3, u3, u3), "query budget exceeded",
                       gq::AdversaryError);

  CHECK_THROWS_AS(gq::new_exact_adversary(2), gq::AdversaryError);
}

TEST_CASE("exact adversary: margin halves per step and drift stays summable") {
  AdversaryState s = gq::new_exact_adversary(8);
  Vector<Rational> e1 = gq::basis_vector<Rational>(8, 1);
  Vector<Rational> e2 = gq::basis_vector<Rational>(8, 2);

  gq::exact_respond(s, e1, e1);
  auto after_one = s.m_current;
  CHECK(s.margin == Rational(1, 4));
  CHECK(s.inner_radius == Rational(1, 8));

  gq::exact_respond(s, e2, e2);
  CHECK(s.margin == Rational(1, 8));
  CHECK(s.inner_radius == Rational(1, 16));
  // The second step's max-entry size is margin_2 / 2 = 1/16.
  CHECK(s.m_current.max_entry_distance(after_one) == Rational(1, 16));

  // Repeating a p already in the span leaves the matrix untouched.
  auto before = s.m_current;
  Rational inner_before = s.inner_radius;
  gq::exact_respond(s, e1, gq::basis_vector<Rational>(8, 3));
  CHECK(s.m_current.entries == before.entries);
  CHECK(s.inner_radius == inner_before);
  CHECK(s.margin == Rational(1, 8));
  REQUIRE(s.trace.size() == 3);
  CHECK(s.trace[2].u_norm_sq == Rational(0));
}

TEST_CASE("wrong-mode responses are rejected") {
  AdversaryState exact = gq::new_exact_adversary(6);
  AdversaryState approx = gq::new_approx_adversary(5, 1);
  Vector<Rational> u6 = gq::uniform_vector<Rational>(6);
  Vector<Rational> u5 = gq::uniform_vector<Rational>(5);
  CHECK_THROWS_AS(gq::approx_respond(exact, u6, u6), gq::AdversaryError);
  CHECK_THROWS_AS(gq::exact_respond(approx, u5, u5), gq::AdversaryError);
  // The dispatcher picks the right rule.
  CHECK_NOTHROW(gq::adversary_respond(exact, u6, u6));
  CHECK_NOTHROW(gq::adversary_respond(approx, u5, u5));
}

TEST_CASE("approximate adversary: frozen parameters at K = 8, T = 2") {
  AdversaryState s = gq::new_approx_adversary(8, 2);
  CHECK(s.ball_radius == Rational(1, 1024));           // 1/(16 K^2)
  CHECK(s.inner_radius == Rational(1, 2048));          // r/2
  CHECK(s.alpha == gq::pow2_rational(-27));            // (r/2)^2/(K T^2)
  CHECK(s.alpha_bar == gq::pow2_rational(-28));        // power of 1/4 below alpha
  CHECK(s.alpha_bar <= s.alpha);
  CHECK(s.alpha < Rational(4) * s.alpha_bar);

  CHECK_THROWS_AS(gq::new_approx_adversary(8, 3), gq::AdversaryError);
  CHECK_THROWS_AS(gq::new_approx_adversary(4, 1), gq::AdversaryError);
  CHECK_THROWS_AS(gq::new_approx_adversary(5, 0), gq::AdversaryError);
  CHECK_NOTHROW(gq::new_approx_adversary(5, 1));
}

TEST_CASE("approximate adversary: step size bracket on the first round") {
  AdversaryState s = gq::new_approx_adversary(8, 2);
  Vector<Rational> e1 = gq::basis_vector<Rational>(8, 1);
  gq::approx_respond(s, e1, e1);
  REQUIRE(s.trace.size() == 1);
  // ||u||^2 = rho ||M_0^T pbar||^2 with pbar = e1, so ||M_0^T pbar||^2 = 1/4
  // and rho in [alpha_bar, 4 alpha_bar).
  Rational mp_sq = Rational(1, 4);
  CHECK(s.trace[0].u_norm_sq >= s.alpha_bar * mp_sq);
  CHECK(s.trace[0].u_norm_sq < Rational(4) * s.alpha_bar * mp_sq);
}

TEST_CASE("approximate adversary: potential decay, drift cap, budget") {
  AdversaryState s = gq::new_approx_adversary(8, 2);
  gq::DeterministicRng rng(3);
  Rational prev_dist = gq::distance_potential(s, Rational(1));
  CHECK(prev_dist == Rational(8));  // dist^2(1, empty span) = K

  for (int t = 0; t < 2; ++t) {
    auto p = gq::sample_simplex_rational(rng, 8, 16);
    auto q = gq::sample_simplex_rational(rng, 8, 16);
    gq::approx_respond(s, p, q);
    const auto& row = s.trace.back();
    CHECK(Rational(2) * row.dist_sq >= s.alpha_bar * prev_dist);
    CHECK(Rational(2) * row.drift <= s.ball_radius);
    prev_dist = row.dist_sq;
  }
  // Terminal potential comfortably above the guaranteed floor
  // K (alpha_bar/2)^(T+1) = 8 * 2^(-87) = 2^(-84).
  CHECK(gq::distance_potential(s, Rational(1)) >= gq::pow2_rational(-84));

  Vector<Rational> u = gq::uniform_vector<Rational>(8);
  CHECK_THROWS_WITH_AS(gq::approx_respond(s, u, u), "query budget exceeded",
                       gq::AdversaryError);
}

TEST_CASE("distance potential scaling and domain") {
  AdversaryState s = gq::new_exact_adversary(5);
  CHECK(gq::distance_potential(s, Rational(1)) == Rational(5));
  CHECK(gq::distance_potential(s, Rational(0)) == Rational(0));
  CHECK(gq::distance_potential(s, Rational(2)) == Rational(20));  // v^2 K
  CHECK_THROWS_AS(gq::distance_potential(s, Rational(-1)), gq::AdversaryError);
}

TEST_CASE("witness search: exact adversary always produces a positive gap") {
  AdversaryState s = gq::new_exact_adversary(10);
  gq::DeterministicRng rng(17);
  for (int t = 0; t < 4; ++t) {
    auto p = gq::sample_simplex_rational(rng, 10, 32);
    auto q = gq::sample_simplex_rational(rng, 10, 32);
    gq::exact_respond(s, p, q);
  }
  auto p_rec = gq::sample_simplex_rational(rng, 10, 32);
  auto q_rec = gq::sample_simplex_rational(rng, 10, 32);
  auto report = gq::witness_search(s, p_rec, q_rec);
  CHECK(report.gap_value > Rational(0));
  CHECK(gq::replays_exactly(report.witness, s.history));
  // Witness stays inside the declared ball of radius 1/2 around (1/2) I.
  CHECK(report.witness.max_entry_distance(s.ball_center) <= s.ball_radius);
}

TEST_CASE("witness search: approximate adversary beats the theoretical floor") {
  gq::AdversarySession session(gq::new_approx_adversary(8, 2));
  auto rec = gq::two_query_learner(session);
  auto report = gq::witness_search(session.state(), rec.p, rec.q);
  CHECK(report.gap_value >= gq::pow2_rational(-65));
  CHECK(gq::replays_exactly(report.witness, session.state().history));
  CHECK(report.witness.max_entry_distance(session.state().ball_center) <=
        session.state().ball_radius);
}

TEST_CASE("witness search validates recommendations") {
  AdversaryState s = gq::new_exact_adversary(6);
  Vector<Rational> bad = {Rational(1)};
  Vector<Rational> u = gq::uniform_vector<Rational>(6);
  CHECK_THROWS_AS(gq::witness_search(s, bad, u), gq::DistributionError);
}

TEST_CASE("constraint rank analyzer: frozen counts") {
  using Query = std::pair<Vector<Rational>, Vector<Rational>>;

  // One uniform query on K = 2: ranks {rows, cols} overlap in one relation.
  Vector<Rational> u2 = gq::uniform_vector<Rational>(2);
  auto reports = gq::constraint_rank_analyzer({Query{u2, u2}}, 2);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].new_constraints == 3);
  CHECK(reports[0].nullspace_dim == 1);

  // Basis pair on K = 3: full row+column reads per round.
  Vector<Rational> e1 = gq::basis_vector<Rational>(3, 1);
  Vector<Rational> e2 = gq::basis_vector<Rational>(3, 2);
  auto basis_reports =
      gq::constraint_rank_analyzer({Query{e1, e1}, Query{e2, e2}}, 3);
  REQUIRE(basis_reports.size() == 2);
  CHECK(basis_reports[0].new_constraints == 5);
  CHECK(basis_reports[0].nullspace_dim == 4);
  CHECK(basis_reports[1].new_constraints == 3);
  CHECK(basis_reports[1].nullspace_dim == 1);

  CHECK_THROWS_AS(gq::constraint_rank_analyzer({}, 2), gq::AdversaryError);
}

TEST_CASE("constraint rank analyzer matches the tensor-space rank oracle") {
  // After t rounds the constraints span exactly
  //   span{p_1..p_t} (x) R^K  +  R^K (x) span{q_1..q_t},
  // whose dimension is aK + bK - ab for span dimensions a and b. One round
  // alone contributes at most 2K - 1 (its bilinear relation), and with spans
  // of size at most t the null space holds at least (K - t)^2 dimensions.
  using Query = std::pair<Vector<Rational>, Vector<Rational>>;
  gq::DeterministicRng rng(29);
  for (int trial = 0; trial < 8; ++trial) {
    const int k = static_cast<int>(rng.next_int(2, 6));
    std::vector<Query> queries;
    for (int t = 0; t < k; ++t) {
      queries.emplace_back(gq::sample_simplex_rational(rng, k, 8),
                           gq::sample_simplex_rational(rng, k, 8));
    }
    auto reports = gq::constraint_rank_analyzer(queries, k);
    REQUIRE(static_cast<int>(reports.size()) == k);

    gq::SpanBasis<Rational> p_span(k), q_span(k);
    int cumulative = 0;
    for (int t = 1; t <= k; ++t) {
      const auto& rep = reports[static_cast<std::size_t>(t - 1)];
      gq::extend_span(p_span, queries[static_cast<std::size_t>(t - 1)].first);
      gq::extend_span(q_span, queries[static_cast<std::size_t>(t - 1)].second);
      const int a = p_span.size();
      const int b = q_span.size();
      cumulative += rep.new_constraints;
      CHECK(cumulative == a * k + b * k - a * b);
      CHECK(rep.nullspace_dim == k * k - cumulative);
      CHECK(rep.new_constraints <= 2 * k - 1);
      CHECK(rep.nullspace_dim >= (k - t) * (k - t));
    }
  }
}

TEST_CASE("adversary trace serialization") {
  AdversaryState s = gq::new_exact_adversary(4);
  Vector<Rational> e1 = gq::basis_vector<Rational>(4, 1);
  gq::exact_respond(s, e1, e1);
  std::ostringstream os;
  gq::write_adversary_trace(os, s);
  const std::string text = os.str();
  CHECK(text.find("# trace k=4 mode=exact_adversary") == 0);
  CHECK(text.find("t,u_norm_sq,margin,dist_sq,drift") != std::string::npos);
  CHECK(text.find("1,1/32,1/4,28/9,1/8") != std::string::npos);
}

TEST_CASE("session adapter mirrors the adversary state") {
  gq::AdversarySession session(gq::new_exact_adversary(16));
  CHECK(session.k() == 16);
  CHECK(std::string(session.oracle_kind()) == "exact_adversary");
  auto rec = gq::two_query_learner(session);
  CHECK(session.rounds_used() == 2);
  const auto& hist = session.state().history.rounds;
  const auto& trans = session.transcript().rounds;
  REQUIRE(hist.size() == trans.size());
  for (std::size_t i = 0; i < hist.size(); ++i) {
    CHECK(hist[i].p == trans[i].p);
    CHECK(hist[i].q == trans[i].q);
    CHECK(hist[i].loss_p == trans[i].loss_p);
    CHECK(hist[i].loss_q == trans[i].loss_q);
  }
  auto report = gq::witness_search(session.state(), rec.p, rec.q);
  CHECK(report.gap_value > Rational(0));
}
