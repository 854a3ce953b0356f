#pragma once

/// Equilibrium-finding strategies over the first-order oracle.
///
/// Every learner consumes a Session (never the hidden matrix), spends its
/// exact query budget, and finalizes with a recommendation:
///   - uniform:          0 queries, recommends (uniform, uniform).
///   - two_query:        2 queries, 1/2-approximation on [0,1]-range games.
///   - basis_recovery:   K queries (e_t, e_t), reconstructs the matrix and
///                       recommends its exact equilibrium.
///   - fictitious_play:  T queries, both players best-respond to cumulative
///                       observed losses (lowest-index ties).
///   - optimistic_mwu:   T queries, optimistic exponential weights in the
///                       log domain (float mode), recommends average plays.
/// gap_certificate turns any transcript into an upper bound on T times the
/// gap of the averaged plays, computable without the matrix.

#include "gamequery/oracle.hpp"
#include "gamequery/rng.hpp"
#include "gamequery/simplex.hpp"

#include <cmath>
#include <limits>

namespace gq {

/// Raised when a learner's budget or parameters are invalid.
struct LearnerConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LearnerKind { Uniform, TwoQuery, BasisRecovery, FictitiousPlay, OptimisticMWU };

struct LearnerConfig {
  LearnerKind kind = LearnerKind::Uniform;
  int horizon = 0;          // T; minimum depends on kind (0/2/K/T/T)
  double eta = 0.25;        // OptimisticMWU only; must be > 0
  std::uint64_t seed = 0;   // randomized components only
};

inline LearnerKind parse_learner_kind(const std::string& name) {
  if (name == "uniform") return LearnerKind::Uniform;
  if (name == "two_query") return LearnerKind::TwoQuery;
  if (name == "basis_recovery") return LearnerKind::BasisRecovery;
  if (name == "fictitious_play") return LearnerKind::FictitiousPlay;
  if (name == "optimistic_mwu") return LearnerKind::OptimisticMWU;
  throw LearnerConfigError("unknown learner kind: " + name);
}

inline const char* learner_kind_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Uniform: return "uniform";
    case LearnerKind::TwoQuery: return "two_query";
    case LearnerKind::BasisRecovery: return "basis_recovery";
    case LearnerKind::FictitiousPlay: return "fictitious_play";
    case LearnerKind::OptimisticMWU: return "optimistic_mwu";
  }
  return "unknown";
}

/// Zero queries; recommends the uniform pair. Gap is at most 2(1 - 1/K) on
/// [-1,1]-bounded games.
template <class S>
Recommendation<S> uniform_learner(Session<S>& session) {
  Vector<S> u = uniform_vector<S>(session.k());
  return session.finalize(u, u).recommendation.value();
}

/// Two queries: read row 1, pick the column player's best reply j*, read
/// column j*, pick the row player's best reply i*; recommend
/// ((e_1 + e_{i*})/2, e_{j*}).
template <class S>
Recommendation<S> two_query_learner(Session<S>& session) {
  const int k = session.k();
  Vector<S> u = uniform_vector<S>(k);
  Vector<S> e1 = basis_vector<S>(k, 1);

  // Query 1: p = e_1. Column payoffs are -loss_q = M^T e_1 (row 1 of M).
  QueryRecord<S> r1 = session.query(e1, u);
  Vector<S> row1 = scale(r1.loss_q, S{-1});
  int j_star = argmax_index(row1);

  // Query 2: q = e_{j*}. Row losses are loss_p = M e_{j*} (column j* of M).
  QueryRecord<S> r2 = session.query(u, basis_vector<S>(k, j_star + 1));
  int i_star = argmin_index(r2.loss_p);

  Vector<S> p = zero_vector<S>(k);
  p[0] += S{1} / S{2};
  p[static_cast<std::size_t>(i_star)] += S{1} / S{2};
  return session.finalize(p, basis_vector<S>(k, j_star + 1)).recommendation.value();
}

/// Reconstructs the matrix from basis queries (e_t, e_t), t = 1..budget.
/// With budget >= K the reconstruction is exact and the recommendation is
/// the exact equilibrium. A truncated budget < K (used by lower-bound
/// experiments) fills the unread rows/columns with zeros before solving.
inline Recommendation<Rational> basis_recovery_learner(Session<Rational>& session, int budget) {
  const int k = session.k();
  if (budget < 0) throw LearnerConfigError("budget must be nonnegative");
  const int reads = std::min(budget, k);

  std::vector<Rational> entries(static_cast<std::size_t>(k) * static_cast<std::size_t>(k),
                                Rational{0});
  Rational lo{0}, hi{0};
  for (int t = 1; t <= reads; ++t) {
    Vector<Rational> e = basis_vector<Rational>(k, t);
    QueryRecord<Rational> r = session.query(e, e);
    Vector<Rational> row = scale(r.loss_q, Rational{-1});  // M^T e_t = row t
    for (int j = 0; j < k; ++j) {
      entries[static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(k) +
              static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j)];
      if (row[static_cast<std::size_t>(j)] < lo) lo = row[static_cast<std::size_t>(j)];
      if (row[static_cast<std::size_t>(j)] > hi) hi = row[static_cast<std::size_t>(j)];
    }
  }
  GameMatrix<Rational> guess = GameMatrix<Rational>::create(k, lo, hi, std::move(entries));
  EquilibriumSolution sol = solve_exact(guess);
  return session.finalize(sol.p_star, sol.q_star).recommendation.value();
}

/// Full-budget variant: exactly K queries, exact reconstruction.
inline Recommendation<Rational> basis_recovery_learner(Session<Rational>& session) {
  return basis_recovery_learner(session, session.k());
}

/// T rounds of simultaneous fictitious play driven purely by observed
/// losses: each player best-responds (lowest index on ties) to the sum of
/// the loss vectors seen so far; the empty sum makes round 1 play (e_1, e_1).
/// Recommends the average plays.
template <class S>
Recommendation<S> fictitious_play_learner(Session<S>& session, int horizon) {
  if (horizon < 1) throw LearnerConfigError("fictitious play needs T >= 1");
  const int k = session.k();
  Vector<S> cum_loss_p = zero_vector<S>(k);  // sum of M q_s  -> row player minimizes
  Vector<S> cum_loss_q = zero_vector<S>(k);  // sum of -M^T p_s -> column player minimizes
  Vector<S> p_sum = zero_vector<S>(k);
  Vector<S> q_sum = zero_vector<S>(k);
  for (int t = 1; t <= horizon; ++t) {
    Vector<S> p = basis_vector<S>(k, argmin_index(cum_loss_p) + 1);
    Vector<S> q = basis_vector<S>(k, argmin_index(cum_loss_q) + 1);
    QueryRecord<S> r = session.query(p, q);
    for (int i = 0; i < k; ++i) {
      cum_loss_p[static_cast<std::size_t>(i)] += r.loss_p[static_cast<std::size_t>(i)];
      cum_loss_q[static_cast<std::size_t>(i)] += r.loss_q[static_cast<std::size_t>(i)];
      p_sum[static_cast<std::size_t>(i)] += p[static_cast<std::size_t>(i)];
      q_sum[static_cast<std::size_t>(i)] += q[static_cast<std::size_t>(i)];
    }
  }
  S inv = S{1} / static_cast<S>(horizon);
  return session.finalize(scale(p_sum, inv), scale(q_sum, inv)).recommendation.value();
}

/// T rounds of optimistic exponential weights for both players (float mode).
/// Weights at round t+1 are proportional to
///   exp(-eta * (cumulative loss + last loss)),
/// i.e. the last observed loss is counted twice as the optimistic predictor.
/// Log-domain computation; recommends the average plays.
inline Recommendation<double> optimistic_mwu_learner(Session<double>& session, int horizon,
                                                     double eta) {
  if (horizon < 1) throw LearnerConfigError("optimistic exponential weights needs T >= 1");
  if (!(eta > 0)) throw LearnerConfigError("eta must be positive");
  const int k = session.k();
  Vector<double> cum_p(static_cast<std::size_t>(k), 0.0), last_p(static_cast<std::size_t>(k), 0.0);
  Vector<double> cum_q(static_cast<std::size_t>(k), 0.0), last_q(static_cast<std::size_t>(k), 0.0);
  Vector<double> p_sum(static_cast<std::size_t>(k), 0.0), q_sum(static_cast<std::size_t>(k), 0.0);

  auto weights = [k, eta](const Vector<double>& cum, const Vector<double>& last) {
    Vector<double> g(static_cast<std::size_t>(k));
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      g[static_cast<std::size_t>(i)] =
          -eta * (cum[static_cast<std::size_t>(i)] + last[static_cast<std::size_t>(i)]);
      best = std::max(best, g[static_cast<std::size_t>(i)]);
    }
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      g[static_cast<std::size_t>(i)] = std::exp(g[static_cast<std::size_t>(i)] - best);
      total += g[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < k; ++i) g[static_cast<std::size_t>(i)] /= total;
    return g;
  };

  for (int t = 1; t <= horizon; ++t) {
    Vector<double> p = weights(cum_p, last_p);
    Vector<double> q = weights(cum_q, last_q);
    QueryRecord<double> r = session.query(p, q);
    for (int i = 0; i < k; ++i) {
      cum_p[static_cast<std::size_t>(i)] += r.loss_p[static_cast<std::size_t>(i)];
      cum_q[static_cast<std::size_t>(i)] += r.loss_q[static_cast<std::size_t>(i)];
      p_sum[static_cast<std::size_t>(i)] += p[static_cast<std::size_t>(i)];
      q_sum[static_cast<std::size_t>(i)] += q[static_cast<std::size_t>(i)];
    }
    last_p = r.loss_p;
    last_q = r.loss_q;
  }
  double inv = 1.0 / static_cast<double>(horizon);
  return session.finalize(scale(p_sum, inv), scale(q_sum, inv)).recommendation.value();
}

/// The online-to-batch certificate: the summed per-round regrets
///   sum_t [ <p_t, loss_p_t> - min_i loss_p_t(i) ]
/// + sum_t [ <q_t, loss_q_t> - min_j loss_q_t(j) ],
/// computed purely from the transcript. It upper-bounds T times the gap of
/// the averaged plays against the true matrix, and every bracketed term is
/// nonnegative.
template <class S>
S gap_certificate(const Transcript<S>& transcript) {
  if (transcript.rounds.empty()) {
    throw LearnerConfigError("certificate needs a nonempty transcript");
  }
  S total{0};
  for (const QueryRecord<S>& r : transcript.rounds) {
    total += dot(r.p, r.loss_p) - r.loss_p[static_cast<std::size_t>(argmin_index(r.loss_p))];
    total += dot(r.q, r.loss_q) - r.loss_q[static_cast<std::size_t>(argmin_index(r.loss_q))];
  }
  return total;
}

// ---------------------------------------------------------------------------
// Driver strategies for lower-bound experiments. These are query generators,
// not approximation algorithms; they exist to exercise adversaries.
// ---------------------------------------------------------------------------

/// T random exact queries from the seeded grid sampler; recommends the
/// average of the queried strategies (a deliberately naive recommendation).
inline Recommendation<Rational> random_query_driver(Session<Rational>& session, int horizon,
                                                    DeterministicRng& rng,
                                                    std::int64_t denominator = 64) {
  const int k = session.k();
  Vector<Rational> p_sum = zero_vector<Rational>(k);
  Vector<Rational> q_sum = zero_vector<Rational>(k);
  int used = 0;
  for (int t = 1; t <= horizon; ++t) {
    Vector<Rational> p = sample_simplex_rational(rng, k, denominator);
    Vector<Rational> q = sample_simplex_rational(rng, k, denominator);
    session.query(p, q);
    p_sum = add(p_sum, p);
    q_sum = add(q_sum, q);
    ++used;
  }
  if (used == 0) {
    Vector<Rational> u = uniform_vector<Rational>(k);
    return session.finalize(u, u).recommendation.value();
  }
  Rational inv{Rational{1} / Rational{used}};
  return session.finalize(scale(p_sum, inv), scale(q_sum, inv)).recommendation.value();
}

/// Optimistic exponential weights whose plays are rounded to an exact grid
/// with the given denominator before querying: runs the float update
/// internally, snaps each strategy to rationals, renormalizes exactly, and
/// submits the exact queries. Recommends the exact average plays.
inline Recommendation<Rational> rationalized_mwu_driver(Session<Rational>& session, int horizon,
                                                        double eta,
                                                        std::int64_t denominator = (1 << 20)) {
  if (horizon < 1) throw LearnerConfigError("rationalized weights driver needs T >= 1");
  if (!(eta > 0)) throw LearnerConfigError("eta must be positive");
  const int k = session.k();
  Vector<double> cum_p(static_cast<std::size_t>(k), 0.0), last_p(static_cast<std::size_t>(k), 0.0);
  Vector<double> cum_q(static_cast<std::size_t>(k), 0.0), last_q(static_cast<std::size_t>(k), 0.0);
  Vector<Rational> p_sum = zero_vector<Rational>(k);
  Vector<Rational> q_sum = zero_vector<Rational>(k);

  auto rationalize = [k, denominator](const Vector<double>& w) {
    Vector<Rational> out(static_cast<std::size_t>(k));
    Rational sum{0};
    for (int i = 0; i < k; ++i) {
      double scaled = w[static_cast<std::size_t>(i)] * static_cast<double>(denominator);
      auto n = static_cast<std::int64_t>(scaled >= 0 ? scaled + 0.5 : 0);
      out[static_cast<std::size_t>(i)] = Rational(n);
      sum += out[static_cast<std::size_t>(i)];
    }
    if (sum == 0) return uniform_vector<Rational>(k);
    for (auto& x : out) x /= sum;
    return out;
  };

  auto weights = [k, eta](const Vector<double>& cum, const Vector<double>& last) {
    Vector<double> g(static_cast<std::size_t>(k));
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      g[static_cast<std::size_t>(i)] =
          -eta * (cum[static_cast<std::size_t>(i)] + last[static_cast<std::size_t>(i)]);
      best = std::max(best, g[static_cast<std::size_t>(i)]);
    }
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      g[static_cast<std::size_t>(i)] = std::exp(g[static_cast<std::size_t>(i)] - best);
      total += g[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < k; ++i) g[static_cast<std::size_t>(i)] /= total;
    return g;
  };

  for (int t = 1; t <= horizon; ++t) {
    Vector<Rational> p = rationalize(weights(cum_p, last_p));
    Vector<Rational> q = rationalize(weights(cum_q, last_q));
    QueryRecord<Rational> r = session.query(p, q);
    for (int i = 0; i < k; ++i) {
      cum_p[static_cast<std::size_t>(i)] += to_double(r.loss_p[static_cast<std::size_t>(i)]);
      cum_q[static_cast<std::size_t>(i)] += to_double(r.loss_q[static_cast<std::size_t>(i)]);
      last_p[static_cast<std::size_t>(i)] = to_double(r.loss_p[static_cast<std::size_t>(i)]);
      last_q[static_cast<std::size_t>(i)] = to_double(r.loss_q[static_cast<std::size_t>(i)]);
    }
    p_sum = add(p_sum, p);
    q_sum = add(q_sum, q);
  }
  Rational inv{Rational{1} / Rational{horizon}};
  return session.finalize(scale(p_sum, inv), scale(q_sum, inv)).recommendation.value();
}

}  // namespace gq
