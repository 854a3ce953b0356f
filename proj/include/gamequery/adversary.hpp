#pragma once

/// Adaptive lower-bound adversaries.
///
/// Both adversaries answer queries from a drifting matrix sequence
/// M_0, M_1, ... with M_0 = (1/2) I_K, where each update is the rank-one step
///     M_{t+1} = M_t + (pbar / ||pbar||^2) u_t^T,
/// pbar being the new query direction (the residual of p_{t+1} against the
/// span of past queries) and u_t a vector orthogonal to every past q, every
/// past column-player loss, the all-ones vector, and M_t^T p_{t+1}. This
/// shape makes the new matrix reproduce every recorded loss exactly
/// (adaptedness) while pushing the all-ones direction strictly away from the
/// span of the column-player losses — the certificate that no common
/// (approximate) equilibrium has been pinned down yet.
///
/// The two modes differ only in how far each step moves:
///   - ExactCase: the step's max entry is set from a geometrically halving
///     interior margin (margin_{t+1} = margin_t / 2, step max entry
///     margin_{t+1}/2), keeping every iterate strictly inside (-1,1) forever.
///   - ApproxCase: the step obeys ||u_t||^2 = rho_t ||M_t^T pbar||^2 with
///     rho_t an exact power of four in [alpha_bar, 4 alpha_bar), which keeps
///     the iterates within r/2 of the center and shrinks the span potential
///     by at most the factor alpha_bar/2 per round. alpha_bar is the largest
///     power of 1/4 below alpha = (r/2)^2/(K T^2), so every scale stays
///     rational while the guarantees survive up to a tracked factor <= 4.
///
/// After the run, witness_search turns the construction into a concrete
/// counterexample: it perturbs M_T along transcript-preserving rank-one directions —
/// still replaying the whole transcript — and returns the perturbation that
/// maximizes the recommendation's gap.

#include "gamequery/oracle.hpp"
#include "gamequery/span.hpp"

namespace gq {

/// Raised on invalid adversary parameters or protocol misuse.
struct AdversaryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AdversaryMode { ExactCase, ApproxCase };

/// One exported trace row per answered query.
struct AdversaryTraceRow {
  int t = 0;
  Rational u_norm_sq;        // ||u_t||^2 (0 on in-span rounds)
  Rational margin_or_alpha;  // current margin (ExactCase) or alpha_bar
  Rational dist_sq;          // dist^2(1, span of column losses) after the round
  Rational drift;            // ||M_t - M_0||_{1,inf}
};

struct AdversaryState {
  int k = 0;
  AdversaryMode mode = AdversaryMode::ExactCase;
  int horizon = 0;  // ApproxCase query budget T; ExactCase derives its budget from k
  int t = 0;        // rounds answered
  GameMatrix<Rational> m_current;
  GameMatrix<Rational> ball_center;
  Rational ball_radius;   // r: max-entry radius of the declared ball
  Rational inner_radius;  // certified perturbation radius around M_t
  SpanBasis<Rational> p_span;                     // span of queried p's
  std::vector<Vector<Rational>> q_constraints;    // queried q's, in order
  SpanBasis<Rational> lossq_span;                 // span of column-player losses
  Transcript<Rational> history;
  Rational margin;     // ExactCase interior margin
  Rational alpha;      // ApproxCase step parameter (r/2)^2/(K T^2)
  Rational alpha_bar;  // ApproxCase power-of-1/4 surrogate, alpha/4 < alpha_bar <= alpha
  std::vector<AdversaryTraceRow> trace;
};

struct WitnessReport {
  GameMatrix<Rational> witness;
  Rational gap_value;
  // RowSide: witness = M_T +/- c pbar u^T; ColumnSide: M_T +/- c u qbar^T.
  // When no perturbation direction exists or none improves on M_T itself,
  // the report carries M_T with scale 0 (direction_kind RowSide by
  // convention).
  enum class Side { RowSide, ColumnSide } direction_kind = Side::RowSide;
  Rational scale;  // applied max-entry norm of the perturbation; 0 for M_T
};

namespace detail {

inline Vector<Rational> ones_vector(int k) {
  return Vector<Rational>(static_cast<std::size_t>(k), Rational{1});
}

/// Smallest power of four >= x (x > 0), returned as (power, exponent).
inline Rational ceil_power_of_four(const Rational& x, long* exponent_out = nullptr) {
  Rational val{1};
  long z = 0;
  while (val < x) {
    val *= 4;
    ++z;
  }
  while (val / 4 >= x) {
    val /= 4;
    --z;
  }
  if (exponent_out) *exponent_out = z;
  return val;
}

/// Shared update step. Returns the realized ||u||^2 (zero when the matrix
/// was left unchanged).
inline Rational apply_rank_one_step(AdversaryState& state, const Vector<Rational>& p,
                                    const ProjectionSplit<Rational>& split) {
  const int k = state.k;
  const Vector<Rational>& pbar = split.residual;
  const Rational& pbar_sq = split.residual_norm_sq;

  // Constraint list: q_{1:t}, column losses so far (their orthogonal span
  // directions generate the same space), the all-ones vector, M_t^T p.
  std::vector<Vector<Rational>> constraints = state.q_constraints;
  for (const auto& dir : state.lossq_span.directions) constraints.push_back(dir);
  constraints.push_back(ones_vector(k));
  constraints.push_back(state.m_current.apply_transposed(p));
  if (static_cast<int>(constraints.size()) >= k) {
    throw AdversaryError("constraint count leaves no complement (dimension too small)");
  }
  Vector<Rational> u = orthogonal_complement_vector(constraints, k);

  Rational target_inf;  // desired max entry of u
  if (state.mode == AdversaryMode::ExactCase) {
    state.margin /= 2;
    target_inf = state.margin * pbar_sq / (Rational{2} * inf_norm(pbar));
    Rational u_inf = inf_norm(u);
    u = scale(u, Rational(target_inf / u_inf));
  } else {
    Vector<Rational> mp = state.m_current.apply_transposed(pbar);
    Rational mp_sq = norm_sq(mp);
    if (mp_sq == 0) return Rational{0};  // no usable direction; leave M_t unchanged
    // ||u||^2 = rho ||M_t^T pbar||^2 with rho = c^2 ||u_raw||^2 / ||M_t^T pbar||^2
    // in [alpha_bar, 4 alpha_bar): pick c as the power of two whose square is
    // the smallest power of four >= alpha_bar * mp_sq / ||u_raw||^2.
    Rational u_sq = norm_sq(u);
    long z = 0;
    ceil_power_of_four(Rational(state.alpha_bar * mp_sq / u_sq), &z);
    // c = 2^z; exponent can be negative.
    Rational c = pow2_rational(z);
    u = scale(u, c);
  }

  // M_{t+1} = M_t + (pbar/||pbar||^2) u^T.
  std::vector<Rational> entries = state.m_current.entries;
  for (int i = 0; i < k; ++i) {
    const Rational& pi = pbar[static_cast<std::size_t>(i)];
    if (pi == 0) continue;
    Rational f = pi / pbar_sq;
    for (int j = 0; j < k; ++j) {
      entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
              static_cast<std::size_t>(j)] += f * u[static_cast<std::size_t>(j)];
    }
  }
  state.m_current = GameMatrix<Rational>::create(k, state.m_current.lo, state.m_current.hi,
                                                 std::move(entries));
  if (state.mode == AdversaryMode::ExactCase) {
    // Step max-entry norm is margin_{t+1}/2 by construction; shrink the
    // certified perturbation radius by exactly that amount.
    state.inner_radius -= state.margin / 2;
  }
  return norm_sq(u);
}

/// Invariant checks after every answered round; failures are internal bugs,
/// never data-dependent.
inline void check_round_invariants(const AdversaryState& state, const Rational& dist_before,
                                   const Rational& dist_after) {
  if (!replays_exactly(state.m_current, state.history)) {
    throw AdversaryError("internal error: adaptedness replay failed");
  }
  if (state.mode == AdversaryMode::ExactCase) {
    for (const Rational& x : state.m_current.entries) {
      if (!(x > -1 && x < 1)) {
        throw AdversaryError("internal error: matrix left the open entry box");
      }
    }
    if (dist_after == 0) {
      throw AdversaryError("internal error: all-ones vector entered the loss span");
    }
  } else {
    if (dist_after * 2 < dist_before * state.alpha_bar) {
      throw AdversaryError("internal error: span potential decayed beyond alpha_bar/2");
    }
    if (state.m_current.max_entry_distance(state.ball_center) * 2 > state.ball_radius) {
      throw AdversaryError("internal error: drift exceeded half the ball radius");
    }
  }
}

inline QueryRecord<Rational> respond(AdversaryState& state, const Vector<Rational>& p,
                                     const Vector<Rational>& q) {
  require_distribution(p, state.k);
  require_distribution(q, state.k);

  ProjectionSplit<Rational> split = project_onto_span(p, state.p_span);
  Rational dist_before = span_distance_sq(detail::ones_vector(state.k), state.lossq_span);
  Rational u_norm_sq{0};
  if (split.residual_norm_sq != 0) {
    u_norm_sq = apply_rank_one_step(state, p, split);
  }

  QueryRecord<Rational> record;
  record.t = state.t + 1;
  record.p = p;
  record.q = q;
  record.loss_p = state.m_current.apply(q);
  record.loss_q = scale(state.m_current.apply_transposed(p), Rational{-1});

  extend_span(state.p_span, p);
  state.q_constraints.push_back(q);
  extend_span(state.lossq_span, record.loss_q);
  state.history.rounds.push_back(record);
  state.t += 1;

  Rational dist_after = span_distance_sq(detail::ones_vector(state.k), state.lossq_span);
  check_round_invariants(state, dist_before, dist_after);

  AdversaryTraceRow row;
  row.t = state.t;
  row.u_norm_sq = u_norm_sq;
  row.margin_or_alpha = state.mode == AdversaryMode::ExactCase ? state.margin : state.alpha_bar;
  row.dist_sq = dist_after;
  row.drift = state.m_current.max_entry_distance(state.ball_center);
  state.trace.push_back(row);
  return record;
}

}  // namespace detail

/// ExactCase adversary: M_0 = (1/2) I_K, interior margin 1/2. Needs K >= 3
/// so the first round's 2t+2 = 2 constraints leave a complement.
inline AdversaryState new_exact_adversary(int k) {
  if (k < 3) throw AdversaryError("exact adversary needs K >= 3");
  AdversaryState s;
  s.k = k;
  s.mode = AdversaryMode::ExactCase;
  s.m_current = half_identity<Rational>(k);
  s.ball_center = s.m_current;
  s.ball_radius = Rational{1} / Rational{2};
  s.inner_radius = s.ball_radius / 2;
  s.p_span = SpanBasis<Rational>(k);
  s.lossq_span = SpanBasis<Rational>(k);
  s.history.k = k;
  s.history.oracle_kind = "exact_adversary";
  s.margin = Rational{1} / Rational{2};
  return s;
}

/// ApproxCase adversary for horizon T: ball radius r = 1/(16 K^2) around
/// (1/2) I_K, step parameter alpha = (r/2)^2/(K T^2) with its power-of-1/4
/// surrogate alpha_bar. Needs K >= 5 and T <= (K-3)/2.
inline AdversaryState new_approx_adversary(int k, int horizon) {
  if (k < 5) throw AdversaryError("approximate adversary needs K >= 5");
  if (horizon < 1) throw AdversaryError("approximate adversary needs T >= 1");
  if (2 * horizon > k - 3) {
    throw AdversaryError("horizon exceeds (K-3)/2");
  }
  AdversaryState s;
  s.k = k;
  s.mode = AdversaryMode::ApproxCase;
  s.horizon = horizon;
  s.m_current = half_identity<Rational>(k);
  s.ball_center = s.m_current;
  s.ball_radius = Rational{1} / Rational(16 * static_cast<long>(k) * k);
  s.inner_radius = s.ball_radius / 2;
  s.p_span = SpanBasis<Rational>(k);
  s.lossq_span = SpanBasis<Rational>(k);
  s.history.k = k;
  s.history.oracle_kind = "approx_adversary";
  s.margin = Rational{0};
  Rational half_r = s.ball_radius / 2;
  s.alpha = half_r * half_r / (Rational(k) * Rational(horizon) * Rational(horizon));
  // alpha_bar = 4^{-z} with z = ceil(log_4(1/alpha)); alpha/4 < alpha_bar <= alpha.
  s.alpha_bar = Rational{1} / detail::ceil_power_of_four(Rational(Rational{1} / s.alpha));
  return s;
}

/// Answers one ExactCase query. Budget: t+1 <= K/2 - 1.
inline QueryRecord<Rational> exact_respond(AdversaryState& state, const Vector<Rational>& p,
                                           const Vector<Rational>& q) {
  if (state.mode != AdversaryMode::ExactCase) {
    throw AdversaryError("state is not an ExactCase adversary");
  }
  if (2 * (state.t + 1) > state.k - 2) {
    throw AdversaryError("query budget exceeded");
  }
  return detail::respond(state, p, q);
}

/// Answers one ApproxCase query. Budget: t+1 <= T.
inline QueryRecord<Rational> approx_respond(AdversaryState& state, const Vector<Rational>& p,
                                            const Vector<Rational>& q) {
  if (state.mode != AdversaryMode::ApproxCase) {
    throw AdversaryError("state is not an ApproxCase adversary");
  }
  if (state.t + 1 > state.horizon) {
    throw AdversaryError("query budget exceeded");
  }
  return detail::respond(state, p, q);
}

/// Dispatches on the state's mode.
inline QueryRecord<Rational> adversary_respond(AdversaryState& state, const Vector<Rational>& p,
                                               const Vector<Rational>& q) {
  return state.mode == AdversaryMode::ExactCase ? exact_respond(state, p, q)
                                                : approx_respond(state, p, q);
}

/// dist^2(v * 1, span of column losses); equals v^2 dist^2(1, span).
inline Rational distance_potential(const AdversaryState& state, const Rational& v) {
  if (v < 0) throw AdversaryError("potential scale must be nonnegative");
  Vector<Rational> target(static_cast<std::size_t>(state.k), v);
  return span_distance_sq(target, state.lossq_span);
}

/// Enumerates the transcript-preserving rank-one perturbations of M_T — row side
/// M_T ± c pbar u^T with u orthogonal to all queried q's, column side
/// M_T ± c u qbar^T with u orthogonal to all queried p's, each scaled to
/// max-entry norm inner_radius — checks each candidate replays the recorded
/// transcript exactly, and returns the candidate maximizing the
/// recommendation's gap. M_T itself is always a candidate (scale 0).
inline WitnessReport witness_search(const AdversaryState& state, const Vector<Rational>& p_rec,
                                    const Vector<Rational>& q_rec) {
  require_distribution(p_rec, state.k);
  require_distribution(q_rec, state.k);
  const int k = state.k;

  WitnessReport best;
  best.witness = state.m_current;
  best.gap_value = gap(state.m_current, p_rec, q_rec).gap;
  best.direction_kind = WitnessReport::Side::RowSide;
  best.scale = Rational{0};

  auto consider = [&](GameMatrix<Rational> candidate, WitnessReport::Side side,
                      const Rational& applied_scale) {
    if (!replays_exactly(candidate, state.history)) {
      throw AdversaryError("internal error: witness candidate failed transcript replay");
    }
    Rational g = gap(candidate, p_rec, q_rec).gap;
    if (g > best.gap_value) {
      best.witness = std::move(candidate);
      best.gap_value = std::move(g);
      best.direction_kind = side;
      best.scale = applied_scale;
    }
  };

  auto perturbed = [&](const Vector<Rational>& left, const Vector<Rational>& right,
                       bool negate) {
    // candidate = M_T + sign * left right^T, pre-scaled by the caller.
    std::vector<Rational> entries = state.m_current.entries;
    for (int i = 0; i < k; ++i) {
      const Rational& li = left[static_cast<std::size_t>(i)];
      if (li == 0) continue;
      for (int j = 0; j < k; ++j) {
        Rational delta = li * right[static_cast<std::size_t>(j)];
        if (negate) delta = -delta;
        entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                static_cast<std::size_t>(j)] += delta;
      }
    }
    return GameMatrix<Rational>::create(k, state.m_current.lo, state.m_current.hi,
                                        std::move(entries));
  };

  // Row side: perturb along the unseen part of the recommended p.
  ProjectionSplit<Rational> p_split = project_onto_span(p_rec, state.p_span);
  if (p_split.residual_norm_sq != 0) {
    Rational pbar_inf = inf_norm(p_split.residual);
    for (const Vector<Rational>& u : kernel_basis(state.q_constraints, k)) {
      Rational u_inf = inf_norm(u);
      Rational c = state.inner_radius / (pbar_inf * u_inf);
      Vector<Rational> right = scale(u, c);
      for (bool negate : {false, true}) {
        consider(perturbed(p_split.residual, right, negate), WitnessReport::Side::RowSide,
                 state.inner_radius);
      }
    }
  }

  // Column side: perturb along the unseen part of the recommended q.
  SpanBasis<Rational> q_span(k);
  for (const auto& qv : state.q_constraints) extend_span(q_span, qv);
  ProjectionSplit<Rational> q_split = project_onto_span(q_rec, q_span);
  if (q_split.residual_norm_sq != 0) {
    Rational qbar_inf = inf_norm(q_split.residual);
    std::vector<Vector<Rational>> past_ps = state.p_span.directions;
    for (const Vector<Rational>& u : kernel_basis(past_ps, k)) {
      Rational u_inf = inf_norm(u);
      Rational c = state.inner_radius / (qbar_inf * u_inf);
      Vector<Rational> left = scale(u, c);
      for (bool negate : {false, true}) {
        consider(perturbed(left, q_split.residual, negate), WitnessReport::Side::ColumnSide,
                 state.inner_radius);
      }
    }
  }

  // Certify the winner stays inside the declared ball.
  if (best.witness.max_entry_distance(state.ball_center) > state.ball_radius) {
    throw AdversaryError("internal error: witness left the declared ball");
  }
  return best;
}

/// Per-round report of the linear system a learner's queries impose on the
/// hidden matrix.
struct RankReport {
  int new_constraints = 0;
  int nullspace_dim = 0;
};

/// Builds the K^2-dimensional constraint system of the first-order
/// observations round by round — per round, K row-read constraints and K
/// column-read constraints — and reports the exact rank growth and
/// null-space dimension after each round.
inline std::vector<RankReport> constraint_rank_analyzer(
    const std::vector<std::pair<Vector<Rational>, Vector<Rational>>>& queries, int k) {
  if (queries.empty()) throw AdversaryError("analyzer needs at least one query");
  const int dim = k * k;
  // Echelon basis: reduced rows with recorded pivot columns.
  std::vector<Vector<Rational>> rows;
  std::vector<int> pivots;

  auto reduce_and_insert = [&](Vector<Rational> v) -> bool {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Rational& coef = v[static_cast<std::size_t>(pivots[r])];
      if (coef != 0) {
        Rational f = coef / rows[r][static_cast<std::size_t>(pivots[r])];
        for (int j = 0; j < dim; ++j) {
          v[static_cast<std::size_t>(j)] -= f * rows[r][static_cast<std::size_t>(j)];
        }
      }
    }
    for (int j = 0; j < dim; ++j) {
      if (v[static_cast<std::size_t>(j)] != 0) {
        rows.push_back(std::move(v));
        pivots.push_back(j);
        return true;
      }
    }
    return false;
  };

  std::vector<RankReport> out;
  for (const auto& [p, q] : queries) {
    require_distribution(p, k);
    require_distribution(q, k);
    int added = 0;
    // Column reads: for each column j, sum_i p_i M_{ij} is observed.
    for (int j = 0; j < k; ++j) {
      Vector<Rational> v = zero_vector<Rational>(dim);
      for (int i = 0; i < k; ++i) {
        v[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
          static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(i)];
      }
      if (reduce_and_insert(std::move(v))) ++added;
    }
    // Row reads: for each row i, sum_j q_j M_{ij} is observed.
    for (int i = 0; i < k; ++i) {
      Vector<Rational> v = zero_vector<Rational>(dim);
      for (int j = 0; j < k; ++j) {
        v[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
          static_cast<std::size_t>(j)] = q[static_cast<std::size_t>(j)];
      }
      if (reduce_and_insert(std::move(v))) ++added;
    }
    RankReport report;
    report.new_constraints = added;
    report.nullspace_dim = dim - static_cast<int>(rows.size());
    out.push_back(report);
  }
  return out;
}

/// Round-by-round trace: t, ||u_t||^2, margin (or alpha_bar), the span
/// potential, and the drift from the center, as canonical rational strings.
inline void write_adversary_trace(std::ostream& os, const AdversaryState& state) {
  os << "# trace k=" << state.k << " mode="
     << (state.mode == AdversaryMode::ExactCase ? "exact_adversary" : "approx_adversary")
     << "\n";
  os << "t,u_norm_sq," << (state.mode == AdversaryMode::ExactCase ? "margin" : "alpha_bar")
     << ",dist_sq,drift\n";
  for (const AdversaryTraceRow& row : state.trace) {
    os << row.t << "," << format_scalar(row.u_norm_sq) << ","
       << format_scalar(row.margin_or_alpha) << "," << format_scalar(row.dist_sq) << ","
       << format_scalar(row.drift) << "\n";
  }
}

/// Session adapter so learners can run against an adversary through the
/// ordinary oracle interface.
class AdversarySession final : public Session<Rational> {
 public:
  explicit AdversarySession(AdversaryState state) : state_(std::move(state)) {}

  int k() const override { return state_.k; }
  const char* oracle_kind() const override {
    return state_.mode == AdversaryMode::ExactCase ? "exact_adversary" : "approx_adversary";
  }
  const AdversaryState& state() const { return state_; }

 protected:
  QueryRecord<Rational> answer(const Vector<Rational>& p, const Vector<Rational>& q) override {
    return adversary_respond(state_, p, q);
  }

 private:
  AdversaryState state_;
};

}  // namespace gq
