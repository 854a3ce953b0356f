#pragma once

/// Experiment orchestration and file envelopes.
///
/// File formats (all plain text, '#' starts a comment line):
///
/// Matrix file:
///     k 2
///     bounds -1 1
///     row 1/2 -1/2
///     row 1/4 1
///
/// Alphabet file:
///     denominator 4
///     numerators -4 -3 -2 -1 0 1 2 3 4
///
/// Experiment config (flat key = value; every key can be overridden by a
/// command-line flag):
///     k            board size K (required)
///     mode         exact | float                      (default exact)
///     oracle.kind  fixed | exact_adversary | approx_adversary   (default fixed)
///     oracle.matrix  path to the hidden matrix        (fixed oracle)
///     oracle.T     adversary horizon                  (approx_adversary)
///     learner.kind uniform | two_query | basis_recovery | fictitious_play | optimistic_mwu
///     learner.T    learner budget/horizon (0 = natural default)
///     learner.eta  step size for optimistic_mwu       (default 0.25)
///     learner.seed learner-specific seed              (default: seed)
///     seed         global seed
///     repetitions  independent runs                   (default 1)
///     out.records  per-run record CSV path            (optional)
///     out.trace    adversary trace path               (optional)
///
/// Grading: against a fixed oracle the recommendation's gap is computed from
/// the true matrix; against an adversary it is the maximum gap over the
/// rank-one witness family that replays the whole transcript (witness_search).
/// In exact mode the optimistic_mwu learner runs with queries rounded to a
/// fixed rational grid so adversaries (which require exact arithmetic) can
/// answer it.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gamequery/adversary.hpp"
#include "gamequery/bounds.hpp"
#include "gamequery/config.hpp"
#include "gamequery/learners.hpp"
#include "gamequery/recovery.hpp"
#include "gamequery/simplex.hpp"

namespace gq {

// ---------------------------------------------------------------------------
// Matrix and alphabet files
// ---------------------------------------------------------------------------

namespace detail {

/// Next non-blank, non-comment line; false at end of stream.
inline bool next_content_line(std::istream& in, std::string& out) {
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim_copy(line);
    if (t.empty() || t[0] == '#') continue;
    out = std::move(t);
    return true;
  }
  return false;
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(std::move(w));
  return out;
}

}  // namespace detail

template <class S>
void write_matrix(std::ostream& os, const GameMatrix<S>& m) {
  os << "k " << m.k << "\n";
  os << "bounds " << format_scalar(m.lo) << " " << format_scalar(m.hi) << "\n";
  for (int i = 0; i < m.k; ++i) {
    os << "row";
    for (int j = 0; j < m.k; ++j) os << " " << format_scalar(m.at(i, j));
    os << "\n";
  }
}

template <class S>
GameMatrix<S> read_matrix(std::istream& in) {
  std::string line;
  if (!detail::next_content_line(in, line)) throw ParseError("matrix file: missing 'k' line");
  auto words = detail::split_words(line);
  if (words.size() != 2 || words[0] != "k") {
    throw ParseError("matrix file: expected 'k <K>', got '" + line + "'");
  }
  int k = 0;
  try {
    k = std::stoi(words[1]);
  } catch (const std::exception&) {
    throw ParseError("matrix file: bad dimension '" + words[1] + "'");
  }
  if (!detail::next_content_line(in, line)) {
    throw ParseError("matrix file: missing 'bounds' line");
  }
  words = detail::split_words(line);
  if (words.size() != 3 || words[0] != "bounds") {
    throw ParseError("matrix file: expected 'bounds <lo> <hi>', got '" + line + "'");
  }
  S lo = parse_scalar<S>(words[1]);
  S hi = parse_scalar<S>(words[2]);
  std::vector<S> entries;
  entries.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    if (!detail::next_content_line(in, line)) {
      throw ParseError("matrix file: expected " + std::to_string(k) + " 'row' lines");
    }
    words = detail::split_words(line);
    if (words.size() != static_cast<std::size_t>(k) + 1 || words[0] != "row") {
      throw ParseError("matrix file: expected 'row' with " + std::to_string(k) +
                       " entries, got '" + line + "'");
    }
    for (int j = 0; j < k; ++j) entries.push_back(parse_scalar<S>(words[static_cast<std::size_t>(j) + 1]));
  }
  return GameMatrix<S>::create(k, std::move(lo), std::move(hi), std::move(entries));
}

template <class S>
GameMatrix<S> load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  return read_matrix<S>(in);
}

template <class S>
void save_matrix_file(const std::string& path, const GameMatrix<S>& m) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open matrix file for writing: " + path);
  write_matrix(os, m);
}

inline void write_alphabet(std::ostream& os, const Alphabet& a) {
  os << "denominator " << a.denominator << "\n";
  os << "numerators";
  for (std::int64_t n : a.numerators) os << " " << n;
  os << "\n";
}

inline Alphabet read_alphabet(std::istream& in) {
  std::string line;
  if (!detail::next_content_line(in, line)) {
    throw ParseError("alphabet file: missing 'denominator' line");
  }
  auto words = detail::split_words(line);
  if (words.size() != 2 || words[0] != "denominator") {
    throw ParseError("alphabet file: expected 'denominator <r>', got '" + line + "'");
  }
  long long denom = 0;
  try {
    denom = std::stoll(words[1]);
  } catch (const std::exception&) {
    throw ParseError("alphabet file: bad denominator '" + words[1] + "'");
  }
  if (!detail::next_content_line(in, line)) {
    throw ParseError("alphabet file: missing 'numerators' line");
  }
  words = detail::split_words(line);
  if (words.size() < 2 || words[0] != "numerators") {
    throw ParseError("alphabet file: expected 'numerators <a1> ...', got '" + line + "'");
  }
  std::vector<std::int64_t> numerators;
  for (std::size_t i = 1; i < words.size(); ++i) {
    try {
      numerators.push_back(static_cast<std::int64_t>(std::stoll(words[i])));
    } catch (const std::exception&) {
      throw ParseError("alphabet file: bad numerator '" + words[i] + "'");
    }
  }
  return Alphabet::create(static_cast<std::int64_t>(denom), std::move(numerators));
}

inline Alphabet load_alphabet_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open alphabet file: " + path);
  return read_alphabet(in);
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

enum class OracleChoice { Fixed, ExactAdversary, ApproxAdversary };

inline OracleChoice parse_oracle_choice(const std::string& name) {
  if (name == "fixed") return OracleChoice::Fixed;
  if (name == "exact_adversary") return OracleChoice::ExactAdversary;
  if (name == "approx_adversary") return OracleChoice::ApproxAdversary;
  throw ConfigError("unknown oracle kind: " + name);
}

inline const char* oracle_choice_name(OracleChoice o) {
  switch (o) {
    case OracleChoice::Fixed: return "fixed";
    case OracleChoice::ExactAdversary: return "exact_adversary";
    case OracleChoice::ApproxAdversary: return "approx_adversary";
  }
  return "fixed";
}

struct ExperimentConfig {
  int k = 0;
  std::string mode = "exact";  // "exact" | "float"
  OracleChoice oracle = OracleChoice::Fixed;
  std::string matrix_path;  // fixed oracle
  int adversary_horizon = 0;  // approx_adversary
  LearnerConfig learner;
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::string records_path;
  std::string trace_path;
};

inline ExperimentConfig experiment_config_from(const Config& cfg) {
  ExperimentConfig e;
  e.k = static_cast<int>(cfg.get_int("k"));
  if (e.k < 1) throw ConfigError("k must be positive");
  e.mode = cfg.get_or("mode", "exact");
  if (e.mode != "exact" && e.mode != "float") {
    throw ConfigError("mode must be 'exact' or 'float', got '" + e.mode + "'");
  }
  e.oracle = parse_oracle_choice(cfg.get_or("oracle.kind", "fixed"));
  e.matrix_path = cfg.get_or("oracle.matrix", "");
  e.adversary_horizon = static_cast<int>(cfg.get_int_or("oracle.T", 0));
  e.learner.kind = parse_learner_kind(cfg.get_or("learner.kind", "uniform"));
  e.learner.horizon = static_cast<int>(cfg.get_int_or("learner.T", 0));
  e.learner.eta = cfg.get_double_or("learner.eta", 0.25);
  e.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  e.learner.seed = static_cast<std::uint64_t>(
      cfg.get_int_or("learner.seed", static_cast<long long>(e.seed)));
  e.repetitions = static_cast<int>(cfg.get_int_or("repetitions", 1));
  if (e.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  e.records_path = cfg.get_or("out.records", "");
  e.trace_path = cfg.get_or("out.trace", "");

  if (e.oracle == OracleChoice::Fixed && e.matrix_path.empty()) {
    throw ConfigError("fixed oracle requires oracle.matrix");
  }
  if (e.oracle != OracleChoice::Fixed && e.mode != "exact") {
    throw ConfigError("adversary oracles require exact rational mode");
  }
  if (e.oracle == OracleChoice::ApproxAdversary && e.adversary_horizon < 1) {
    throw ConfigError("approx_adversary requires oracle.T >= 1");
  }
  if (e.mode == "float" && e.learner.kind == LearnerKind::BasisRecovery) {
    throw ConfigError("basis_recovery requires exact rational mode");
  }
  return e;
}

// ---------------------------------------------------------------------------
// Running experiments
// ---------------------------------------------------------------------------

struct RunRecord {
  int repetition = 0;
  int queries_used = 0;
  double gap_value = 0.0;
  std::string gap_exact;  // canonical rational string; empty in float mode
  double certificate_value = 0.0;
  std::string certificate_exact;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunRecord> runs;
  double max_gap = 0.0;
  double mean_gap = 0.0;
};

namespace detail {

/// Natural learner budget when learner.T is 0: the full read budget for
/// basis recovery, the adversary's own budget against an adversary,
/// otherwise 16 rounds.
inline int natural_horizon(const ExperimentConfig& e) {
  if (e.learner.horizon >= 1) return e.learner.horizon;
  switch (e.oracle) {
    case OracleChoice::ExactAdversary: return (e.k - 2) / 2;
    case OracleChoice::ApproxAdversary: return e.adversary_horizon;
    case OracleChoice::Fixed: break;
  }
  return e.learner.kind == LearnerKind::BasisRecovery ? e.k : 16;
}

inline Recommendation<Rational> drive_exact(Session<Rational>& session,
                                            const ExperimentConfig& e) {
  switch (e.learner.kind) {
    case LearnerKind::Uniform: return uniform_learner(session);
    case LearnerKind::TwoQuery: return two_query_learner(session);
    case LearnerKind::BasisRecovery: return basis_recovery_learner(session, natural_horizon(e));
    case LearnerKind::FictitiousPlay: return fictitious_play_learner(session, natural_horizon(e));
    case LearnerKind::OptimisticMWU:
      return rationalized_mwu_driver(session, natural_horizon(e), e.learner.eta);
  }
  throw ConfigError("unhandled learner kind");
}

inline Recommendation<double> drive_float(Session<double>& session, const ExperimentConfig& e) {
  switch (e.learner.kind) {
    case LearnerKind::Uniform: return uniform_learner(session);
    case LearnerKind::TwoQuery: return two_query_learner(session);
    case LearnerKind::FictitiousPlay: return fictitious_play_learner(session, natural_horizon(e));
    case LearnerKind::OptimisticMWU:
      return optimistic_mwu_learner(session, natural_horizon(e), e.learner.eta);
    case LearnerKind::BasisRecovery: break;
  }
  throw ConfigError("learner not available in float mode");
}

}  // namespace detail

/// Record CSV: one row per repetition plus an aggregate comment line.
inline void write_experiment_records(std::ostream& os, const ExperimentResult& result) {
  const ExperimentConfig& e = result.config;
  os << "# records k=" << e.k << " mode=" << e.mode << " oracle="
     << oracle_choice_name(e.oracle) << " learner=" << learner_kind_name(e.learner.kind)
     << " repetitions=" << e.repetitions << " seed=" << e.seed << "\n";
  os << "repetition,queries,gap,certificate,gap_exact,certificate_exact\n";
  for (const RunRecord& r : result.runs) {
    os << r.repetition << "," << r.queries_used << "," << format_scalar(r.gap_value) << ","
       << format_scalar(r.certificate_value) << "," << r.gap_exact << ","
       << r.certificate_exact << "\n";
  }
  os << "# aggregate max_gap=" << format_scalar(result.max_gap)
     << " mean_gap=" << format_scalar(result.mean_gap) << "\n";
}

/// Executes the configured repetitions and grades every recommendation.
/// Deterministic given (config, seed): rerunning produces byte-identical
/// record and trace files.
inline ExperimentResult run_experiment(const ExperimentConfig& e) {
  ExperimentResult result;
  result.config = e;

  std::ostringstream trace_text;
  for (int rep = 0; rep < e.repetitions; ++rep) {
    RunRecord record;
    record.repetition = rep;
    if (e.mode == "exact") {
      std::unique_ptr<Session<Rational>> session;
      switch (e.oracle) {
        case OracleChoice::Fixed:
          session = open_fixed_session(load_matrix_file<Rational>(e.matrix_path));
          break;
        case OracleChoice::ExactAdversary:
          session = std::make_unique<AdversarySession>(new_exact_adversary(e.k));
          break;
        case OracleChoice::ApproxAdversary:
          session = std::make_unique<AdversarySession>(
              new_approx_adversary(e.k, e.adversary_horizon));
          break;
      }
      if (session->k() != e.k) throw ConfigError("matrix dimension does not match config k");
      Recommendation<Rational> rec = detail::drive_exact(*session, e);
      const Transcript<Rational>& transcript = session->transcript();
      record.queries_used = static_cast<int>(transcript.rounds.size());
      Rational cert = transcript.rounds.empty() ? Rational{0} : gap_certificate(transcript);
      record.certificate_value = to_double(cert);
      record.certificate_exact = format_scalar(cert);
      Rational g;
      if (e.oracle == OracleChoice::Fixed) {
        GameMatrix<Rational> m = load_matrix_file<Rational>(e.matrix_path);
        g = gap(m, rec.p, rec.q).gap;
      } else {
        auto& adversary = dynamic_cast<AdversarySession&>(*session);
        WitnessReport witness = witness_search(adversary.state(), rec.p, rec.q);
        g = witness.gap_value;
        trace_text << "# repetition " << rep << "\n";
        write_adversary_trace(trace_text, adversary.state());
      }
      record.gap_value = to_double(g);
      record.gap_exact = format_scalar(g);
    } else {
      auto session = open_fixed_session(load_matrix_file<double>(e.matrix_path));
      if (session->k() != e.k) throw ConfigError("matrix dimension does not match config k");
      Recommendation<double> rec = detail::drive_float(*session, e);
      const Transcript<double>& transcript = session->transcript();
      record.queries_used = static_cast<int>(transcript.rounds.size());
      double cert = transcript.rounds.empty() ? 0.0 : gap_certificate(transcript);
      record.certificate_value = cert;
      GameMatrix<double> m = load_matrix_file<double>(e.matrix_path);
      record.gap_value = gap(m, rec.p, rec.q).gap;
    }
    result.runs.push_back(std::move(record));
  }

  double sum = 0.0;
  for (const RunRecord& r : result.runs) {
    sum += r.gap_value;
    if (r.gap_value > result.max_gap) result.max_gap = r.gap_value;
  }
  result.mean_gap = result.runs.empty() ? 0.0 : sum / static_cast<double>(result.runs.size());

  if (!e.records_path.empty()) {
    std::ofstream os(e.records_path);
    if (!os) throw ConfigError("cannot open records file for writing: " + e.records_path);
    write_experiment_records(os, result);
  }
  if (!e.trace_path.empty() && e.oracle != OracleChoice::Fixed) {
    std::ofstream os(e.trace_path);
    if (!os) throw ConfigError("cannot open trace file for writing: " + e.trace_path);
    os << trace_text.str();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Curve emission
// ---------------------------------------------------------------------------

struct TrajectoryPoint {
  int T = 0;
  double gap_value = 0.0;
  std::string gap_exact;  // empty when only a float measurement exists
};

struct LearnerTrajectory {
  std::string learner;
  std::vector<TrajectoryPoint> points;
};

struct CurveData {
  int k = 0;
  double chart_c = 8.0;  // chart constant for upper_T overlays, never asserted
  std::vector<double> eps_values;
  std::vector<LearnerTrajectory> trajectories;
};

namespace detail {

/// 12 significant digits, the chart-friendly column next to exact strings.
inline std::string format_g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

}  // namespace detail

/// Writes the bound curves (eps, upper_T, lower_T) and the measured
/// (T, gap) trajectories as CSV tables with a deterministic column order.
/// Decimal columns carry 12 significant digits; exact strings ride along
/// where an exact value exists.
inline void emit_curves(const CurveData& data, std::ostream& bounds_out,
                        std::ostream& trajectories_out) {
  if (data.eps_values.empty() && data.trajectories.empty()) {
    throw ConfigError("emit_curves: no results to emit");
  }
  if (data.k < 2) throw ConfigError("emit_curves: k must be >= 2");

  bounds_out << "# bounds k=" << data.k << " c=" << detail::format_g12(data.chart_c) << "\n";
  bounds_out << "eps,upper_T,lower_T,exact_lower_T\n";
  for (double eps : data.eps_values) {
    BoundsRecord r = theoretical_bounds(data.k, eps, data.chart_c);
    bounds_out << detail::format_g12(eps) << "," << detail::format_g12(r.upper_T) << ","
               << detail::format_g12(r.lower_T) << "," << r.exact_lower_T << "\n";
  }

  trajectories_out << "# trajectories k=" << data.k << "\n";
  trajectories_out << "learner,T,gap,gap_exact\n";
  for (const LearnerTrajectory& traj : data.trajectories) {
    for (const TrajectoryPoint& pt : traj.points) {
      trajectories_out << traj.learner << "," << pt.T << "," << detail::format_g12(pt.gap_value)
                       << "," << pt.gap_exact << "\n";
    }
  }
}

}  // namespace gq
