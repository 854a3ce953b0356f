// Python bindings for the core operations: exact solving, gap evaluation,
// learners, adversary runs, probe recovery, and the query-complexity bounds.
// Rationals cross the boundary as "num/den" strings so exactness survives.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <vector>

#include "gamequery/adversary.hpp"
#include "gamequery/bounds.hpp"
#include "gamequery/game.hpp"
#include "gamequery/learners.hpp"
#include "gamequery/numerics.hpp"
#include "gamequery/oracle.hpp"
#include "gamequery/recovery.hpp"

namespace py = pybind11;
using gq::GameMatrix;
using gq::Rational;
using gq::Vector;

namespace {

Vector<Rational> parse_vector(const std::vector<std::string>& items) {
  Vector<Rational> out;
  out.reserve(items.size());
  for (const auto& s : items) out.push_back(gq::parse_scalar<Rational>(s));
  return out;
}

std::vector<std::string> format_list(const Vector<Rational>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(gq::format_scalar(x));
  return out;
}

GameMatrix<Rational> matrix_from(const std::vector<std::string>& entries, int k) {
  Vector<Rational> parsed = parse_vector(entries);
  if (parsed.empty()) throw std::invalid_argument("matrix needs at least one entry");
  Rational lo = parsed.front(), hi = parsed.front();
  for (const auto& x : parsed) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return GameMatrix<Rational>::create(k, lo, hi, std::move(parsed));
}

gq::Alphabet alphabet_from(std::int64_t denominator, std::vector<std::int64_t> numerators) {
  return gq::Alphabet::create(denominator, std::move(numerators));
}

}  // namespace

PYBIND11_MODULE(gamequery, m) {
  m.doc() =
      "First-order query toolkit for K x K zero-sum matrix games: exact "
      "equilibria, gap certificates, query-efficient learners, adaptive "
      "adversaries, single-query matrix recovery, and query-complexity bounds.";

  m.def(
      "solve",
      [](const std::vector<std::string>& entries, int k) {
        auto sol = gq::solve_exact(matrix_from(entries, k));
        py::dict out;
        out["p"] = format_list(sol.p_star);
        out["q"] = format_list(sol.q_star);
        out["value"] = gq::format_scalar(sol.value);
        return out;
      },
      py::arg("entries"), py::arg("k"),
      "Exact equilibrium of the row-major K x K rational matrix. Returns "
      "{'p', 'q', 'value'} with every rational as a 'num/den' string.");

  m.def(
      "gap",
      [](const std::vector<std::string>& entries, int k,
         const std::vector<std::string>& p, const std::vector<std::string>& q) {
        auto report = gq::gap(matrix_from(entries, k), parse_vector(p), parse_vector(q));
        py::dict out;
        out["gap"] = gq::format_scalar(report.gap);
        out["best_row"] = report.best_row;
        out["best_column"] = report.best_column;
        return out;
      },
      py::arg("entries"), py::arg("k"), py::arg("p"), py::arg("q"),
      "Exploitability gap of the strategy pair (p, q), exact. Returns "
      "{'gap', 'best_row', 'best_column'} with 0-based best responses.");

  m.def(
      "two_query",
      [](const std::vector<std::string>& entries, int k) {
        auto matrix = matrix_from(entries, k);
        auto session = gq::open_fixed_session(matrix);
        auto rec = gq::two_query_learner(*session);
        auto report = gq::gap(matrix, rec.p, rec.q);
        py::dict out;
        out["p"] = format_list(rec.p);
        out["q"] = format_list(rec.q);
        out["gap"] = gq::format_scalar(report.gap);
        return out;
      },
      py::arg("entries"), py::arg("k"),
      "Two-query recommendation (gap at most the entry range width) and its "
      "exact gap.");

  m.def(
      "exact_adversary_run",
      [](int k, int horizon) {
        gq::AdversarySession session(gq::new_exact_adversary(k));
        auto rec = gq::basis_recovery_learner(session, horizon);
        const auto& state = session.state();
        auto witness = gq::witness_search(state, rec.p, rec.q);
        py::dict out;
        out["witness_gap"] = gq::format_scalar(witness.gap_value);
        out["drift"] = gq::format_scalar(
            state.m_current.max_entry_distance(state.ball_center));
        out["dist_sq"] = gq::format_scalar(
            gq::distance_potential(state, Rational{1}));
        out["rounds"] = session.rounds_used();
        return out;
      },
      py::arg("k"), py::arg("horizon"),
      "Drive the hard-instance adversary with basis queries for the given "
      "horizon; returns the witness gap it forces, the matrix drift, and the "
      "remaining span potential, all exact.");

  m.def(
      "encode_probe",
      [](int k, std::int64_t denominator, std::vector<std::int64_t> numerators) {
        return format_list(gq::encode_probe(alphabet_from(denominator, std::move(numerators)), k));
      },
      py::arg("k"), py::arg("denominator"), py::arg("numerators"),
      "The single probe distribution whose loss vector determines every "
      "entry of a matrix over the given alphabet {n/denominator}.");

  m.def(
      "decode_matrix",
      [](int k, std::int64_t denominator, std::vector<std::int64_t> numerators,
         const std::vector<std::string>& observation) {
        auto decoded = gq::decode_matrix(alphabet_from(denominator, std::move(numerators)), k,
                                         parse_vector(observation));
        return format_list(decoded.entries);
      },
      py::arg("k"), py::arg("denominator"), py::arg("numerators"), py::arg("observation"),
      "Invert one probe observation (a length-K loss vector) back to the "
      "row-major matrix entries; raises if no alphabet matrix explains it.");

  m.def(
      "lower_eps_sq",
      [](int k, int horizon) {
        return gq::format_scalar(gq::lower_eps_sq_exact(k, horizon));
      },
      py::arg("k"), py::arg("horizon"),
      "Exact square of the accuracy floor no T-query learner can beat.");

  m.def(
      "lower_eps",
      [](int k, int horizon) -> py::object {
        auto root = gq::lower_eps_exact(k, horizon);
        if (root) return py::str(gq::format_scalar(*root));
        return py::float_(gq::lower_eps_value(k, horizon));
      },
      py::arg("k"), py::arg("horizon"),
      "Accuracy floor: an exact 'num/den' string when the square root is "
      "rational, otherwise a float.");

  m.def("upper_T", &gq::upper_T_for, py::arg("k"), py::arg("eps"), py::arg("c") = 8.0,
        "Queries sufficient for an eps-equilibrium (regret-matching regimes).");
  m.def("lower_T", &gq::lower_T_for, py::arg("k"), py::arg("eps"),
        "Queries necessary for an eps-equilibrium on the guard region; 0 where "
        "the bound is vacuous.");
  m.def("exact_lower_T", &gq::exact_lower_T, py::arg("k"),
        "Queries every exact-equilibrium learner needs: floor((K-1)/2).");
  m.def("invert_query_bound", &gq::invert_query_bound, py::arg("a"), py::arg("b"),
        py::arg("eps"),
        "log(a/eps) / log(b log(a/eps)); raises when the guards fail.");
}
