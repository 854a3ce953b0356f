// Command-line front end: run learners against fixed or adaptive oracles,
// decode matrices from a single probe, sweep the closed-form bounds, and run
// a quick self-check suite.
//
// Global flags: --config <file> (flat key = value), --mode exact|float,
// --seed <n>. Seed precedence: --seed flag, then the config file's `seed`
// key, then the MQL_SEED environment variable, then 0.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gamequery/adversary.hpp"
#include "gamequery/bounds.hpp"
#include "gamequery/harness.hpp"
#include "gamequery/learners.hpp"
#include "gamequery/recovery.hpp"
#include "gamequery/rng.hpp"
#include "gamequery/simplex.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string mode;
  std::optional<long long> seed;
  std::optional<std::string> learner;
  std::optional<long long> learner_T;
  std::optional<double> eta;
  std::optional<long long> learner_seed;
  std::optional<long long> repetitions;
  std::optional<std::string> records_path;
  std::optional<std::string> trace_path;
  std::optional<long long> k;
};

void add_learner_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--learner", f.learner,
                  "uniform | two_query | basis_recovery | fictitious_play | optimistic_mwu");
  cmd->add_option("--learner-T", f.learner_T, "learner budget/horizon (0 = natural default)");
  cmd->add_option("--eta", f.eta, "optimistic_mwu step size");
  cmd->add_option("--learner-seed", f.learner_seed, "learner-specific seed");
  cmd->add_option("--repetitions", f.repetitions, "independent runs");
  cmd->add_option("--records", f.records_path, "write per-run records CSV here");
}

/// Layers: config file, then MQL_SEED, then command-line flags.
gq::Config assemble_config(const CommonFlags& f) {
  gq::Config cfg;
  if (!f.config_path.empty()) cfg = gq::Config::load(f.config_path);
  if (!cfg.has("seed")) {
    if (const char* env = std::getenv("MQL_SEED")) cfg.set("seed", env);
  }
  if (f.seed) cfg.set("seed", std::to_string(*f.seed));
  if (!f.mode.empty()) cfg.set("mode", f.mode);
  if (f.k) cfg.set("k", std::to_string(*f.k));
  if (f.learner) cfg.set("learner.kind", *f.learner);
  if (f.learner_T) cfg.set("learner.T", std::to_string(*f.learner_T));
  if (f.eta) cfg.set("learner.eta", std::to_string(*f.eta));
  if (f.learner_seed) cfg.set("learner.seed", std::to_string(*f.learner_seed));
  if (f.repetitions) cfg.set("repetitions", std::to_string(*f.repetitions));
  if (f.records_path) cfg.set("out.records", *f.records_path);
  if (f.trace_path) cfg.set("out.trace", *f.trace_path);
  return cfg;
}

int run_solve(const CommonFlags& flags, const std::string& matrix_path) {
  gq::Config cfg = assemble_config(flags);
  cfg.set("oracle.kind", "fixed");
  cfg.set("oracle.matrix", matrix_path);
  if (!cfg.has("k")) {
    cfg.set("k", std::to_string(gq::load_matrix_file<gq::Rational>(matrix_path).k));
  }
  gq::ExperimentResult result = gq::run_experiment(gq::experiment_config_from(cfg));
  gq::write_experiment_records(std::cout, result);
  return 0;
}

int run_adversary(const CommonFlags& flags, const std::string& kind, long long horizon) {
  gq::Config cfg = assemble_config(flags);
  cfg.set("oracle.kind", kind == "approx" ? "approx_adversary" : "exact_adversary");
  if (horizon > 0) cfg.set("oracle.T", std::to_string(horizon));
  gq::ExperimentResult result = gq::run_experiment(gq::experiment_config_from(cfg));
  gq::write_experiment_records(std::cout, result);
  return 0;
}

int run_recover(const std::string& alphabet_path, long long k, const std::string& matrix_path) {
  gq::Alphabet alphabet = gq::load_alphabet_file(alphabet_path);
  gq::GameMatrix<gq::Rational> hidden = gq::load_matrix_file<gq::Rational>(matrix_path);
  if (hidden.k != static_cast<int>(k)) {
    std::cerr << "matrix file has k=" << hidden.k << " but --k " << k << " was given\n";
    return 1;
  }
  gq::Vector<gq::Rational> probe = gq::encode_probe(alphabet, hidden.k);
  std::cout << "probe: " << gq::format_vector(probe) << "\n";

  auto session = gq::open_fixed_session(hidden);
  gq::GameMatrix<gq::Rational> decoded = gq::one_query_recovery(*session, alphabet);
  const auto& record = session->transcript().rounds.front();
  gq::Vector<gq::Rational> observed = gq::scale(record.loss_q, gq::Rational{-1});
  std::cout << "observation: " << gq::format_vector(observed) << "\n";
  std::cout << "decoded:\n";
  gq::write_matrix(std::cout, decoded);

  if (decoded.entries != hidden.entries) {
    std::cerr << "round-trip mismatch: decoded matrix differs from the input matrix\n";
    return 1;
  }
  std::cout << "round-trip: exact\n";
  return 0;
}

int run_bounds(long long k, long long steps, double chart_c, long long horizon,
               const std::string& bounds_path, const std::string& trajectories_path) {
  if (horizon > 0) {
    gq::BoundsRecord r = gq::horizon_bounds(static_cast<int>(k), static_cast<int>(horizon));
    std::cout << "k=" << r.k << " T=" << r.T << "\n";
    std::cout << "lower_eps ~ " << r.lower_eps << "\n";
    std::cout << "lower_eps^2 = " << gq::format_scalar(r.lower_eps_sq) << "\n";
    if (r.lower_eps_rational) {
      std::cout << "lower_eps = " << gq::format_scalar(*r.lower_eps_rational) << " (exact)\n";
    }
    std::cout << "exact_lower_T = " << r.exact_lower_T << "\n";
    return 0;
  }
  gq::CurveData data;
  data.k = static_cast<int>(k);
  data.chart_c = chart_c;
  for (long long i = 1; i <= steps; ++i) {
    data.eps_values.push_back(std::pow(2.0, -static_cast<double>(i)));
  }
  std::ofstream bounds_file;
  std::ofstream traj_file;
  std::ostream* bounds_out = &std::cout;
  std::ostream* traj_out = &std::cout;
  if (!bounds_path.empty()) {
    bounds_file.open(bounds_path);
    if (!bounds_file) throw gq::ConfigError("cannot open " + bounds_path);
    bounds_out = &bounds_file;
  }
  if (!trajectories_path.empty()) {
    traj_file.open(trajectories_path);
    if (!traj_file) throw gq::ConfigError("cannot open " + trajectories_path);
    traj_out = &traj_file;
  }
  gq::emit_curves(data, *bounds_out, *traj_out);
  return 0;
}

int run_verify(long long seed) {
  using gq::Rational;
  int failures = 0;
  auto check = [&](const char* name, auto&& body) {
    bool ok = false;
    std::string detail;
    try {
      ok = body();
    } catch (const std::exception& e) {
      detail = e.what();
    }
    std::cout << "check " << name << ": " << (ok ? "PASS" : "FAIL");
    if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };

  check("solver-saddle-point", [&] {
    gq::DeterministicRng rng(static_cast<std::uint64_t>(seed) + 1);
    for (int trial = 0; trial < 100; ++trial) {
      int k = 2 + static_cast<int>(rng.next_int(0, 2));
      auto m = gq::sample_rational_matrix(rng, k, Rational{-1}, Rational{1}, 8);
      auto sol = gq::solve_exact(m);
      if (gq::gap(m, sol.p_star, sol.q_star).gap != 0) return false;
      auto u = gq::uniform_vector<Rational>(k);
      if (gq::gap(m, u, u).gap < 0) return false;
    }
    return true;
  });

  check("uniform-play-bound", [&] {
    gq::DeterministicRng rng(static_cast<std::uint64_t>(seed) + 2);
    for (int trial = 0; trial < 200; ++trial) {
      int k = 3 + static_cast<int>(rng.next_int(0, 2));
      auto m = gq::sample_sign_matrix(rng, k);
      auto u = gq::uniform_vector<Rational>(k);
      Rational bound = 2 * (Rational{1} - Rational{1} / k);
      if (gq::gap(m, u, u).gap > bound) return false;
    }
    auto tight = gq::GameMatrix<Rational>::create(
        2, Rational{-1}, Rational{1}, {Rational{1}, Rational{-1}, Rational{1}, Rational{-1}});
    auto u2 = gq::uniform_vector<Rational>(2);
    return gq::gap(tight, u2, u2).gap == 1;
  });

  check("two-query-bound", [&] {
    gq::DeterministicRng rng(static_cast<std::uint64_t>(seed) + 3);
    for (int trial = 0; trial < 50; ++trial) {
      auto m01 = gq::sample_rational_matrix(rng, 8, Rational{0}, Rational{1}, 16);
      auto s01 = gq::open_fixed_session(m01);
      auto rec01 = gq::two_query_learner(*s01);
      if (s01->rounds_used() != 2) return false;
      if (gq::gap(m01, rec01.p, rec01.q).gap > 1) return false;
      auto m11 = gq::sample_rational_matrix(rng, 8, Rational{-1}, Rational{1}, 16);
      auto s11 = gq::open_fixed_session(m11);
      auto rec11 = gq::two_query_learner(*s11);
      if (gq::gap(m11, rec11.p, rec11.q).gap > 2) return false;
    }
    return true;
  });

  check("online-to-batch-certificate", [&] {
    auto pennies = gq::GameMatrix<Rational>::create(
        2, Rational{-1}, Rational{1}, {Rational{1}, Rational{-1}, Rational{-1}, Rational{1}});
    auto session = gq::open_fixed_session(pennies);
    auto rec = gq::fictitious_play_learner(*session, 100);
    Rational cert = gq::gap_certificate(session->transcript());
    Rational g = gq::gap(pennies, rec.p, rec.q).gap;
    return Rational{100} * g <= cert && cert >= 0;
  });

  check("recovery-round-trip", [&] {
    gq::DeterministicRng rng(static_cast<std::uint64_t>(seed) + 4);
    const auto alphabets = {gq::Alphabet::create(1, {0, 1}), gq::Alphabet::create(1, {-1, 0, 1}),
                            gq::Alphabet::create(4, {-4, -3, -2, -1, 0, 1, 2, 3, 4})};
    for (const auto& alphabet : alphabets) {
      for (int trial = 0; trial < 50; ++trial) {
        int k = 1 + static_cast<int>(rng.next_int(0, 7));
        auto m = gq::sample_alphabet_matrix(rng, alphabet, k);
        auto session = gq::open_fixed_session(m);
        auto decoded = gq::one_query_recovery(*session, alphabet);
        if (decoded.entries != m.entries) return false;
      }
    }
    return true;
  });

  check("full-recovery", [&] {
    gq::DeterministicRng rng(static_cast<std::uint64_t>(seed) + 5);
    auto m = gq::sample_rational_matrix(rng, 5, Rational{-1}, Rational{1}, 32);
    auto session = gq::open_fixed_session(m);
    auto recovered = gq::full_recovery(*session, 5);
    return recovered.entries == m.entries && session->rounds_used() == 5;
  });

  check("exact-adversary", [&] {
    gq::DeterministicRng rng(static_cast<std::uint64_t>(seed) + 6);
    auto session = gq::AdversarySession(gq::new_exact_adversary(10));
    auto rec = gq::random_query_driver(session, 4, rng);
    auto witness = gq::witness_search(session.state(), rec.p, rec.q);
    if (!(witness.gap_value > 0)) return false;
    for (const auto& row : session.state().trace) {
      if (!(row.dist_sq > 0)) return false;
    }
    return true;
  });

  check("approx-adversary", [&] {
    gq::DeterministicRng rng(static_cast<std::uint64_t>(seed) + 7);
    auto session = gq::AdversarySession(gq::new_approx_adversary(5, 1));
    auto rec = gq::random_query_driver(session, 1, rng);
    auto witness = gq::witness_search(session.state(), rec.p, rec.q);
    const auto& st = session.state();
    Rational floor_bound = Rational{st.k} *
                           gq::pow_rational(st.alpha_bar / 2,
                                            static_cast<unsigned long>(st.horizon) + 1);
    return witness.gap_value >= 0 && gq::distance_potential(st, Rational{1}) >= floor_bound;
  });

  check("bound-formulas", [&] {
    auto exact = gq::lower_eps_exact(8, 2);
    if (!exact || *exact != gq::pow2_rational(-64)) return false;
    for (double a : {1.0, 2.0, 4.0}) {
      for (double b : {1.0, 2.0, 4.0}) {
        for (int x = 1; x <= 10; ++x) {
          double eps = a * std::pow(1.0 / (b * x), x);
          try {
            if (gq::invert_query_bound(a, b, eps) > x + 1e-9) return false;
          } catch (const gq::GuardViolationError&) {
            // outside the accepted domain; nothing asserted there
          }
        }
      }
    }
    for (int k : {5, 8, 16, 32, 64}) {
      double guard = 1.0 / (std::exp(1.0) * 2048.0 * std::pow(static_cast<double>(k), 4.0));
      for (double eps : {guard, guard / 4, guard / 1024}) {
        auto r = gq::theoretical_bounds(k, eps);
        if (!(r.lower_T <= r.upper_T)) return false;
      }
    }
    return true;
  });

  std::cout << (failures == 0 ? "verify: all checks passed" : "verify: FAILURES") << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-order query model for zero-sum matrix games"};
  app.require_subcommand(1);

  CommonFlags flags;
  app.add_option("--config", flags.config_path, "flat key = value config file");
  app.add_option("--mode", flags.mode, "exact | float")
      ->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--seed", flags.seed, "global seed (beats config and MQL_SEED)");

  auto* solve = app.add_subcommand("solve", "run a learner against a fixed hidden matrix");
  solve->fallthrough();
  std::string solve_matrix;
  solve->add_option("--matrix", solve_matrix, "matrix file")->required();
  solve->add_option("--k", flags.k, "board size (defaults to the matrix file's k)");
  add_learner_flags(solve, flags);

  auto* adversary = app.add_subcommand("adversary", "run a learner against an adaptive oracle");
  adversary->fallthrough();
  std::string adversary_kind = "exact";
  long long adversary_T = 0;
  adversary->add_option("--kind", adversary_kind, "exact | approx")
      ->check(CLI::IsMember({"exact", "approx"}));
  adversary->add_option("--k", flags.k, "board size")->required();
  adversary->add_option("--T", adversary_T, "adversary horizon (approx)");
  adversary->add_option("--trace", flags.trace_path, "write the adversary trace here");
  add_learner_flags(adversary, flags);

  auto* recover = app.add_subcommand("recover", "decode a matrix from one probe query");
  recover->fallthrough();
  std::string recover_alphabet, recover_matrix;
  long long recover_k = 0;
  recover->add_option("--alphabet", recover_alphabet, "alphabet file")->required();
  recover->add_option("--k", recover_k, "board size")->required();
  recover->add_option("--matrix", recover_matrix, "hidden matrix file")->required();

  auto* bounds = app.add_subcommand("bounds", "sweep the closed-form query bounds");
  bounds->fallthrough();
  long long bounds_k = 0, bounds_steps = 20, bounds_T = 0;
  double bounds_c = 8.0;
  std::string bounds_out, bounds_traj_out;
  bounds->add_option("--k", bounds_k, "board size")->required();
  bounds->add_option("--steps", bounds_steps, "sweep eps over 2^-1 .. 2^-steps");
  bounds->add_option("--c", bounds_c, "chart constant for upper_T");
  bounds->add_option("--T", bounds_T, "print the accuracy floor for this horizon instead");
  bounds->add_option("--out", bounds_out, "bounds CSV path (default stdout)");
  bounds->add_option("--trajectories-out", bounds_traj_out, "trajectory CSV path");

  auto* verify = app.add_subcommand("verify", "run the quick self-check suite");
  verify->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Normalize usage errors to exit code 1; --help stays 0.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return run_solve(flags, solve_matrix);
    if (adversary->parsed()) return run_adversary(flags, adversary_kind, adversary_T);
    if (recover->parsed()) return run_recover(recover_alphabet, recover_k, recover_matrix);
    if (bounds->parsed()) {
      return run_bounds(bounds_k, bounds_steps, bounds_c, bounds_T, bounds_out, bounds_traj_out);
    }
    if (verify->parsed()) {
      long long seed = flags.seed ? *flags.seed : 0;
      if (!flags.seed) {
        if (const char* env = std::getenv("MQL_SEED")) seed = std::atoll(env);
      }
      return run_verify(seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
