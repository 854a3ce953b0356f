#pragma once

/// The first-order interaction protocol. A learner submits strategy pairs
/// (p_t, q_t) to a session and observes only the loss vectors
///   loss_p = M q_t   and   loss_q = -M^T p_t.
/// Sessions record a transcript, which can carry a final recommendation and
/// be exported/imported as line-oriented text. Learners interact purely
/// through the Session interface, so the hidden matrix can never leak.

#include "gamequery/game.hpp"

#include <iostream>
#include <memory>
#include <sstream>

namespace gq {

/// Raised on protocol misuse (querying or finalizing a finalized session).
struct SessionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when transcript text cannot be parsed.
struct TranscriptFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class S>
struct QueryRecord {
  int t = 0;  // 1-based round index
  Vector<S> p, q;
  Vector<S> loss_p;  // M q_t
  Vector<S> loss_q;  // -M^T p_t
};

template <class S>
struct Recommendation {
  Vector<S> p, q;
};

template <class S>
struct Transcript {
  int k = 0;
  std::string oracle_kind = "fixed";
  std::vector<QueryRecord<S>> rounds;
  std::optional<Recommendation<S>> recommendation;
};

template <class S>
constexpr const char* mode_name() {
  if constexpr (ScalarOps<S>::exact) {
    return "exact";
  } else {
    return "float";
  }
}

/// A stateful oracle session. Single-owner; immutable once finalized.
template <class S>
class Session {
 public:
  virtual ~Session() = default;

  virtual int k() const = 0;
  virtual const char* oracle_kind() const = 0;

  /// Submits one query; validates both strategies, answers with the loss
  /// pair, and appends the record to the transcript.
  QueryRecord<S> query(const Vector<S>& p, const Vector<S>& q) {
    require_open();
    require_distribution(p, k());
    require_distribution(q, k());
    QueryRecord<S> record = answer(p, q);
    record.t = static_cast<int>(transcript_.rounds.size()) + 1;
    record.p = p;
    record.q = q;
    transcript_.rounds.push_back(record);
    return record;
  }

  /// Closes the session, recording the recommendation. Further queries or a
  /// second finalize are errors.
  Transcript<S> finalize(const Vector<S>& p, const Vector<S>& q) {
    require_open();
    require_distribution(p, k());
    require_distribution(q, k());
    transcript_.k = k();
    transcript_.oracle_kind = oracle_kind();
    transcript_.recommendation = Recommendation<S>{p, q};
    finalized_ = true;
    return transcript_;
  }

  int rounds_used() const { return static_cast<int>(transcript_.rounds.size()); }
  bool finalized() const { return finalized_; }
  const Transcript<S>& transcript() const { return transcript_; }

 protected:
  /// Computes the loss pair for a validated query.
  virtual QueryRecord<S> answer(const Vector<S>& p, const Vector<S>& q) = 0;

  void require_open() const {
    if (finalized_) throw SessionError("session already finalized");
  }

  Transcript<S> transcript_;
  bool finalized_ = false;
};

/// A session whose answers come from a fixed hidden matrix.
template <class S>
class FixedSession final : public Session<S> {
 public:
  explicit FixedSession(GameMatrix<S> m) : m_(std::move(m)) {}

  int k() const override { return m_.k; }
  const char* oracle_kind() const override { return "fixed"; }

 protected:
  QueryRecord<S> answer(const Vector<S>& p, const Vector<S>& q) override {
    QueryRecord<S> r;
    r.loss_p = m_.apply(q);
    r.loss_q = scale(m_.apply_transposed(p), S{-1});
    return r;
  }

 private:
  GameMatrix<S> m_;
};

template <class S>
std::unique_ptr<Session<S>> open_fixed_session(GameMatrix<S> m) {
  return std::make_unique<FixedSession<S>>(std::move(m));
}

/// Replays every recorded query against m and checks both loss vectors for
/// exact (bitwise) agreement.
template <class S>
bool replays_exactly(const GameMatrix<S>& m, const Transcript<S>& transcript) {
  for (const QueryRecord<S>& r : transcript.rounds) {
    if (m.apply(r.q) != r.loss_p) return false;
    if (scale(m.apply_transposed(r.p), S{-1}) != r.loss_q) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Transcript text format: one header line, one record per line, canonical
// scalar serialization. Example:
//   # transcript k=2 mode=exact oracle=fixed
//   1 p=1/1,0/1 q=0/1,1/1 loss_p=-1/2,1/1 loss_q=-1/2,1/2
//   rec p=1/2,1/2 q=0/1,1/1
// ---------------------------------------------------------------------------

template <class S>
void write_transcript(std::ostream& os, const Transcript<S>& t) {
  os << "# transcript k=" << t.k << " mode=" << mode_name<S>() << " oracle=" << t.oracle_kind
     << "\n";
  for (const QueryRecord<S>& r : t.rounds) {
    os << r.t << " p=" << format_vector(r.p) << " q=" << format_vector(r.q)
       << " loss_p=" << format_vector(r.loss_p) << " loss_q=" << format_vector(r.loss_q) << "\n";
  }
  if (t.recommendation) {
    os << "rec p=" << format_vector(t.recommendation->p)
       << " q=" << format_vector(t.recommendation->q) << "\n";
  }
}

namespace detail {

template <class S>
Vector<S> parse_vector_field(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) {
    throw TranscriptFormatError("expected field '" + key + "' in transcript");
  }
  std::string body = token.substr(key.size() + 1);
  Vector<S> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    std::string piece =
        comma == std::string::npos ? body.substr(start) : body.substr(start, comma - start);
    if (piece.empty()) throw TranscriptFormatError("empty vector entry");
    out.push_back(parse_scalar<S>(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

template <class S>
Transcript<S> read_transcript(std::istream& is) {
  Transcript<S> t;
  std::string line;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string tag, word;
      ls >> tag;  // '#'
      while (ls >> word) {
        if (word.rfind("k=", 0) == 0) t.k = std::stoi(word.substr(2));
        if (word.rfind("oracle=", 0) == 0) t.oracle_kind = word.substr(7);
        if (word.rfind("mode=", 0) == 0 && word.substr(5) != mode_name<S>()) {
          throw TranscriptFormatError("transcript mode '" + word.substr(5) +
                                      "' does not match requested mode");
        }
      }
      saw_header = true;
      continue;
    }
    if (!saw_header) throw TranscriptFormatError("missing transcript header");
    std::string first;
    ls >> first;
    std::string pf, qf;
    if (first == "rec") {
      ls >> pf >> qf;
      Recommendation<S> rec;
      rec.p = detail::parse_vector_field<S>(pf, "p");
      rec.q = detail::parse_vector_field<S>(qf, "q");
      t.recommendation = std::move(rec);
      continue;
    }
    QueryRecord<S> r;
    r.t = std::stoi(first);
    std::string lpf, lqf;
    ls >> pf >> qf >> lpf >> lqf;
    r.p = detail::parse_vector_field<S>(pf, "p");
    r.q = detail::parse_vector_field<S>(qf, "q");
    r.loss_p = detail::parse_vector_field<S>(lpf, "loss_p");
    r.loss_q = detail::parse_vector_field<S>(lqf, "loss_q");
    t.rounds.push_back(std::move(r));
  }
  return t;
}

template <class S>
std::string transcript_to_string(const Transcript<S>& t) {
  std::ostringstream os;
  write_transcript(os, t);
  return os.str();
}

}  // namespace gq
