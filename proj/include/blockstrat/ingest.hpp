#pragma once

// Experiment log ingestion: CSV rows -> per-player round histories.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blockstrat/types.hpp"

namespace blockstrat {

inline constexpr const char* kLogHeader =
    "session_id,player_id,round,guess,market_move,expert_consulted,expert_advice";

struct DecisionRecord {
  std::string session_id;
  std::string player_id;
  int round = 0;  // 1-based
  Direction guess = Direction::Up;
  Direction market_move = Direction::Up;
  bool expert_consulted = false;
  std::optional<Direction> expert_advice;  // present iff expert_consulted

  Outcome outcome() const {
    return guess == market_move ? Outcome::Right : Outcome::Wrong;
  }

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

// All rounds of one player in one session, sorted by round (1, 2, ..., n).
struct PlayerHistory {
  std::string session_id;
  std::string player_id;
  std::vector<DecisionRecord> records;

  std::size_t size() const { return records.size(); }
  // `round` is 1-based.
  const DecisionRecord& at_round(int round) const;
  std::string label() const { return session_id + "/" + player_id; }

  friend bool operator==(const PlayerHistory&, const PlayerHistory&) = default;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class LogFormat { Csv };

// Histories come back sorted by (session_id, player_id). Throws ParseError
// on a malformed row, a duplicate (session, player, round), advice without
// consultation, or a non-contiguous round range.
std::vector<PlayerHistory> parse_log(std::istream& in, LogFormat format = LogFormat::Csv);
std::vector<PlayerHistory> read_log_file(const std::string& path);

void write_log(std::ostream& out, const std::vector<PlayerHistory>& histories);
void write_log_file(const std::string& path, const std::vector<PlayerHistory>& histories);

std::size_t total_records(const std::vector<PlayerHistory>& histories);

struct SummaryStats {
  std::size_t players = 0;
  std::size_t sessions = 0;
  std::size_t records = 0;
  std::size_t min_rounds = 0;
  std::size_t max_rounds = 0;
  double up_fraction = 0.0;
  double market_up_fraction = 0.0;
  double consulted_fraction = 0.0;
  // Fraction of consulted rounds where the advice matched the market move;
  // empty when the expert was never consulted.
  std::optional<double> expert_accuracy;
};

// Throws DataError on empty input.
SummaryStats dataset_summary(const std::vector<PlayerHistory>& histories);

}  // namespace blockstrat
