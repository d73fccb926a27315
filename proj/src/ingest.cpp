#include "blockstrat/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>

namespace blockstrat {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

Direction field_direction(std::string_view s, std::size_t line, const char* name) {
  auto d = parse_direction(s);
  if (!d) {
    throw ParseError(line, std::string(name) + " must be UP or DOWN, got '" +
                               std::string(s) + "'");
  }
  return *d;
}

DecisionRecord parse_row(std::string_view row, std::size_t line) {
  auto f = split_fields(row);
  if (f.size() != 7) {
    throw ParseError(line, "expected 7 fields, got " + std::to_string(f.size()));
  }
  DecisionRecord r;
  if (f[0].empty()) throw ParseError(line, "empty session_id");
  if (f[1].empty()) throw ParseError(line, "empty player_id");
  r.session_id = std::string(f[0]);
  r.player_id = std::string(f[1]);

  auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), r.round);
  if (ec != std::errc() || ptr != f[2].data() + f[2].size() || r.round < 1) {
    throw ParseError(line, "round must be an integer >= 1, got '" + std::string(f[2]) + "'");
  }
  r.guess = field_direction(f[3], line, "guess");
  r.market_move = field_direction(f[4], line, "market_move");

  if (f[5] == "true") {
    r.expert_consulted = true;
  } else if (f[5] == "false") {
    r.expert_consulted = false;
  } else {
    throw ParseError(line, "expert_consulted must be true or false, got '" +
                               std::string(f[5]) + "'");
  }
  if (!f[6].empty()) r.expert_advice = field_direction(f[6], line, "expert_advice");

  if (r.expert_advice && !r.expert_consulted) {
    throw ParseError(line, "expert_advice present but expert_consulted is false");
  }
  if (!r.expert_advice && r.expert_consulted) {
    throw ParseError(line, "expert_consulted is true but expert_advice is missing");
  }
  return r;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

const DecisionRecord& PlayerHistory::at_round(int round) const {
  if (round < 1 || static_cast<std::size_t>(round) > records.size()) {
    throw std::out_of_range("round " + std::to_string(round) + " outside history of " +
                            std::to_string(records.size()) + " rounds");
  }
  return records[static_cast<std::size_t>(round - 1)];
}

std::vector<PlayerHistory> parse_log(std::istream& in, LogFormat /*format*/) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::vector<std::pair<DecisionRecord, std::size_t>>> grouped;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      std::string_view h = line;
      if (line_no == 1 && h.starts_with("\xEF\xBB\xBF")) h.remove_prefix(3);
      if (h.empty()) continue;
      if (h != kLogHeader) {
        throw ParseError(line_no, "unexpected header '" + std::string(h) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    DecisionRecord r = parse_row(line, line_no);
    grouped[{r.session_id, r.player_id}].emplace_back(std::move(r), line_no);
  }

  std::vector<PlayerHistory> out;
  out.reserve(grouped.size());
  for (auto& [key, rows] : grouped) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.first.round < b.first.round;
    });
    PlayerHistory h{key.first, key.second, {}};
    h.records.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& [rec, at] = rows[i];
      if (i > 0 && rows[i - 1].first.round == rec.round) {
        throw ParseError(at, "duplicate round " + std::to_string(rec.round) + " for " +
                                 h.label());
      }
      if (rec.round != static_cast<int>(i) + 1) {
        throw ParseError(at, "rounds for " + h.label() + " are not contiguous from 1 (round " +
                                 std::to_string(rec.round) + " at position " +
                                 std::to_string(i + 1) + ")");
      }
      h.records.push_back(rec);
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<PlayerHistory> read_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_log(in);
}

void write_log(std::ostream& out, const std::vector<PlayerHistory>& histories) {
  out << kLogHeader << '\n';
  for (const auto& h : histories) {
    for (const auto& r : h.records) {
      out << r.session_id << ',' << r.player_id << ',' << r.round << ',' << to_string(r.guess)
          << ',' << to_string(r.market_move) << ',' << (r.expert_consulted ? "true" : "false")
          << ',' << (r.expert_advice ? to_string(*r.expert_advice) : "") << '\n';
    }
  }
}

void write_log_file(const std::string& path, const std::vector<PlayerHistory>& histories) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_log(out, histories);
}

std::size_t total_records(const std::vector<PlayerHistory>& histories) {
  std::size_t n = 0;
  for (const auto& h : histories) n += h.size();
  return n;
}

SummaryStats dataset_summary(const std::vector<PlayerHistory>& histories) {
  if (histories.empty()) throw DataError("dataset_summary: no histories");
  SummaryStats s;
  std::set<std::string> players, sessions;
  std::size_t up = 0, market_up = 0, consulted = 0, advice_right = 0;
  s.min_rounds = histories.front().size();
  for (const auto& h : histories) {
    players.insert(h.label());
    sessions.insert(h.session_id);
    s.min_rounds = std::min(s.min_rounds, h.size());
    s.max_rounds = std::max(s.max_rounds, h.size());
    for (const auto& r : h.records) {
      ++s.records;
      if (r.guess == Direction::Up) ++up;
      if (r.market_move == Direction::Up) ++market_up;
      if (r.expert_consulted) {
        ++consulted;
        if (r.expert_advice == r.market_move) ++advice_right;
      }
    }
  }
  s.players = players.size();
  s.sessions = sessions.size();
  if (s.records > 0) {
    const double n = static_cast<double>(s.records);
    s.up_fraction = static_cast<double>(up) / n;
    s.market_up_fraction = static_cast<double>(market_up) / n;
    s.consulted_fraction = static_cast<double>(consulted) / n;
  }
  if (consulted > 0) {
    s.expert_accuracy = static_cast<double>(advice_right) / static_cast<double>(consulted);
  }
  return s;
}

}  // namespace blockstrat
