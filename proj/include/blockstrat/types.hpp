#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace blockstrat {

enum class Direction : std::uint8_t { Up, Down };

enum class Outcome : std::uint8_t { Right, Wrong };

constexpr Direction opposite(Direction d) {
  return d == Direction::Up ? Direction::Down : Direction::Up;
}

inline const char* to_string(Direction d) { return d == Direction::Up ? "UP" : "DOWN"; }
inline const char* to_string(Outcome o) { return o == Outcome::Right ? "RIGHT" : "WRONG"; }

inline std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "UP") return Direction::Up;
  if (s == "DOWN") return Direction::Down;
  return std::nullopt;
}

// Bad input data (malformed logs, corrupt networks, unreadable files).
// Programming/usage errors use std::invalid_argument / std::out_of_range.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blockstrat
