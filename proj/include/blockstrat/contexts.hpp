#pragma once

// Information features visible to a player before a guess, and the schemas
// that combine them into discrete contexts.
//
// Feature values are small integers:
//   A, B, F, G, H : 0 = UP, 1 = DOWN
//   C, I          : 0 = RIGHT, 1 = WRONG
//   D             : 0 = NO (expert not consulted), 1 = YES
//   E             : 0 = UP, 1 = NC (not consulted), 2 = DOWN

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockstrat/ingest.hpp"

namespace blockstrat {

enum class Feature : std::uint8_t {
  A,  // player's guess at t-1
  B,  // market move at t-1
  C,  // outcome of the guess at t-1
  D,  // expert consulted at t
  E,  // advice seen at t (UP / NC / DOWN)
  F,  // majority market direction over t-5..t-1
  G,  // majority market direction over 1..t-1
  H,  // market move at t-2
  I,  // outcome of the guess at t-2
};

inline constexpr std::size_t kFeatureCount = 9;
inline constexpr int kMaxContexts = 64;
inline constexpr int kTrendWindow = 5;

namespace value {
inline constexpr int kUp = 0;
inline constexpr int kDown = 1;
inline constexpr int kRight = 0;
inline constexpr int kWrong = 1;
inline constexpr int kNo = 0;
inline constexpr int kYes = 1;
inline constexpr int kAdviceUp = 0;
inline constexpr int kNotConsulted = 1;
inline constexpr int kAdviceDown = 2;
}  // namespace value

int arity(Feature f);
char tag(Feature f);
std::optional<Feature> feature_from_tag(char c);
std::string value_label(Feature f, int v);
std::optional<int> parse_value_label(Feature f, std::string_view s);

// Values of all nine features at one round; nullopt where the lookback
// reaches before round 1.
using FeatureValues = std::array<std::optional<int>, kFeatureCount>;

inline std::optional<int> get(const FeatureValues& fv, Feature f) {
  return fv[static_cast<std::size_t>(f)];
}

// `round` is 1-based; throws std::out_of_range outside the history.
FeatureValues derive_features(const PlayerHistory& history, int round);

struct ContextKey {
  std::vector<Feature> features;
  std::vector<int> values;

  std::optional<int> value(Feature f) const;
  friend bool operator==(const ContextKey&, const ContextKey&) = default;
};

// Ordered list of distinct features. Context codes are mixed-radix with the
// first feature most significant, so sorting codes gives the canonical order.
// A default-constructed schema is "unstructured": contexts are opaque codes
// (used for planted networks that do not come from decision logs).
class ContextSchema {
 public:
  ContextSchema() = default;
  explicit ContextSchema(std::vector<Feature> features);
  // Throws std::invalid_argument on unknown or repeated tags, or on a context
  // count outside [2, kMaxContexts].
  static ContextSchema from_tags(std::string_view tags);

  const std::vector<Feature>& features() const { return features_; }
  bool structured() const { return !features_.empty(); }
  std::string tags() const;
  int context_count() const { return count_; }
  bool contains(Feature f) const;

  // nullopt when any schema feature is undefined.
  std::optional<int> encode(const FeatureValues& fv) const;
  int encode(const ContextKey& key) const;
  ContextKey decode(int code) const;

  std::string context_label(int code) const;
  int parse_context_label(std::string_view label) const;

  friend bool operator==(const ContextSchema& a, const ContextSchema& b) {
    return a.features_ == b.features_;
  }

 private:
  std::vector<Feature> features_;
  int count_ = 0;
};

// The 23 default representations, as tag strings.
const std::vector<std::string>& default_schema_spec();

// Throws std::invalid_argument on an invalid tag list or when two entries
// name the same feature set.
std::vector<ContextSchema> enumerate_schemas(const std::vector<std::string>& spec);

// One tag string per line; blank lines and '#' comments are ignored.
std::vector<std::string> read_schema_file(const std::string& path);

}  // namespace blockstrat
