#include "blockstrat/contexts.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

namespace blockstrat {

namespace {

constexpr std::array<int, kFeatureCount> kArity = {2, 2, 2, 2, 3, 2, 2, 2, 2};

int dir_value(Direction d) { return d == Direction::Up ? value::kUp : value::kDown; }
int outcome_value(Outcome o) { return o == Outcome::Right ? value::kRight : value::kWrong; }

int majority_up(const PlayerHistory& h, int first_round, int last_round) {
  int up = 0, down = 0;
  for (int r = first_round; r <= last_round; ++r) {
    (h.at_round(r).market_move == Direction::Up ? up : down) += 1;
  }
  return up >= down ? value::kUp : value::kDown;
}

}  // namespace

int arity(Feature f) { return kArity[static_cast<std::size_t>(f)]; }

char tag(Feature f) { return static_cast<char>('A' + static_cast<int>(f)); }

std::optional<Feature> feature_from_tag(char c) {
  if (c < 'A' || c > 'I') return std::nullopt;
  return static_cast<Feature>(c - 'A');
}

std::string value_label(Feature f, int v) {
  switch (f) {
    case Feature::C:
    case Feature::I:
      return v == value::kRight ? "RIGHT" : "WRONG";
    case Feature::D:
      return v == value::kYes ? "YES" : "NO";
    case Feature::E:
      return v == value::kAdviceUp ? "UP" : v == value::kNotConsulted ? "NC" : "DOWN";
    default:
      return v == value::kUp ? "UP" : "DOWN";
  }
}

std::optional<int> parse_value_label(Feature f, std::string_view s) {
  for (int v = 0; v < arity(f); ++v) {
    if (value_label(f, v) == s) return v;
  }
  return std::nullopt;
}

FeatureValues derive_features(const PlayerHistory& history, int t) {
  const DecisionRecord& now = history.at_round(t);
  FeatureValues fv;
  fv[static_cast<std::size_t>(Feature::D)] = now.expert_consulted ? value::kYes : value::kNo;
  fv[static_cast<std::size_t>(Feature::E)] =
      now.expert_advice ? (*now.expert_advice == Direction::Up ? value::kAdviceUp
                                                               : value::kAdviceDown)
                        : value::kNotConsulted;
  if (t >= 2) {
    const DecisionRecord& prev = history.at_round(t - 1);
    const int b = dir_value(prev.market_move);
    const int c = outcome_value(prev.outcome());
    fv[static_cast<std::size_t>(Feature::B)] = b;
    fv[static_cast<std::size_t>(Feature::C)] = c;
    // The previous guess equals the previous market move iff it was right.
    fv[static_cast<std::size_t>(Feature::A)] = c == value::kRight ? b : 1 - b;
    fv[static_cast<std::size_t>(Feature::G)] = majority_up(history, 1, t - 1);
  }
  if (t >= 3) {
    const DecisionRecord& prev2 = history.at_round(t - 2);
    fv[static_cast<std::size_t>(Feature::H)] = dir_value(prev2.market_move);
    fv[static_cast<std::size_t>(Feature::I)] = outcome_value(prev2.outcome());
  }
  if (t > kTrendWindow) {
    fv[static_cast<std::size_t>(Feature::F)] = majority_up(history, t - kTrendWindow, t - 1);
  }
  return fv;
}

std::optional<int> ContextKey::value(Feature f) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] == f) return values[i];
  }
  return std::nullopt;
}

ContextSchema::ContextSchema(std::vector<Feature> features) : features_(std::move(features)) {
  std::set<Feature> seen;
  long count = 1;
  for (Feature f : features_) {
    if (!seen.insert(f).second) {
      throw std::invalid_argument(std::string("repeated feature ") + tag(f) + " in schema");
    }
    count *= arity(f);
    if (count > kMaxContexts) break;
  }
  if (count < 2 || count > kMaxContexts) {
    throw std::invalid_argument("schema " + tags() + " defines " + std::to_string(count) +
                                " contexts; allowed range is [2, " +
                                std::to_string(kMaxContexts) + "]");
  }
  count_ = static_cast<int>(count);
}

ContextSchema ContextSchema::from_tags(std::string_view tags) {
  std::vector<Feature> features;
  for (char c : tags) {
    auto f = feature_from_tag(c);
    if (!f) throw std::invalid_argument("unknown feature tag '" + std::string(1, c) + "'");
    features.push_back(*f);
  }
  if (features.empty()) throw std::invalid_argument("empty schema");
  return ContextSchema(std::move(features));
}

std::string ContextSchema::tags() const {
  std::string s;
  for (Feature f : features_) s += tag(f);
  return s;
}

bool ContextSchema::contains(Feature f) const {
  return std::find(features_.begin(), features_.end(), f) != features_.end();
}

std::optional<int> ContextSchema::encode(const FeatureValues& fv) const {
  int code = 0;
  for (Feature f : features_) {
    auto v = get(fv, f);
    if (!v) return std::nullopt;
    code = code * arity(f) + *v;
  }
  return code;
}

int ContextSchema::encode(const ContextKey& key) const {
  if (key.features != features_) throw std::invalid_argument("context key from another schema");
  int code = 0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (key.values[i] < 0 || key.values[i] >= arity(features_[i])) {
      throw std::out_of_range("feature value outside arity");
    }
    code = code * arity(features_[i]) + key.values[i];
  }
  return code;
}

ContextKey ContextSchema::decode(int code) const {
  if (code < 0 || (structured() && code >= count_)) {
    throw std::out_of_range("context code " + std::to_string(code) + " outside schema " +
                            tags());
  }
  ContextKey key{features_, std::vector<int>(features_.size())};
  for (std::size_t i = features_.size(); i-- > 0;) {
    key.values[i] = code % arity(features_[i]);
    code /= arity(features_[i]);
  }
  return key;
}

std::string ContextSchema::context_label(int code) const {
  if (!structured()) return "c" + std::to_string(code);
  ContextKey key = decode(code);
  std::string s;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (i) s += ',';
    s += tag(features_[i]);
    s += '=';
    s += value_label(features_[i], key.values[i]);
  }
  return s;
}

int ContextSchema::parse_context_label(std::string_view label) const {
  auto bad = [&] { return std::invalid_argument("bad context label '" + std::string(label) + "'"); };
  if (!structured()) {
    if (label.size() < 2 || label[0] != 'c') throw bad();
    try {
      return std::stoi(std::string(label.substr(1)));
    } catch (const std::exception&) {
      throw bad();
    }
  }
  ContextKey key{features_, {}};
  std::size_t pos = 0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    std::size_t end = label.find(',', pos);
    std::string_view part = label.substr(pos, end == std::string_view::npos ? end : end - pos);
    if (part.size() < 3 || part[0] != tag(features_[i]) || part[1] != '=') throw bad();
    auto v = parse_value_label(features_[i], part.substr(2));
    if (!v) throw bad();
    key.values.push_back(*v);
    if (end == std::string_view::npos) {
      if (i + 1 != features_.size()) throw bad();
    } else {
      pos = end + 1;
    }
  }
  return encode(key);
}

const std::vector<std::string>& default_schema_spec() {
  // Every non-trivial subset of {B, C, E}, then round t-1 information extended
  // by the player's guess (A), consultation (D), trends (F, G) and deeper
  // lookback (H, I).
  static const std::vector<std::string> spec = {
      "B",    "C",    "E",    "BC",   "BE",   "CE",   "BCE",  "A",
      "AE",   "ABE",  "ACE",  "D",    "BD",   "BCD",  "BCF",  "BCEF",
      "BCG",  "BCEG", "BCH",  "BCEH", "BCI",  "BCEI", "BCEHI",
  };
  return spec;
}

std::vector<ContextSchema> enumerate_schemas(const std::vector<std::string>& spec) {
  std::vector<ContextSchema> out;
  std::set<std::string> seen;
  for (const auto& tags : spec) {
    ContextSchema schema = ContextSchema::from_tags(tags);
    std::string sorted = schema.tags();
    std::sort(sorted.begin(), sorted.end());
    if (!seen.insert(sorted).second) {
      throw std::invalid_argument("duplicate schema " + tags);
    }
    out.push_back(std::move(schema));
  }
  return out;
}

std::vector<std::string> read_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file " + path);
  std::vector<std::string> spec;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    spec.push_back(line.substr(first, last - first + 1));
  }
  return spec;
}

}  // namespace blockstrat
