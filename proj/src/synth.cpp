#include "blockstrat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blockstrat/random.hpp"

namespace blockstrat {

namespace {

std::string padded(char prefix, std::size_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(1, prefix) + digits;
}

std::size_t digits_for(std::size_t n, std::size_t minimum) {
  return std::max(minimum, std::to_string(n).size());
}

std::vector<Direction> market_series(const PlantedSpec& spec, int session) {
  if (!spec.market_replay.empty()) {
    return {spec.market_replay.begin(), spec.market_replay.begin() + spec.rounds};
  }
  Rng rng(derive_seed(spec.seed, 0x5E55'0000'0000ULL + static_cast<std::uint64_t>(session)));
  std::vector<Direction> series;
  for (int t = 0; t < spec.rounds; ++t) {
    series.push_back(rng.bernoulli(spec.market_up_probability) ? Direction::Up : Direction::Down);
  }
  return series;
}

Strategy sample_strategy(const MixtureWeights& w, Rng& rng) {
  double u = rng.uniform();
  for (std::size_t i = 0; i < kStrategyCount; ++i) {
    if (u < w[i]) return kStrategies[i];
    u -= w[i];
  }
  // Rounding leftovers land on the last strategy with positive weight.
  for (std::size_t i = kStrategyCount; i-- > 0;) {
    if (w[i] > 0.0) return kStrategies[i];
  }
  return Strategy::Optimist;
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Switch: return "SWITCH";
    case Strategy::Optimist: return "OPTIMIST";
    case Strategy::Repeat: return "REPEAT";
    case Strategy::Wsls: return "WSLS";
    case Strategy::ExpertFollower: return "EXP";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (Strategy st : kStrategies) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

std::size_t PlantedSpec::players() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.count;
  return n;
}

void PlantedSpec::validate() const {
  auto probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0, 1]");
  };
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (sessions < 1) throw std::invalid_argument("sessions must be >= 1");
  if (groups.empty() || players() == 0) throw std::invalid_argument("no players in spec");
  for (const auto& g : groups) {
    double sum = 0.0;
    for (double w : g.weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("mixture weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must sum to 1");
  }
  probability(market_up_probability, "market_up_probability");
  probability(consult_probability, "consult_probability");
  probability(expert_accuracy, "expert_accuracy");
  probability(tremble, "tremble");
  if (!market_replay.empty() && market_replay.size() < static_cast<std::size_t>(rounds)) {
    throw std::invalid_argument("replayed market series shorter than the number of rounds");
  }
}

std::optional<Direction> strategy_prescription(Strategy s, const DecisionRecord* previous,
                                               const std::optional<Direction>& advice) {
  switch (s) {
    case Strategy::Optimist:
      return Direction::Up;
    case Strategy::ExpertFollower:
      return advice;
    case Strategy::Switch:
      if (!previous) return std::nullopt;
      return opposite(previous->guess);
    case Strategy::Repeat:
      if (!previous) return std::nullopt;
      return previous->guess;
    case Strategy::Wsls:
      if (!previous) return std::nullopt;
      return previous->market_move;
  }
  return std::nullopt;
}

std::vector<PlayerHistory> generate(const PlantedSpec& spec) {
  spec.validate();
  const std::size_t n_players = spec.players();
  const std::size_t player_width = digits_for(n_players, 3);
  const std::size_t session_width = digits_for(static_cast<std::size_t>(spec.sessions), 2);

  std::vector<std::vector<Direction>> markets;
  for (int s = 0; s < spec.sessions; ++s) markets.push_back(market_series(spec, s));

  std::vector<PlayerHistory> out;
  out.reserve(n_players);
  std::size_t index = 0;
  for (const MixtureGroup& group : spec.groups) {
    for (std::size_t i = 0; i < group.count; ++i, ++index) {
      const int session = static_cast<int>(index % static_cast<std::size_t>(spec.sessions));
      const auto& market = markets[session];
      Rng rng(derive_seed(spec.seed, index));
      PlayerHistory h{padded('s', session + 1, session_width),
                      padded('p', index + 1, player_width), {}};
      for (int t = 1; t <= spec.rounds; ++t) {
        DecisionRecord r;
        r.session_id = h.session_id;
        r.player_id = h.player_id;
        r.round = t;
        r.market_move = market[t - 1];
        r.expert_consulted = rng.bernoulli(spec.consult_probability);
        if (r.expert_consulted) {
          r.expert_advice =
              rng.bernoulli(spec.expert_accuracy) ? r.market_move : opposite(r.market_move);
        }
        const DecisionRecord* previous = t > 1 ? &h.records.back() : nullptr;
        std::optional<Direction> guess;
        for (std::size_t attempt = 0; attempt < kStrategyCount && !guess; ++attempt) {
          guess = strategy_prescription(sample_strategy(group.weights, rng), previous,
                                        r.expert_advice);
        }
        r.guess = guess.value_or(Direction::Up);
        if (spec.tremble > 0.0 && rng.bernoulli(spec.tremble)) {
          r.guess = rng.bernoulli(0.5) ? Direction::Up : Direction::Down;
        }
        h.records.push_back(std::move(r));
      }
      out.push_back(std::move(h));
    }
  }
  std::sort(out.begin(), out.end(), [](const PlayerHistory& a, const PlayerHistory& b) {
    return std::tie(a.session_id, a.player_id) < std::tie(b.session_id, b.player_id);
  });
  return out;
}

PlantedNetwork generate_block_network(const BlockPlantedSpec& spec) {
  const int K = static_cast<int>(spec.players_per_group.size());
  const int L = static_cast<int>(spec.contexts_per_group.size());
  if (K < 1 || L < 1) throw std::invalid_argument("need at least one group on each side");
  if (spec.prob.rows() != static_cast<std::size_t>(K) ||
      spec.prob.cols() != static_cast<std::size_t>(L)) {
    throw std::invalid_argument("prob matrix does not match the group counts");
  }
  if (spec.observations_per_cell < 1) throw std::invalid_argument("observations_per_cell < 1");

  std::vector<int> player_group, context_group;
  for (int k = 0; k < K; ++k) player_group.insert(player_group.end(), spec.players_per_group[k], k);
  for (int l = 0; l < L; ++l) context_group.insert(context_group.end(), spec.contexts_per_group[l], l);
  const std::size_t P = player_group.size(), C = context_group.size();

  PlantedNetwork out;
  for (std::size_t p = 0; p < P; ++p) out.data.player_labels.push_back("p" + std::to_string(p));
  Rng rng(spec.seed);
  std::size_t record = 0;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t c = 0; c < C; ++c) {
      const double up = spec.prob(player_group[p], context_group[c]);
      for (int i = 0; i < spec.observations_per_cell; ++i) {
        const Direction g = rng.bernoulli(up) ? Direction::Up : Direction::Down;
        out.data.observations.push_back({record++, p, static_cast<int>(c), i + 1, g});
      }
    }
  }
  out.network = DecisionNetwork::build(out.data.observations, ContextSchema{},
                                       out.data.player_labels);
  out.params = MmsbmParams{K, L, Matrix(P, K), Matrix(C, L), spec.prob};
  for (std::size_t p = 0; p < P; ++p) out.params.theta(p, player_group[p]) = 1.0;
  for (std::size_t c = 0; c < C; ++c) out.params.eta(c, context_group[c]) = 1.0;
  out.partition = HardPartition{K, L, player_group, context_group};
  return out;
}

}  // namespace blockstrat
