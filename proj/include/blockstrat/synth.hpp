#pragma once

// Synthetic decision logs from planted strategy mixtures, and planted
// block-model networks. Both serve as ground truth for the fitting code.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blockstrat/ingest.hpp"
#include "blockstrat/matrix.hpp"
#include "blockstrat/mmsbm.hpp"
#include "blockstrat/network.hpp"
#include "blockstrat/sbm.hpp"

namespace blockstrat {

enum class Strategy { Switch, Optimist, Repeat, Wsls, ExpertFollower };

inline constexpr std::size_t kStrategyCount = 5;
inline constexpr std::array<Strategy, kStrategyCount> kStrategies = {
    Strategy::Switch, Strategy::Optimist, Strategy::Repeat, Strategy::Wsls,
    Strategy::ExpertFollower,
};

const char* to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

using MixtureWeights = std::array<double, kStrategyCount>;

// `count` consecutive players sharing one mixture.
struct MixtureGroup {
  std::size_t count = 0;
  MixtureWeights weights{};
};

struct PlantedSpec {
  int rounds = 25;
  int sessions = 1;
  std::vector<MixtureGroup> groups;
  double market_up_probability = 0.5;
  std::vector<Direction> market_replay;  // when non-empty, replayed in every session
  double consult_probability = 0.3;
  double expert_accuracy = 0.6;
  // Probability that a guess is replaced by a fair coin flip.
  double tremble = 0.0;
  std::uint64_t seed = 0;

  std::size_t players() const;
  // Throws std::invalid_argument.
  void validate() const;
};

// Prescribed guess of a strategy, or nullopt when it does not apply (no
// previous round, or no advice for the expert follower).
std::optional<Direction> strategy_prescription(Strategy s, const DecisionRecord* previous,
                                               const std::optional<Direction>& advice);

// Histories sorted the way parse_log returns them. Session ids are s01, s02,
// ...; player ids p001, p002, ... in mixture-group order, assigned to
// sessions round-robin.
std::vector<PlayerHistory> generate(const PlantedSpec& spec);

struct BlockPlantedSpec {
  std::vector<std::size_t> players_per_group;
  std::vector<std::size_t> contexts_per_group;
  Matrix prob;  // groups x context groups, probability of UP
  int observations_per_cell = 50;
  std::uint64_t seed = 0;
};

struct PlantedNetwork {
  ObservationSet data;
  DecisionNetwork network;
  MmsbmParams params;       // one-hot memberships with the planted probabilities
  HardPartition partition;  // planted groups
};

PlantedNetwork generate_block_network(const BlockPlantedSpec& spec);

}  // namespace blockstrat
