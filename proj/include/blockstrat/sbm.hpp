#pragma once

// Single-membership block model fitted by simulated annealing, and the naive
// per-(player, context) majority baseline.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "blockstrat/mmsbm.hpp"
#include "blockstrat/network.hpp"

namespace blockstrat {

struct HardPartition {
  int K = 0;
  int L = 0;
  std::vector<int> group_of_player;   // network player index -> [0, K)
  std::vector<int> group_of_context;  // network context index -> [0, L)

  void validate(const DecisionNetwork& network) const;
  friend bool operator==(const HardPartition&, const HardPartition&) = default;
};

// Block probabilities are profiled out at their maximum-likelihood values
// (the UP fraction inside each block); empty blocks contribute 0.
double partition_log_posterior(const HardPartition& partition, const DecisionNetwork& network);

// Binary memberships with the profiled block probabilities (0.5 for empty blocks).
MmsbmParams to_params(const HardPartition& partition, const DecisionNetwork& network);

struct AnnealConfig {
  double initial_temperature = 0.0;  // <= 0: calibrate from a probe of random moves
  double cooling = 0.99;
  int moves_per_temperature = 0;     // <= 0: 10 * (players + contexts)
  double stop_temperature = 1e-4;
  int probe_moves = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AnnealDiagnostics {
  double initial_temperature = 0.0;
  double initial_objective = 0.0;
  double best_objective = 0.0;
  std::size_t temperatures = 0;
  std::size_t moves = 0;
  std::size_t accepted = 0;
};

struct AnnealResult {
  HardPartition partition;
  AnnealDiagnostics diagnostics;
};

// Metropolis single-node reassignment with geometric cooling from a uniformly
// random initial partition; returns the best partition visited.
AnnealResult anneal_fit(const DecisionNetwork& network, int K, int L, const AnnealConfig& config);

// Majority guess of the (player, context) cell; UP on ties. Unseen cells
// yield UP flagged as a fallback.
Prediction naive_predict(const DecisionNetwork& train, std::size_t external_player,
                         int context_code);

}  // namespace blockstrat
