#pragma once

// Mixed-membership bipartite stochastic block model over a DecisionNetwork.
//
//   P(UP | p, c) = sum_k sum_l theta[p][k] * prob[k][l] * eta[c][l]
//
// Parameters are fitted by expectation maximization on the aggregated
// (player, context, guess) counts.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blockstrat/matrix.hpp"
#include "blockstrat/network.hpp"
#include "blockstrat/random.hpp"

namespace blockstrat {

inline constexpr double kDefaultEpsilon = 1e-12;

struct MmsbmParams {
  int K = 0;
  int L = 0;
  Matrix theta;  // players x K
  Matrix eta;    // contexts x L
  Matrix prob;   // K x L, probability of guessing UP

  std::size_t players() const { return theta.rows(); }
  std::size_t contexts() const { return eta.rows(); }

  // Throws std::invalid_argument on a shape mismatch, an entry outside
  // [0, 1], or a membership row whose sum is off by more than `tol`.
  void validate(double tol = 1e-9) const;
};

// Rows of theta and eta uniform on the simplex, prob entries uniform on (0, 1).
MmsbmParams random_params(std::size_t players, std::size_t contexts, int K, int L, Rng& rng);

// Player and context are network node indices. Throws std::out_of_range.
double link_probability(const MmsbmParams& params, std::size_t player, std::size_t context,
                        Direction guess);

// sum over cells of n_up log P(UP) + n_down log P(DOWN), with P clamped to
// [eps, 1 - eps]. Throws std::invalid_argument on a dimension mismatch.
double log_posterior(const MmsbmParams& params, const DecisionNetwork& network,
                     double eps = kDefaultEpsilon);

struct EmStep {
  MmsbmParams params;
  double log_posterior = 0.0;
};

// One E-step followed by the closed-form M-step. Throws DataError if a node
// has no observations.
EmStep em_step(const MmsbmParams& params, const DecisionNetwork& network,
               double eps = kDefaultEpsilon);

struct FitConfig {
  int max_iterations = 1000;
  double rel_tolerance = 1e-8;
  int restarts = 10;
  std::uint64_t seed = 0;
  double epsilon = kDefaultEpsilon;

  void validate() const;
};

struct RunTrace {
  std::uint64_t seed = 0;
  std::vector<double> log_posteriors;  // after initialization and each M-step
  int iterations = 0;
  bool converged = false;
};

struct FitDiagnostics {
  std::vector<RunTrace> runs;
  std::size_t best_run = 0;
  int K = 0;  // after clamping
  int L = 0;
  std::vector<std::string> warnings;
};

struct FitResult {
  MmsbmParams params;
  double log_posterior = 0.0;
  FitDiagnostics diagnostics;
};

// Best of `config.restarts` EM runs. K and L larger than the node counts are
// clamped with a warning; non-convergence is reported in the diagnostics.
FitResult fit(const DecisionNetwork& network, int K, int L, const FitConfig& config);

// Runs EM from the given starting point (one restart).
RunTrace run_em(MmsbmParams& params, const DecisionNetwork& network, const FitConfig& config);

struct Prediction {
  Direction direction = Direction::Up;
  bool fallback = false;  // unknown player or context: global default UP
};

// UP iff P(UP) >= 0.5. A missing node index yields the UP fallback.
Prediction predict(const MmsbmParams& params, std::optional<std::size_t> player,
                   std::optional<std::size_t> context);

// Looks up the network nodes for an external player id and context code.
Prediction predict(const MmsbmParams& params, const DecisionNetwork& network,
                   std::size_t external_player, int context_code);

// Relabels groups: new group i is old group perm[i].
MmsbmParams permute_groups(const MmsbmParams& params, const std::vector<int>& player_perm,
                           const std::vector<int>& context_perm);

}  // namespace blockstrat
