#include "blockstrat/sbm.hpp"

#include <cmath>
#include <stdexcept>

#include "blockstrat/random.hpp"

namespace blockstrat {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double block_term(double up, double down) { return xlogx(up) + xlogx(down) - xlogx(up + down); }

// Incremental state of the annealer: block counts and per-move deltas.
class BlockState {
 public:
  BlockState(const DecisionNetwork& net, HardPartition partition)
      : net_(net),
        part_(std::move(partition)),
        up_(part_.K * part_.L, 0),
        down_(part_.K * part_.L, 0),
        du_(std::max(part_.K, part_.L), 0),
        dd_(std::max(part_.K, part_.L), 0) {
    std::size_t total = 0;
    for (std::size_t p = 0; p < net.players(); ++p) {
      for (std::size_t c = 0; c < net.contexts(); ++c) {
        const int b = block(part_.group_of_player[p], part_.group_of_context[c]);
        up_[b] += net.n_up(p, c);
        down_[b] += net.n_down(p, c);
        total += net.total(p, c);
      }
    }
    xlogx_.resize(total + 1);
    for (std::size_t n = 0; n <= total; ++n) xlogx_[n] = xlogx(static_cast<double>(n));
  }

  const HardPartition& partition() const { return part_; }

  double objective() const {
    double sum = 0.0;
    for (std::size_t b = 0; b < up_.size(); ++b) sum += term(up_[b], down_[b]);
    return sum;
  }

  // Change in objective if player p moves to group `to`; fills du_/dd_ with
  // p's counts per context group.
  double player_delta(std::size_t p, int to) {
    const int from = part_.group_of_player[p];
    std::fill(du_.begin(), du_.begin() + part_.L, 0);
    std::fill(dd_.begin(), dd_.begin() + part_.L, 0);
    for (std::size_t c = 0; c < net_.contexts(); ++c) {
      du_[part_.group_of_context[c]] += net_.n_up(p, c);
      dd_[part_.group_of_context[c]] += net_.n_down(p, c);
    }
    double delta = 0.0;
    for (int l = 0; l < part_.L; ++l) {
      if (du_[l] == 0 && dd_[l] == 0) continue;
      const int a = block(from, l), b = block(to, l);
      delta += term(up_[a] - du_[l], down_[a] - dd_[l]) - term(up_[a], down_[a]);
      delta += term(up_[b] + du_[l], down_[b] + dd_[l]) - term(up_[b], down_[b]);
    }
    return delta;
  }

  double context_delta(std::size_t c, int to) {
    const int from = part_.group_of_context[c];
    std::fill(du_.begin(), du_.begin() + part_.K, 0);
    std::fill(dd_.begin(), dd_.begin() + part_.K, 0);
    for (std::size_t p = 0; p < net_.players(); ++p) {
      du_[part_.group_of_player[p]] += net_.n_up(p, c);
      dd_[part_.group_of_player[p]] += net_.n_down(p, c);
    }
    double delta = 0.0;
    for (int k = 0; k < part_.K; ++k) {
      if (du_[k] == 0 && dd_[k] == 0) continue;
      const int a = block(k, from), b = block(k, to);
      delta += term(up_[a] - du_[k], down_[a] - dd_[k]) - term(up_[a], down_[a]);
      delta += term(up_[b] + du_[k], down_[b] + dd_[k]) - term(up_[b], down_[b]);
    }
    return delta;
  }

  // Must directly follow the matching *_delta call.
  void apply_player(std::size_t p, int to) {
    const int from = part_.group_of_player[p];
    for (int l = 0; l < part_.L; ++l) {
      up_[block(from, l)] -= du_[l];
      down_[block(from, l)] -= dd_[l];
      up_[block(to, l)] += du_[l];
      down_[block(to, l)] += dd_[l];
    }
    part_.group_of_player[p] = to;
  }

  void apply_context(std::size_t c, int to) {
    const int from = part_.group_of_context[c];
    for (int k = 0; k < part_.K; ++k) {
      up_[block(k, from)] -= du_[k];
      down_[block(k, from)] -= dd_[k];
      up_[block(k, to)] += du_[k];
      down_[block(k, to)] += dd_[k];
    }
    part_.group_of_context[c] = to;
  }

 private:
  int block(int k, int l) const { return k * part_.L + l; }
  double term(int up, int down) const {
    return xlogx_[up] + xlogx_[down] - xlogx_[up + down];
  }

  const DecisionNetwork& net_;
  HardPartition part_;
  std::vector<int> up_, down_;
  std::vector<int> du_, dd_;
  std::vector<double> xlogx_;
};

struct Move {
  bool is_player = true;
  std::size_t node = 0;
  int to = 0;
};

}  // namespace

void HardPartition::validate(const DecisionNetwork& network) const {
  if (K < 1 || L < 1) throw std::invalid_argument("partition K and L must be >= 1");
  if (group_of_player.size() != network.players() ||
      group_of_context.size() != network.contexts()) {
    throw std::invalid_argument("partition does not match network dimensions");
  }
  for (int g : group_of_player) {
    if (g < 0 || g >= K) throw std::invalid_argument("player group out of range");
  }
  for (int g : group_of_context) {
    if (g < 0 || g >= L) throw std::invalid_argument("context group out of range");
  }
}

double partition_log_posterior(const HardPartition& partition, const DecisionNetwork& network) {
  partition.validate(network);
  std::vector<double> up(partition.K * partition.L, 0.0), down(up.size(), 0.0);
  for (std::size_t p = 0; p < network.players(); ++p) {
    for (std::size_t c = 0; c < network.contexts(); ++c) {
      const int b = partition.group_of_player[p] * partition.L + partition.group_of_context[c];
      up[b] += network.n_up(p, c);
      down[b] += network.n_down(p, c);
    }
  }
  double sum = 0.0;
  for (std::size_t b = 0; b < up.size(); ++b) sum += block_term(up[b], down[b]);
  return sum;
}

MmsbmParams to_params(const HardPartition& partition, const DecisionNetwork& network) {
  partition.validate(network);
  const int K = partition.K, L = partition.L;
  MmsbmParams params{K, L, Matrix(network.players(), K), Matrix(network.contexts(), L),
                     Matrix(K, L)};
  Matrix up(K, L), all(K, L);
  for (std::size_t p = 0; p < network.players(); ++p) {
    params.theta(p, partition.group_of_player[p]) = 1.0;
    for (std::size_t c = 0; c < network.contexts(); ++c) {
      up(partition.group_of_player[p], partition.group_of_context[c]) += network.n_up(p, c);
      all(partition.group_of_player[p], partition.group_of_context[c]) += network.total(p, c);
    }
  }
  for (std::size_t c = 0; c < network.contexts(); ++c) {
    params.eta(c, partition.group_of_context[c]) = 1.0;
  }
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) params.prob(k, l) = all(k, l) > 0 ? up(k, l) / all(k, l) : 0.5;
  }
  return params;
}

void AnnealConfig::validate() const {
  if (!(cooling > 0.0 && cooling < 1.0)) throw std::invalid_argument("cooling must be in (0, 1)");
  if (!(stop_temperature > 0.0)) throw std::invalid_argument("stop temperature must be > 0");
  if (initial_temperature > 0.0 && !(stop_temperature < initial_temperature)) {
    throw std::invalid_argument("stop temperature must be below the initial temperature");
  }
  if (probe_moves < 1) throw std::invalid_argument("probe_moves must be >= 1");
}

AnnealResult anneal_fit(const DecisionNetwork& network, int K, int L, const AnnealConfig& config) {
  config.validate();
  if (K < 1 || L < 1) throw std::invalid_argument("K and L must be >= 1");
  if (static_cast<std::size_t>(K) > network.players() ||
      static_cast<std::size_t>(L) > network.contexts()) {
    throw std::invalid_argument("K exceeds players or L exceeds contexts");
  }
  Rng rng(config.seed);
  HardPartition initial{K, L, std::vector<int>(network.players()),
                        std::vector<int>(network.contexts())};
  for (int& g : initial.group_of_player) g = static_cast<int>(rng.below(K));
  for (int& g : initial.group_of_context) g = static_cast<int>(rng.below(L));

  BlockState state(network, initial);
  AnnealResult result{initial, {}};
  auto& diag = result.diagnostics;
  diag.initial_objective = state.objective();
  diag.best_objective = diag.initial_objective;
  if (K == 1 && L == 1) return result;

  const std::size_t P = network.players(), C = network.contexts();
  auto propose = [&]() {
    Move m;
    const std::size_t movable_players = K > 1 ? P : 0, movable_contexts = L > 1 ? C : 0;
    const std::size_t pick = rng.below(movable_players + movable_contexts);
    m.is_player = pick < movable_players;
    m.node = m.is_player ? pick : pick - movable_players;
    const int groups = m.is_player ? K : L;
    const int current = m.is_player ? state.partition().group_of_player[m.node]
                                    : state.partition().group_of_context[m.node];
    m.to = static_cast<int>(rng.below(groups - 1));
    if (m.to >= current) ++m.to;
    return m;
  };
  auto delta_of = [&](const Move& m) {
    return m.is_player ? state.player_delta(m.node, m.to) : state.context_delta(m.node, m.to);
  };

  double temperature = config.initial_temperature;
  if (temperature <= 0.0) {
    // Half of the downhill probe moves should be accepted at the start.
    double worse_sum = 0.0;
    int worse = 0;
    for (int i = 0; i < config.probe_moves; ++i) {
      const double d = delta_of(propose());
      if (d < 0.0) {
        worse_sum += -d;
        ++worse;
      }
    }
    temperature = worse > 0 ? (worse_sum / worse) / std::log(2.0) : 1.0;
    temperature = std::max(temperature, 10.0 * config.stop_temperature);
  }
  diag.initial_temperature = temperature;

  const std::size_t per_temperature = config.moves_per_temperature > 0
                                          ? static_cast<std::size_t>(config.moves_per_temperature)
                                          : 10 * (P + C);
  double current = diag.initial_objective;
  double best = current;
  while (temperature > config.stop_temperature) {
    for (std::size_t i = 0; i < per_temperature; ++i) {
      const Move m = propose();
      const double d = delta_of(m);
      ++diag.moves;
      if (d >= 0.0 || rng.uniform() < std::exp(d / temperature)) {
        if (m.is_player) {
          state.apply_player(m.node, m.to);
        } else {
          state.apply_context(m.node, m.to);
        }
        ++diag.accepted;
        current += d;
        if (current > best + 1e-12) {
          best = current;
          result.partition = state.partition();
        }
      }
    }
    temperature *= config.cooling;
    ++diag.temperatures;
  }
  diag.best_objective = partition_log_posterior(result.partition, network);
  return result;
}

Prediction naive_predict(const DecisionNetwork& train, std::size_t external_player,
                         int context_code) {
  auto p = train.player_slot(external_player);
  auto c = train.context_slot(context_code);
  if (!p || !c || train.total(*p, *c) == 0) return {Direction::Up, true};
  return {train.n_up(*p, *c) >= train.n_down(*p, *c) ? Direction::Up : Direction::Down, false};
}

}  // namespace blockstrat
