#include "blockstrat/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace blockstrat {

ObservationSet extract_observations(const std::vector<PlayerHistory>& histories,
                                    const ContextSchema& schema) {
  if (!schema.structured()) {
    throw std::invalid_argument("extract_observations needs a feature schema");
  }
  ObservationSet set;
  set.player_labels.reserve(histories.size());
  std::size_t record_id = 0;
  for (std::size_t h = 0; h < histories.size(); ++h) {
    const PlayerHistory& history = histories[h];
    set.player_labels.push_back(history.label());
    for (int t = 1; t <= static_cast<int>(history.size()); ++t, ++record_id) {
      auto code = schema.encode(derive_features(history, t));
      if (!code) {
        ++set.skipped;
        continue;
      }
      set.observations.push_back({record_id, h, *code, t, history.at_round(t).guess});
    }
  }
  return set;
}

DecisionNetwork DecisionNetwork::build(std::span<const Observation> observations,
                                       ContextSchema schema,
                                       std::span<const std::string> player_labels,
                                       std::size_t skipped) {
  DecisionNetwork net;
  net.schema_ = std::move(schema);
  net.skipped_ = skipped;
  net.provenance_.assign(observations.begin(), observations.end());

  for (const Observation& o : observations) {
    if (o.player >= player_labels.size()) {
      throw std::out_of_range("observation references unknown player " +
                              std::to_string(o.player));
    }
    if (o.context < 0 || (net.schema_.structured() && o.context >= net.schema_.context_count())) {
      throw std::out_of_range("observation context code outside schema");
    }
    net.player_ids_.push_back(o.player);
    net.context_codes_.push_back(o.context);
  }
  std::sort(net.player_ids_.begin(), net.player_ids_.end());
  net.player_ids_.erase(std::unique(net.player_ids_.begin(), net.player_ids_.end()),
                        net.player_ids_.end());
  std::sort(net.context_codes_.begin(), net.context_codes_.end());
  net.context_codes_.erase(std::unique(net.context_codes_.begin(), net.context_codes_.end()),
                           net.context_codes_.end());

  for (std::size_t id : net.player_ids_) net.player_labels_.push_back(player_labels[id]);

  const std::size_t P = net.players(), C = net.contexts();
  net.up_.assign(P * C, 0);
  net.down_.assign(P * C, 0);
  net.player_degree_.assign(P, 0);
  net.context_degree_.assign(C, 0);
  for (const Observation& o : observations) {
    const std::size_t p = *net.player_slot(o.player);
    const std::size_t c = *net.context_slot(o.context);
    (o.guess == Direction::Up ? net.up_ : net.down_)[p * C + c] += 1;
    ++net.player_degree_[p];
    ++net.context_degree_[c];
  }
  return net;
}

std::optional<std::size_t> DecisionNetwork::player_slot(std::size_t external_id) const {
  auto it = std::lower_bound(player_ids_.begin(), player_ids_.end(), external_id);
  if (it == player_ids_.end() || *it != external_id) return std::nullopt;
  return static_cast<std::size_t>(it - player_ids_.begin());
}

std::optional<std::size_t> DecisionNetwork::context_slot(int code) const {
  auto it = std::lower_bound(context_codes_.begin(), context_codes_.end(), code);
  if (it == context_codes_.end() || *it != code) return std::nullopt;
  return static_cast<std::size_t>(it - context_codes_.begin());
}

DecisionNetwork build_network(const std::vector<PlayerHistory>& histories,
                              const ContextSchema& schema) {
  ObservationSet set = extract_observations(histories, schema);
  return DecisionNetwork::build(set.observations, schema, set.player_labels, set.skipped);
}

}  // namespace blockstrat
