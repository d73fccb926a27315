#pragma once

// Bipartite player x context network of UP/DOWN guess counts.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blockstrat/contexts.hpp"
#include "blockstrat/ingest.hpp"

namespace blockstrat {

// One usable round under a schema.
struct Observation {
  std::size_t record_id = 0;  // position in the flattened input records
  std::size_t player = 0;     // external player id (index into the history list)
  int context = 0;            // context code under the schema
  int round = 0;
  Direction guess = Direction::Up;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct ObservationSet {
  std::vector<Observation> observations;
  std::vector<std::string> player_labels;  // indexed by external player id
  std::size_t skipped = 0;                 // rounds with an undefined schema feature
};

// Record ids are assigned in history order: history h, round t maps to
// (sum of sizes of histories before h) + t - 1.
ObservationSet extract_observations(const std::vector<PlayerHistory>& histories,
                                    const ContextSchema& schema);

class DecisionNetwork {
 public:
  DecisionNetwork() = default;

  // Players and contexts with at least one observation become nodes, in
  // ascending external-id / code order.
  static DecisionNetwork build(std::span<const Observation> observations, ContextSchema schema,
                               std::span<const std::string> player_labels,
                               std::size_t skipped = 0);

  std::size_t players() const { return player_ids_.size(); }
  std::size_t contexts() const { return context_codes_.size(); }
  std::size_t observation_count() const { return provenance_.size(); }
  bool empty() const { return provenance_.empty(); }

  int n_up(std::size_t p, std::size_t c) const { return up_[p * contexts() + c]; }
  int n_down(std::size_t p, std::size_t c) const { return down_[p * contexts() + c]; }
  int total(std::size_t p, std::size_t c) const { return n_up(p, c) + n_down(p, c); }
  int count(std::size_t p, std::size_t c, Direction g) const {
    return g == Direction::Up ? n_up(p, c) : n_down(p, c);
  }
  int player_degree(std::size_t p) const { return player_degree_[p]; }
  int context_degree(std::size_t c) const { return context_degree_[c]; }

  std::size_t external_player(std::size_t p) const { return player_ids_[p]; }
  int context_code(std::size_t c) const { return context_codes_[c]; }
  const std::string& player_label(std::size_t p) const { return player_labels_[p]; }
  const std::vector<std::string>& player_labels() const { return player_labels_; }
  const std::vector<int>& context_codes() const { return context_codes_; }
  std::string context_label(std::size_t c) const {
    return schema_.context_label(context_codes_[c]);
  }

  std::optional<std::size_t> player_slot(std::size_t external_id) const;
  std::optional<std::size_t> context_slot(int code) const;

  const ContextSchema& schema() const { return schema_; }
  const std::vector<Observation>& provenance() const { return provenance_; }
  std::size_t skipped() const { return skipped_; }

 private:
  ContextSchema schema_;
  std::vector<std::size_t> player_ids_;
  std::vector<std::string> player_labels_;
  std::vector<int> context_codes_;
  std::vector<int> up_, down_;
  std::vector<int> player_degree_, context_degree_;
  std::vector<Observation> provenance_;
  std::size_t skipped_ = 0;
};

DecisionNetwork build_network(const std::vector<PlayerHistory>& histories,
                              const ContextSchema& schema);

}  // namespace blockstrat
