#include "blockstrat/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>

#include "blockstrat/parallel.hpp"
#include "blockstrat/random.hpp"

namespace blockstrat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Keeps fold seeds of different models apart from the fit's own restart streams.
std::uint64_t fold_seed(std::uint64_t seed, int fold) {
  return derive_seed(seed, 0x10000 + static_cast<std::uint64_t>(fold));
}

}  // namespace

std::vector<std::size_t> FoldSplit::fold_sizes() const {
  std::vector<std::size_t> sizes(folds, 0);
  for (int f : fold_of_record) {
    if (f >= 0) ++sizes[f];
  }
  return sizes;
}

FoldSplit kfold_split(std::span<const Observation> records, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("need at least 2 folds");
  if (records.size() < static_cast<std::size_t>(folds)) {
    throw std::invalid_argument("too few records (" + std::to_string(records.size()) + ") for " +
                                std::to_string(folds) + " folds");
  }
  std::map<std::size_t, std::vector<std::size_t>> by_player;
  std::size_t max_id = 0;
  for (const Observation& o : records) {
    by_player[o.player].push_back(o.record_id);
    max_id = std::max(max_id, o.record_id);
  }
  FoldSplit split{folds, seed, std::vector<int>(max_id + 1, -1)};
  Rng rng(seed);
  std::size_t position = 0;
  for (auto& [player, ids] : by_player) {
    std::sort(ids.begin(), ids.end());
    rng.shuffle(std::span<std::size_t>(ids));
    for (std::size_t id : ids) {
      if (split.fold_of_record[id] != -1) {
        throw std::invalid_argument("duplicate record id " + std::to_string(id));
      }
      split.fold_of_record[id] = static_cast<int>(position++ % folds);
    }
  }
  return split;
}

FoldSplit kfold_split(const DecisionNetwork& network, int folds, std::uint64_t seed) {
  return kfold_split(std::span<const Observation>(network.provenance()), folds, seed);
}

FoldSplit kfold_split(const std::vector<PlayerHistory>& histories, int folds,
                      std::uint64_t seed) {
  std::vector<Observation> all;
  std::size_t record_id = 0;
  for (std::size_t h = 0; h < histories.size(); ++h) {
    for (const auto& r : histories[h].records) {
      all.push_back({record_id++, h, 0, r.round, r.guess});
    }
  }
  return kfold_split(std::span<const Observation>(all), folds, seed);
}

std::string describe(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NaiveModel>) {
          return "naive";
        } else if constexpr (std::is_same_v<T, SbmModel>) {
          return "sbm(" + std::to_string(m.K) + "," + std::to_string(m.L) + ")";
        } else {
          return "mmsbm(" + std::to_string(m.K) + "," + std::to_string(m.L) + ")";
        }
      },
      model);
}

Trainer make_trainer(const ModelSpec& model) {
  return std::visit(
      [](const auto& m) -> Trainer {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NaiveModel>) {
          return [](const DecisionNetwork& train, int) -> Predictor {
            return [&train](const Observation& o) {
              return naive_predict(train, o.player, o.context);
            };
          };
        } else if constexpr (std::is_same_v<T, SbmModel>) {
          return [m](const DecisionNetwork& train, int fold) -> Predictor {
            AnnealConfig config = m.config;
            config.seed = fold_seed(m.config.seed, fold);
            const int K = std::min<int>(m.K, static_cast<int>(train.players()));
            const int L = std::min<int>(m.L, static_cast<int>(train.contexts()));
            auto params = std::make_shared<MmsbmParams>(
                to_params(anneal_fit(train, K, L, config).partition, train));
            return [params, &train](const Observation& o) {
              return predict(*params, train, o.player, o.context);
            };
          };
        } else {
          return [m](const DecisionNetwork& train, int fold) -> Predictor {
            FitConfig config = m.config;
            config.seed = fold_seed(m.config.seed, fold);
            auto params = std::make_shared<MmsbmParams>(fit(train, m.K, m.L, config).params);
            return [params, &train](const Observation& o) {
              return predict(*params, train, o.player, o.context);
            };
          };
        }
      },
      model);
}

std::vector<double> cv_accuracy(const ObservationSet& data, const ContextSchema& schema,
                                const FoldSplit& split, const Trainer& trainer) {
  std::vector<double> accuracy(split.folds, kNaN);
  parallel_for(static_cast<std::size_t>(split.folds), [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    std::vector<Observation> train, test;
    for (const Observation& o : data.observations) {
      (split.fold_of(o.record_id) == fold ? test : train).push_back(o);
    }
    if (train.empty()) {
      throw DataError("fold " + std::to_string(fold) + " has an empty training side");
    }
    if (test.empty()) return;
    const DecisionNetwork net = DecisionNetwork::build(train, schema, data.player_labels);
    const Predictor predictor = trainer(net, fold);
    std::size_t correct = 0;
    for (const Observation& o : test) {
      if (predictor(o).direction == o.guess) ++correct;
    }
    accuracy[f] = static_cast<double>(correct) / static_cast<double>(test.size());
  });
  return accuracy;
}

std::vector<double> cv_accuracy(const ObservationSet& data, const ContextSchema& schema,
                                const FoldSplit& split, const ModelSpec& model) {
  return cv_accuracy(data, schema, split, make_trainer(model));
}

std::vector<double> cv_accuracy(const std::vector<PlayerHistory>& histories,
                                const ContextSchema& schema, const ModelSpec& model,
                                const FoldSplit& split) {
  return cv_accuracy(extract_observations(histories, schema), schema, split, model);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return kNaN;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

Matrix q_matrix(const std::vector<std::vector<double>>& accuracies) {
  const std::size_t n = accuracies.size();
  Matrix q(n, n, 0.0);
  if (n == 0) return q;
  const std::size_t folds = accuracies.front().size();
  for (const auto& row : accuracies) {
    if (row.size() != folds) throw std::invalid_argument("accuracy rows differ in fold count");
  }
  auto usable = [](double a) { return std::isfinite(a) && a > 0.0; };
  for (std::size_t a = 0; a < n; ++a) {
    bool ok = folds > 0 && std::all_of(accuracies[a].begin(), accuracies[a].end(), usable);
    if (!ok) q(a, a) = kNaN;
    for (std::size_t b = a + 1; b < n; ++b) {
      double value = kNaN;
      if (ok && std::all_of(accuracies[b].begin(), accuracies[b].end(), usable)) {
        double sum = 0.0;
        for (std::size_t f = 0; f < folds; ++f) sum += std::log(accuracies[a][f] / accuracies[b][f]);
        value = sum / static_cast<double>(folds);
      }
      q(a, b) = value;
      q(b, a) = -value;
    }
  }
  return q;
}

RepresentationReport compare_representations(const std::vector<PlayerHistory>& histories,
                                             const std::vector<ContextSchema>& schemas,
                                             const ModelSpec& model, const FoldSplit& split) {
  RepresentationReport report;
  report.accuracies.resize(schemas.size());
  report.usable_records.resize(schemas.size());
  const Trainer trainer = make_trainer(model);
  parallel_for(schemas.size(), [&](std::size_t s) {
    ObservationSet data = extract_observations(histories, schemas[s]);
    report.usable_records[s] = data.observations.size();
    report.accuracies[s] = cv_accuracy(data, schemas[s], split, trainer);
  });
  for (std::size_t s = 0; s < schemas.size(); ++s) {
    report.schemas.push_back(schemas[s].tags());
    report.means.push_back(mean(report.accuracies[s]));
  }
  report.q = q_matrix(report.accuracies);
  return report;
}

void select_best(GridResult& grid) {
  if (grid.cells.empty()) throw std::invalid_argument("empty grid");
  double best = -std::numeric_limits<double>::infinity();
  for (const GridCell& cell : grid.cells) {
    if (std::isfinite(cell.mean)) best = std::max(best, cell.mean);
  }
  const GridCell* chosen = nullptr;
  for (const GridCell& cell : grid.cells) {
    if (!std::isfinite(cell.mean) || cell.mean < best - grid.tie_tolerance) continue;
    if (!chosen || cell.K + cell.L < chosen->K + chosen->L ||
        (cell.K + cell.L == chosen->K + chosen->L && cell.K < chosen->K)) {
      chosen = &cell;
    }
  }
  if (!chosen) throw DataError("no grid cell has a finite accuracy");
  grid.best_K = chosen->K;
  grid.best_L = chosen->L;
}

GridResult grid_select(const ObservationSet& data, const ContextSchema& schema,
                       const std::vector<int>& Ks, const std::vector<int>& Ls,
                       const FoldSplit& split, const FitConfig& config, double tie_tolerance) {
  if (Ks.empty() || Ls.empty()) throw std::invalid_argument("empty K or L range");
  GridResult grid;
  grid.tie_tolerance = tie_tolerance;
  for (int K : Ks) {
    for (int L : Ls) grid.cells.push_back({K, L, {}, 0.0});
  }
  parallel_for(grid.cells.size(), [&](std::size_t i) {
    GridCell& cell = grid.cells[i];
    cell.accuracies = cv_accuracy(data, schema, split, MmsbmModel{cell.K, cell.L, config});
    cell.mean = mean(cell.accuracies);
  });
  select_best(grid);
  return grid;
}

GridResult grid_select(const std::vector<PlayerHistory>& histories, const ContextSchema& schema,
                       const std::vector<int>& Ks, const std::vector<int>& Ls,
                       const FoldSplit& split, const FitConfig& config, double tie_tolerance) {
  return grid_select(extract_observations(histories, schema), schema, Ks, Ls, split, config,
                     tie_tolerance);
}

}  // namespace blockstrat
