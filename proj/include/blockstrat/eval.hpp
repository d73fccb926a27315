#pragma once

// Cross-validated accuracy, representation comparison and K/L grid search.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "blockstrat/matrix.hpp"
#include "blockstrat/mmsbm.hpp"
#include "blockstrat/network.hpp"
#include "blockstrat/sbm.hpp"

namespace blockstrat {

// Fold labels keyed by record id; -1 marks records outside the split.
struct FoldSplit {
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold_of_record;

  int fold_of(std::size_t record_id) const {
    return record_id < fold_of_record.size() ? fold_of_record[record_id] : -1;
  }
  std::vector<std::size_t> fold_sizes() const;
};

// Seeded split stratified by player: each player's records are shuffled and
// dealt round-robin, so fold sizes differ by at most one and a player with at
// least two records keeps training data in every fold. Throws
// std::invalid_argument unless 2 <= folds <= number of records.
FoldSplit kfold_split(std::span<const Observation> records, int folds, std::uint64_t seed);
FoldSplit kfold_split(const DecisionNetwork& network, int folds, std::uint64_t seed);
// Splits every round of every history, independent of any schema, so that
// all schemas share the same held-out records.
FoldSplit kfold_split(const std::vector<PlayerHistory>& histories, int folds, std::uint64_t seed);

struct NaiveModel {};
struct SbmModel {
  int K = 1;
  int L = 1;
  AnnealConfig config;
};
struct MmsbmModel {
  int K = 1;
  int L = 1;
  FitConfig config;
};
using ModelSpec = std::variant<NaiveModel, SbmModel, MmsbmModel>;

std::string describe(const ModelSpec& model);

using Predictor = std::function<Prediction(const Observation&)>;
// Builds a predictor from the training network of fold `fold`.
using Trainer = std::function<Predictor(const DecisionNetwork& train, int fold)>;

// Stochastic fits inside fold f use a seed derived from the model's seed and f.
Trainer make_trainer(const ModelSpec& model);

// Per-fold accuracy over the observations whose record falls in the split.
// A fold with no held-out observations scores NaN. Throws DataError on a fold
// with an empty training side.
std::vector<double> cv_accuracy(const ObservationSet& data, const ContextSchema& schema,
                                const FoldSplit& split, const Trainer& trainer);
std::vector<double> cv_accuracy(const ObservationSet& data, const ContextSchema& schema,
                                const FoldSplit& split, const ModelSpec& model);
std::vector<double> cv_accuracy(const std::vector<PlayerHistory>& histories,
                                const ContextSchema& schema, const ModelSpec& model,
                                const FoldSplit& split);

double mean(const std::vector<double>& values);

// Q(a, b) = mean over folds of log(acc[a][f] / acc[b][f]). Cells touching a
// zero or missing accuracy are NaN. Antisymmetric by construction.
Matrix q_matrix(const std::vector<std::vector<double>>& accuracies);

struct RepresentationReport {
  std::vector<std::string> schemas;
  std::vector<std::vector<double>> accuracies;  // [schema][fold]
  std::vector<double> means;
  std::vector<std::size_t> usable_records;
  Matrix q;
};

RepresentationReport compare_representations(const std::vector<PlayerHistory>& histories,
                                             const std::vector<ContextSchema>& schemas,
                                             const ModelSpec& model, const FoldSplit& split);

struct GridCell {
  int K = 0;
  int L = 0;
  std::vector<double> accuracies;
  double mean = 0.0;
};

struct GridResult {
  int best_K = 0;
  int best_L = 0;
  double tie_tolerance = 0.0;
  std::vector<GridCell> cells;
};

inline constexpr double kDefaultTieTolerance = 0.005;

// Among cells within `tie_tolerance` of the best mean accuracy, picks the
// smallest K + L, then the smallest K.
GridResult grid_select(const ObservationSet& data, const ContextSchema& schema,
                       const std::vector<int>& Ks, const std::vector<int>& Ls,
                       const FoldSplit& split, const FitConfig& config,
                       double tie_tolerance = kDefaultTieTolerance);
GridResult grid_select(const std::vector<PlayerHistory>& histories, const ContextSchema& schema,
                       const std::vector<int>& Ks, const std::vector<int>& Ls,
                       const FoldSplit& split, const FitConfig& config,
                       double tie_tolerance = kDefaultTieTolerance);

// Picks the grid winner from already-evaluated cells.
void select_best(GridResult& grid);

}  // namespace blockstrat
