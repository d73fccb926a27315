#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "blockstrat/eval.hpp"
#include "blockstrat/synth.hpp"
#include "oracles.hpp"

using namespace blockstrat;

namespace {

std::vector<PlayerHistory> synthetic(std::size_t players, std::uint64_t seed) {
  PlantedSpec spec;
  spec.sessions = 2;
  spec.groups = {{players / 2, {0, 0, 0, 1, 0}}, {players - players / 2, {0.5, 0, 0.5, 0, 0}}};
  spec.tremble = 0.1;
  spec.seed = seed;
  return generate(spec);
}

ObservationSet line_of_records(std::size_t n, std::size_t players) {
  ObservationSet set;
  for (std::size_t p = 0; p < players; ++p) set.player_labels.push_back("p" + std::to_string(p));
  for (std::size_t i = 0; i < n; ++i) {
    set.observations.push_back({i, i % players, static_cast<int>(i % 3), 1,
                                i % 4 == 0 ? Direction::Down : Direction::Up});
  }
  return set;
}

FitConfig quick_config(std::uint64_t seed) {
  FitConfig c;
  c.restarts = 2;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(KfoldSplit, EqualFolds) {
  auto set = line_of_records(100, 7);
  auto split = kfold_split(set.observations, 5, 1);
  EXPECT_EQ(split.fold_sizes(), std::vector<std::size_t>(5, 20));
}

TEST(KfoldSplit, SizesDifferByAtMostOne) {
  for (std::size_t n : {11u, 37u, 99u}) {
    auto split = kfold_split(line_of_records(n, 4).observations, 5, n);
    auto sizes = split.fold_sizes();
    EXPECT_LE(*std::max_element(sizes.begin(), sizes.end()) -
                  *std::min_element(sizes.begin(), sizes.end()),
              1u);
    std::size_t total = 0;
    for (auto s : sizes) total += s;
    EXPECT_EQ(total, n);
  }
}

TEST(KfoldSplit, DeterministicUnderSeed) {
  auto set = line_of_records(200, 9);
  EXPECT_EQ(kfold_split(set.observations, 5, 3).fold_of_record,
            kfold_split(set.observations, 5, 3).fold_of_record);
  EXPECT_NE(kfold_split(set.observations, 5, 3).fold_of_record,
            kfold_split(set.observations, 5, 4).fold_of_record);
}

TEST(KfoldSplit, EveryPlayerTrainsInEveryFold) {
  const auto hs = synthetic(60, 2);
  const auto data = extract_observations(hs, ContextSchema::from_tags("BCE"));
  const auto split = kfold_split(hs, 5, 7);
  for (int f = 0; f < 5; ++f) {
    std::set<std::size_t> seen;
    for (const auto& o : data.observations) {
      if (split.fold_of(o.record_id) != f) seen.insert(o.player);
    }
    EXPECT_EQ(seen.size(), hs.size()) << "fold " << f;
  }
}

TEST(KfoldSplit, StratifiedPerPlayer) {
  const auto hs = synthetic(20, 3);
  const auto split = kfold_split(hs, 5, 1);
  for (std::size_t h = 0; h < hs.size(); ++h) {
    std::vector<int> per_fold(5, 0);
    for (std::size_t t = 0; t < 25; ++t) ++per_fold[split.fold_of(h * 25 + t)];
    for (int n : per_fold) EXPECT_EQ(n, 5);
  }
}

TEST(KfoldSplit, Errors) {
  auto set = line_of_records(4, 2);
  EXPECT_THROW(kfold_split(set.observations, 5, 1), std::invalid_argument);
  EXPECT_THROW(kfold_split(set.observations, 1, 1), std::invalid_argument);
  set.observations.push_back(set.observations.front());
  EXPECT_THROW(kfold_split(set.observations, 2, 1), std::invalid_argument);
}

TEST(CvAccuracy, PerfectOracleScoresOne) {
  const auto hs = synthetic(20, 4);
  const auto schema = ContextSchema::from_tags("BCE");
  const auto data = extract_observations(hs, schema);
  std::map<std::size_t, Direction> truth;
  for (const auto& o : data.observations) truth[o.record_id] = o.guess;
  Trainer oracle_trainer = [&](const DecisionNetwork&, int) -> Predictor {
    return [&](const Observation& o) { return Prediction{truth.at(o.record_id), false}; };
  };
  for (double a : cv_accuracy(data, schema, kfold_split(hs, 5, 1), oracle_trainer)) {
    EXPECT_DOUBLE_EQ(a, 1.0);
  }
}

TEST(CvAccuracy, ConstantUpScoresHeldOutUpFraction) {
  const auto hs = synthetic(20, 5);
  const auto schema = ContextSchema::from_tags("BC");
  const auto data = extract_observations(hs, schema);
  const auto split = kfold_split(hs, 5, 2);
  Trainer up = [](const DecisionNetwork&, int) -> Predictor {
    return [](const Observation&) { return Prediction{Direction::Up, false}; };
  };
  auto acc = cv_accuracy(data, schema, split, up);
  for (int f = 0; f < 5; ++f) {
    double n = 0, ups = 0;
    for (const auto& o : data.observations) {
      if (split.fold_of(o.record_id) != f) continue;
      ++n;
      ups += o.guess == Direction::Up;
    }
    EXPECT_DOUBLE_EQ(acc[f], ups / n);
  }
}

TEST(CvAccuracy, HeldOutRecordsNeverReachTraining) {
  const auto hs = synthetic(16, 6);
  const auto schema = ContextSchema::from_tags("BCE");
  const auto data = extract_observations(hs, schema);
  const auto split = kfold_split(hs, 5, 3);
  std::vector<std::size_t> train_sizes(5);
  Trainer spy = [&](const DecisionNetwork& train, int fold) -> Predictor {
    for (const auto& o : train.provenance()) EXPECT_NE(split.fold_of(o.record_id), fold);
    train_sizes[fold] = train.observation_count();
    return [](const Observation&) { return Prediction{}; };
  };
  cv_accuracy(data, schema, split, spy);
  for (int f = 0; f < 5; ++f) {
    std::size_t expect = 0;
    for (const auto& o : data.observations) expect += split.fold_of(o.record_id) != f;
    EXPECT_EQ(train_sizes[f], expect);
  }
}

TEST(CvAccuracy, SingleGroupMmsbmMatchesMajorityModel) {
  const auto hs = synthetic(30, 7);
  const auto schema = ContextSchema::from_tags("BCE");
  const auto data = extract_observations(hs, schema);
  const auto split = kfold_split(hs, 5, 4);
  Trainer majority = [](const DecisionNetwork& train, int) -> Predictor {
    double up = 0;
    for (const auto& o : train.provenance()) up += o.guess == Direction::Up;
    const bool pick_up = 2 * up >= static_cast<double>(train.observation_count());
    return [pick_up](const Observation&) {
      return Prediction{pick_up ? Direction::Up : Direction::Down, false};
    };
  };
  auto a = cv_accuracy(data, schema, split, MmsbmModel{1, 1, quick_config(1)});
  auto b = cv_accuracy(data, schema, split, majority);
  for (int f = 0; f < 5; ++f) EXPECT_NEAR(a[f], b[f], 1e-12);
}

TEST(CvAccuracy, AccuraciesInUnitInterval) {
  const auto hs = synthetic(24, 8);
  const auto split = kfold_split(hs, 5, 5);
  for (const ModelSpec& m : {ModelSpec{NaiveModel{}}, ModelSpec{SbmModel{2, 3, AnnealConfig{}}},
                             ModelSpec{MmsbmModel{2, 3, quick_config(2)}}}) {
    for (double a : cv_accuracy(hs, ContextSchema::from_tags("BCE"), m, split)) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
  }
}

TEST(CvAccuracy, DeterministicAcrossRuns) {
  const auto hs = synthetic(24, 9);
  const auto split = kfold_split(hs, 5, 6);
  const auto schema = ContextSchema::from_tags("BCE");
  EXPECT_EQ(cv_accuracy(hs, schema, MmsbmModel{2, 2, quick_config(3)}, split),
            cv_accuracy(hs, schema, MmsbmModel{2, 2, quick_config(3)}, split));
}

TEST(CvAccuracy, EmptyTrainingSideThrows) {
  auto set = line_of_records(10, 1);
  FoldSplit split{2, 0, std::vector<int>(10, 0)};
  EXPECT_THROW(cv_accuracy(set, ContextSchema{}, split, NaiveModel{}), DataError);
}

TEST(CvAccuracy, FoldWithoutHeldOutRecordsIsNan) {
  auto set = line_of_records(10, 2);
  FoldSplit split{3, 0, std::vector<int>(10, 0)};
  for (int i = 0; i < 5; ++i) split.fold_of_record[i] = 1;
  auto acc = cv_accuracy(set, ContextSchema{}, split, NaiveModel{});
  EXPECT_FALSE(std::isnan(acc[0]));
  EXPECT_FALSE(std::isnan(acc[1]));
  EXPECT_TRUE(std::isnan(acc[2]));
}

TEST(QMatrix, Examples) {
  EXPECT_EQ(q_matrix({{0.6, 0.7}, {0.6, 0.7}})(0, 1), 0.0);
  auto q = q_matrix({{0.6}, {0.5}});
  EXPECT_NEAR(q(0, 1), std::log(1.2), 1e-15);
  EXPECT_NEAR(q(0, 1), 0.1823, 1e-4);
  EXPECT_EQ(q(1, 0), -q(0, 1));
}

TEST(QMatrix, AntisymmetricWithZeroDiagonal) {
  Rng rng(10);
  std::vector<std::vector<double>> acc(6, std::vector<double>(5));
  for (auto& row : acc) {
    for (double& a : row) a = 0.3 + 0.6 * rng.uniform();
  }
  auto q = q_matrix(acc);
  for (std::size_t a = 0; a < 6; ++a) {
    EXPECT_EQ(q(a, a), 0.0);
    for (std::size_t b = 0; b < 6; ++b) EXPECT_EQ(q(a, b), -q(b, a));
  }
}

TEST(QMatrix, ZeroAccuracyMarksCellsUndefined) {
  auto q = q_matrix({{0.5, 0.0}, {0.6, 0.7}, {0.4, 0.5}});
  EXPECT_TRUE(std::isnan(q(0, 1)));
  EXPECT_TRUE(std::isnan(q(1, 0)));
  EXPECT_TRUE(std::isnan(q(0, 0)));
  EXPECT_FALSE(std::isnan(q(1, 2)));
  EXPECT_THROW(q_matrix({{0.5}, {0.5, 0.6}}), std::invalid_argument);
}

TEST(CompareRepresentations, SharedFoldsAndPerSchemaRecords) {
  const auto hs = synthetic(20, 11);
  const auto schemas = enumerate_schemas({"BC", "BCE", "BCEH"});
  const auto report =
      compare_representations(hs, schemas, NaiveModel{}, kfold_split(hs, 5, 1));
  EXPECT_EQ(report.schemas, (std::vector<std::string>{"BC", "BCE", "BCEH"}));
  EXPECT_EQ(report.usable_records[0], 20u * 24);
  EXPECT_EQ(report.usable_records[2], 20u * 23);
  EXPECT_EQ(report.q.rows(), 3u);
  for (std::size_t s = 0; s < 3; ++s) {
    EXPECT_EQ(report.accuracies[s],
              cv_accuracy(hs, schemas[s], NaiveModel{}, kfold_split(hs, 5, 1)));
  }
}

TEST(SelectBest, TieRulePrefersSimplerModels) {
  GridResult g;
  g.tie_tolerance = 0.005;
  g.cells = {{1, 1, {}, 0.60}, {2, 3, {}, 0.700}, {3, 2, {}, 0.698},
             {4, 8, {}, 0.703}, {2, 2, {}, 0.69}};
  select_best(g);
  EXPECT_EQ(g.best_K, 2);
  EXPECT_EQ(g.best_L, 3);
  g.tie_tolerance = 0.0;
  select_best(g);
  EXPECT_EQ(g.best_K, 4);
  EXPECT_EQ(g.best_L, 8);
}

TEST(SelectBest, IgnoresUndefinedCells) {
  GridResult g;
  g.cells = {{1, 1, {}, std::nan("")}, {2, 2, {}, 0.5}};
  select_best(g);
  EXPECT_EQ(g.best_K, 2);
  g.cells = {{1, 1, {}, std::nan("")}};
  EXPECT_THROW(select_best(g), DataError);
}

TEST(GridSelect, SingleCell) {
  const auto hs = synthetic(12, 12);
  auto g = grid_select(hs, ContextSchema::from_tags("BC"), {1}, {1}, kfold_split(hs, 5, 1),
                       quick_config(1));
  EXPECT_EQ(g.best_K, 1);
  EXPECT_EQ(g.best_L, 1);
  ASSERT_EQ(g.cells.size(), 1u);
}

TEST(GridSelect, PlantedBlocksSelectTwoByTwo) {
  BlockPlantedSpec spec;
  spec.players_per_group = {6, 6};
  spec.contexts_per_group = {3, 3};
  spec.prob = Matrix(2, 2);
  spec.prob(0, 0) = 0.95;
  spec.prob(0, 1) = 0.05;
  spec.prob(1, 0) = 0.05;
  spec.prob(1, 1) = 0.95;
  spec.observations_per_cell = 20;
  spec.seed = 4;
  auto planted = generate_block_network(spec);
  auto g = grid_select(planted.data, ContextSchema{}, {1, 2, 3}, {1, 2, 3},
                       kfold_split(planted.data.observations, 5, 1), quick_config(1));
  EXPECT_EQ(g.best_K, 2);
  EXPECT_EQ(g.best_L, 2);
  EXPECT_EQ(g.cells.size(), 9u);
}

TEST(GridSelect, EmptyRangeThrows) {
  const auto hs = synthetic(12, 13);
  EXPECT_THROW(grid_select(hs, ContextSchema::from_tags("BC"), {}, {1}, kfold_split(hs, 5, 1),
                           quick_config(1)),
               std::invalid_argument);
}

TEST(Mean, Basics) {
  EXPECT_DOUBLE_EQ(mean({0.5, 0.7}), 0.6);
  EXPECT_TRUE(std::isnan(mean({})));
}
