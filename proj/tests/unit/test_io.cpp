#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "blockstrat/io.hpp"
#include "blockstrat/synth.hpp"
#include "oracles.hpp"

using namespace blockstrat;

namespace {

std::vector<PlayerHistory> synthetic(std::uint64_t seed) {
  PlantedSpec spec;
  spec.groups = {{12, {0.2, 0.2, 0.2, 0.2, 0.2}}};
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST(Numbers, RoundToTwelveDigits) {
  EXPECT_EQ(round_significant(0.1234567890123456), 0.123456789012);
  EXPECT_EQ(round_significant(-3.0), -3.0);
  EXPECT_EQ(round_significant(0.0), 0.0);
  EXPECT_TRUE(number(std::nan("")).is_null());
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(std::nan("")), "");
}

TEST(Numbers, DumpIsCanonical) {
  Json a = {{"b", number(1.0 / 3.0)}, {"a", 2}};
  EXPECT_EQ(a.dump(), R"({"a":2,"b":0.333333333333})");
}

TEST(MatrixJson, RoundTrip) {
  Matrix m(2, 3);
  m(0, 1) = 0.25;
  m(1, 2) = std::nan("");
  Matrix back = matrix_from_json(to_json(m));
  EXPECT_EQ(back.rows(), 2u);
  EXPECT_EQ(back(0, 1), 0.25);
  EXPECT_TRUE(std::isnan(back(1, 2)));
  EXPECT_THROW(matrix_from_json(Json::parse("[[1,2],[3]]")), DataError);
}

TEST(SavedModel, RoundTripKeepsParameters) {
  const auto net = build_network(synthetic(1), ContextSchema::from_tags("BCE"));
  FitConfig config;
  config.restarts = 2;
  config.seed = 4;
  const auto result = fit(net, 3, 4, config);
  const SavedModel saved = make_saved_model(net, result, config);
  const Json j = to_json(saved);
  for (const char* key : {"K", "L", "theta", "eta", "p", "player_index", "context_index", "config",
                          "final_log_posterior"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const SavedModel back = saved_model_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.schema, saved.schema);
  EXPECT_EQ(back.player_index, saved.player_index);
  EXPECT_EQ(back.context_codes, saved.context_codes);
  EXPECT_EQ(back.config.seed, 4u);
  EXPECT_NEAR(log_posterior(back.params, net), result.log_posterior, 1e-8);
  // Serializing the loaded model again gives the same document.
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(SavedModel, RejectsInconsistentFiles) {
  Json j = Json::parse(R"({"K":1,"L":1,"theta":[[1]],"eta":[[1]],"p":[[0.5]],
                           "player_index":["s/p","s/q"],"context_index":["B=UP"],"schema":"B"})");
  EXPECT_THROW(saved_model_from_json(j), DataError);
  j["player_index"] = {"s/p"};
  EXPECT_NO_THROW(saved_model_from_json(j));
  j["theta"] = Json::parse("[[0.7]]");
  EXPECT_THROW(saved_model_from_json(j), DataError);
  j.erase("theta");
  EXPECT_THROW(saved_model_from_json(j), DataError);
}

TEST(SavedPartition, RoundTrip) {
  SavedPartition s{ContextSchema::from_tags("BC"), HardPartition{2, 1, {0, 1, 1}, {0, 0}},
                   Matrix(2, 1, 0.5), {"a", "b", "c"}, {0, 3}, -12.5};
  const auto back = saved_partition_from_json(Json::parse(to_json(s).dump()));
  EXPECT_EQ(back.partition, s.partition);
  EXPECT_EQ(back.context_codes, s.context_codes);
  EXPECT_EQ(back.player_index, s.player_index);
  EXPECT_EQ(back.log_posterior, -12.5);
}

TEST(PlantedSpecJson, RoundTrip) {
  const Json j = Json::parse(R"({"rounds": 10, "sessions": 2, "tremble": 0.1,
      "groups": [{"count": 3, "weights": {"WSLS": 0.5, "REPEAT": 0.5}}],
      "market_replay": ["UP","DOWN","UP","UP","UP","DOWN","UP","UP","UP","UP"]})");
  const PlantedSpec spec = planted_spec_from_json(j);
  EXPECT_EQ(spec.rounds, 10);
  EXPECT_EQ(spec.players(), 3u);
  EXPECT_EQ(spec.groups[0].weights[static_cast<std::size_t>(Strategy::Wsls)], 0.5);
  EXPECT_EQ(spec.market_replay.size(), 10u);
  EXPECT_EQ(to_json(planted_spec_from_json(to_json(spec))), to_json(spec));
}

TEST(PlantedSpecJson, Errors) {
  EXPECT_THROW(planted_spec_from_json(Json::parse(R"({"groups":[{"count":1,"weights":{"HERD":1}}]})")),
               DataError);
  EXPECT_THROW(planted_spec_from_json(Json::parse(R"({"groups":[{"count":1,"weights":{"WSLS":0.4}}]})")),
               DataError);
  EXPECT_THROW(planted_spec_from_json(Json::parse(R"({"rounds":3})")), DataError);
}

TEST(MatrixCsv, LayoutWithLabels) {
  Matrix m(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = -0.25;
  m(0, 1) = std::nan("");
  std::ostringstream out;
  write_matrix_csv(out, "schema", {"B", "C"}, {"B", "C"}, m);
  EXPECT_EQ(out.str(), "schema,B,C\nB,0.5,\nC,0,-0.25\n");
}

TEST(ReportJson, StrategyReportFields) {
  const auto net = build_network(synthetic(2), ContextSchema::from_tags("BCE"));
  FitConfig config;
  config.restarts = 1;
  const auto result = fit(net, 2, 3, config);
  const Json j = to_json(analyze(result.params, net), net);
  for (const char* key : {"phat", "M", "labels", "entropy", "classes", "D"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["labels"].size(), 2u);
  EXPECT_EQ(j["entropy"].size(), net.players());
}
