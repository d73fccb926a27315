#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "blockstrat/contexts.hpp"
#include "blockstrat/network.hpp"
#include "blockstrat/random.hpp"
#include "blockstrat/synth.hpp"
#include "oracles.hpp"

using namespace blockstrat;

namespace {

std::vector<PlayerHistory> synthetic(std::size_t players, std::uint64_t seed) {
  PlantedSpec spec;
  spec.sessions = 3;
  spec.groups = {{players, {0.2, 0.2, 0.2, 0.2, 0.2}}};
  spec.tremble = 0.1;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST(Feature, ArityAndTags) {
  EXPECT_EQ(arity(Feature::E), 3);
  for (char c : std::string("ABCDFGHI")) EXPECT_EQ(arity(*feature_from_tag(c)), 2) << c;
  EXPECT_EQ(tag(Feature::H), 'H');
  EXPECT_FALSE(feature_from_tag('J').has_value());
  EXPECT_FALSE(feature_from_tag('b').has_value());
}

TEST(Feature, ValueLabelsRoundTrip) {
  for (char c : std::string("ABCDEFGHI")) {
    const Feature f = *feature_from_tag(c);
    for (int v = 0; v < arity(f); ++v) EXPECT_EQ(parse_value_label(f, value_label(f, v)), v);
  }
  EXPECT_FALSE(parse_value_label(Feature::B, "RIGHT").has_value());
}

TEST(DeriveFeatures, PreviousRoundDefinitions) {
  // Round 1: market UP, guess UP (right). Round 2: advice DOWN.
  auto h = oracle::history("s", "p", "UD", "UU", ".D");
  auto fv = derive_features(h, 2);
  EXPECT_EQ(get(fv, Feature::B), value::kUp);
  EXPECT_EQ(get(fv, Feature::C), value::kRight);
  EXPECT_EQ(get(fv, Feature::E), value::kAdviceDown);
  EXPECT_EQ(get(fv, Feature::A), value::kUp);
  EXPECT_EQ(get(fv, Feature::D), value::kYes);
}

TEST(DeriveFeatures, FirstRoundHasOnlyCurrentInformation) {
  auto h = oracle::history("s", "p", "UDUDUDU", "UUDUDUU");
  auto fv = derive_features(h, 1);
  for (Feature f : {Feature::A, Feature::B, Feature::C, Feature::F, Feature::G, Feature::H,
                    Feature::I}) {
    EXPECT_FALSE(get(fv, f).has_value()) << tag(f);
  }
  EXPECT_EQ(get(fv, Feature::D), value::kNo);
  EXPECT_EQ(get(fv, Feature::E), value::kNotConsulted);
}

TEST(DeriveFeatures, LookbackOfTwoRounds) {
  auto h = oracle::history("s", "p", "UDU", "DDU");
  EXPECT_FALSE(get(derive_features(h, 2), Feature::H).has_value());
  auto fv = derive_features(h, 3);
  EXPECT_EQ(get(fv, Feature::H), value::kDown);
  EXPECT_EQ(get(fv, Feature::I), value::kWrong);  // guess UP, market DOWN at round 1
  EXPECT_EQ(get(fv, Feature::C), value::kRight);  // guess DOWN, market DOWN at round 2
  EXPECT_EQ(get(fv, Feature::A), value::kDown);
}

TEST(DeriveFeatures, FiveRoundTrendMajority) {
  // Rounds 2..6 carry UP,UP,DOWN,UP,DOWN.
  auto h = oracle::history("s", "p", "UUUUUUU", "DUUDUDU");
  EXPECT_EQ(get(derive_features(h, 7), Feature::F), value::kUp);
  EXPECT_FALSE(get(derive_features(h, 5), Feature::F).has_value());
  // Rounds 1..5 are D,U,U,D,U: three UP.
  EXPECT_EQ(get(derive_features(h, 6), Feature::F), value::kUp);
}

TEST(DeriveFeatures, TrendTieGoesUp) {
  auto h = oracle::history("s", "p", "UUU", "UDU");
  EXPECT_EQ(get(derive_features(h, 3), Feature::G), value::kUp);
  auto h2 = oracle::history("s", "p", "UUUU", "DDUU");
  EXPECT_EQ(get(derive_features(h2, 3), Feature::G), value::kDown);
}

TEST(DeriveFeatures, AMatchesPreviousGuessOnSyntheticData) {
  for (const auto& h : synthetic(30, 4)) {
    for (int t = 2; t <= static_cast<int>(h.size()); ++t) {
      const int guess = h.at_round(t - 1).guess == Direction::Up ? value::kUp : value::kDown;
      EXPECT_EQ(get(derive_features(h, t), Feature::A), guess);
    }
  }
}

TEST(DeriveFeatures, OutOfRangeThrows) {
  auto h = oracle::history("s", "p", "UU", "UU");
  EXPECT_THROW(derive_features(h, 0), std::out_of_range);
  EXPECT_THROW(derive_features(h, 3), std::out_of_range);
}

TEST(ContextSchema, BceHasTwelveContexts) {
  auto s = ContextSchema::from_tags("BCE");
  EXPECT_EQ(s.context_count(), 12);
  EXPECT_EQ(s.tags(), "BCE");
  EXPECT_TRUE(s.contains(Feature::E));
  EXPECT_FALSE(s.contains(Feature::A));
}

TEST(ContextSchema, EncodeDecodeRoundTrip) {
  for (const auto& spec : default_schema_spec()) {
    auto s = ContextSchema::from_tags(spec);
    std::set<std::string> labels;
    for (int code = 0; code < s.context_count(); ++code) {
      const ContextKey key = s.decode(code);
      EXPECT_EQ(s.encode(key), code);
      const std::string label = s.context_label(code);
      EXPECT_EQ(s.parse_context_label(label), code);
      labels.insert(label);
    }
    EXPECT_EQ(labels.size(), static_cast<std::size_t>(s.context_count()));
  }
}

TEST(ContextSchema, FirstFeatureIsMostSignificant) {
  auto s = ContextSchema::from_tags("BCE");
  EXPECT_EQ(s.context_label(0), "B=UP,C=RIGHT,E=UP");
  EXPECT_EQ(s.context_label(1), "B=UP,C=RIGHT,E=NC");
  EXPECT_EQ(s.context_label(11), "B=DOWN,C=WRONG,E=DOWN");
}

TEST(ContextSchema, EncodeNeedsEveryFeature) {
  auto s = ContextSchema::from_tags("BH");
  auto h = oracle::history("s", "p", "UUU", "UDU");
  EXPECT_FALSE(s.encode(derive_features(h, 2)).has_value());
  EXPECT_TRUE(s.encode(derive_features(h, 3)).has_value());
}

TEST(ContextSchema, RejectsInvalidSchemas) {
  EXPECT_THROW(ContextSchema::from_tags(""), std::invalid_argument);
  EXPECT_THROW(ContextSchema::from_tags("BB"), std::invalid_argument);
  EXPECT_THROW(ContextSchema::from_tags("BXE"), std::invalid_argument);
  EXPECT_THROW(ContextSchema::from_tags("ABCDEFG"), std::invalid_argument);  // 192 contexts
  EXPECT_NO_THROW(ContextSchema::from_tags("ABCDF"));                        // 32 contexts
  EXPECT_NO_THROW(ContextSchema::from_tags("BCDEH"));                        // 48 contexts
}

TEST(ContextSchema, UnstructuredLabels) {
  ContextSchema s;
  EXPECT_FALSE(s.structured());
  EXPECT_EQ(s.context_label(5), "c5");
  EXPECT_EQ(s.parse_context_label("c5"), 5);
}

TEST(ContextSchema, RejectsBadLabels) {
  auto s = ContextSchema::from_tags("BC");
  EXPECT_THROW(s.parse_context_label("B=UP"), std::invalid_argument);
  EXPECT_THROW(s.parse_context_label("C=UP,B=RIGHT"), std::invalid_argument);
  EXPECT_THROW(s.decode(4), std::out_of_range);
}

TEST(EnumerateSchemas, Examples) {
  auto one = enumerate_schemas({"BCE"});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].context_count(), 12);
  EXPECT_TRUE(enumerate_schemas({}).empty());
  auto all = enumerate_schemas(default_schema_spec());
  EXPECT_EQ(all.size(), 23u);
  EXPECT_TRUE(std::any_of(all.begin(), all.end(),
                          [](const ContextSchema& s) { return s.tags() == "BCE"; }));
}

TEST(EnumerateSchemas, PreservesOrderAndRejectsDuplicates) {
  auto s = enumerate_schemas({"E", "BC", "A"});
  EXPECT_EQ(s[0].tags(), "E");
  EXPECT_EQ(s[2].tags(), "A");
  EXPECT_THROW(enumerate_schemas({"BC", "CB"}), std::invalid_argument);
  EXPECT_THROW(enumerate_schemas({"BC", "Q"}), std::invalid_argument);
}

TEST(EnumerateSchemas, ShippedFileMatchesDefault) {
  EXPECT_EQ(read_schema_file(std::string(BLOCKSTRAT_DATA_DIR) + "/default_schemas.txt"),
            default_schema_spec());
}

TEST(EnumerateSchemas, FileSkipsCommentsAndBlankLines) {
  const std::string path = ::testing::TempDir() + "/schemas.txt";
  std::ofstream(path) << "# header\nBCE\n\n  BC  \n";
  EXPECT_EQ(read_schema_file(path), (std::vector<std::string>{"BCE", "BC"}));
  EXPECT_THROW(read_schema_file(path + ".missing"), DataError);
}

TEST(BuildNetwork, SingleUsableRound) {
  auto net = build_network({oracle::history("s", "p", "DU", "UU")}, ContextSchema::from_tags("B"));
  ASSERT_EQ(net.players(), 1u);
  ASSERT_EQ(net.contexts(), 1u);
  EXPECT_EQ(net.n_up(0, 0), 1);
  EXPECT_EQ(net.n_down(0, 0), 0);
  EXPECT_EQ(net.skipped(), 1u);
  EXPECT_EQ(net.context_label(0), "B=UP");
}

TEST(BuildNetwork, CountsMatchDirectTally) {
  const auto hs = synthetic(40, 9);
  for (const auto& spec : default_schema_spec()) {
    const auto schema = ContextSchema::from_tags(spec);
    const auto net = build_network(hs, schema);

    // Independent scan over raw rounds.
    oracle::Tally expect;
    std::size_t usable = 0, skipped = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      for (int t = 1; t <= static_cast<int>(hs[i].size()); ++t) {
        auto code = schema.encode(derive_features(hs[i], t));
        if (!code) {
          ++skipped;
          continue;
        }
        ++usable;
        ++expect[{i, *code, hs[i].at_round(t).guess}];
      }
    }
    oracle::Tally got;
    long total = 0;
    for (std::size_t p = 0; p < net.players(); ++p) {
      for (std::size_t c = 0; c < net.contexts(); ++c) {
        if (net.n_up(p, c)) got[{net.external_player(p), net.context_code(c), Direction::Up}] = net.n_up(p, c);
        if (net.n_down(p, c)) got[{net.external_player(p), net.context_code(c), Direction::Down}] = net.n_down(p, c);
        total += net.total(p, c);
      }
    }
    EXPECT_EQ(got, expect) << spec;
    EXPECT_EQ(static_cast<std::size_t>(total), usable);
    EXPECT_EQ(net.observation_count(), usable);
    EXPECT_EQ(net.skipped(), skipped);
    EXPECT_EQ(oracle::tally(net.provenance()), expect);
    EXPECT_LE(net.contexts(), static_cast<std::size_t>(schema.context_count()));
  }
}

TEST(BuildNetwork, DegreesAreRowAndColumnSums) {
  const auto net = build_network(synthetic(25, 2), ContextSchema::from_tags("BCE"));
  for (std::size_t p = 0; p < net.players(); ++p) {
    int sum = 0;
    for (std::size_t c = 0; c < net.contexts(); ++c) sum += net.total(p, c);
    EXPECT_EQ(net.player_degree(p), sum);
    EXPECT_GT(sum, 0);
  }
  for (std::size_t c = 0; c < net.contexts(); ++c) {
    int sum = 0;
    for (std::size_t p = 0; p < net.players(); ++p) sum += net.total(p, c);
    EXPECT_EQ(net.context_degree(c), sum);
    EXPECT_GT(sum, 0);
  }
}

TEST(BuildNetwork, PermutationInvariant) {
  auto hs = synthetic(30, 5);
  const auto schema = ContextSchema::from_tags("BCE");
  const auto base = build_network(hs, schema);
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::size_t> order(hs.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<PlayerHistory> shuffled;
    for (auto i : order) shuffled.push_back(hs[i]);
    const auto net = build_network(shuffled, schema);
    ASSERT_EQ(net.players(), base.players());
    ASSERT_EQ(net.context_codes(), base.context_codes());
    // Same counts once players are matched by label.
    for (std::size_t p = 0; p < net.players(); ++p) {
      const auto& label = net.player_label(p);
      std::size_t q = 0;
      while (base.player_label(q) != label) ++q;
      for (std::size_t c = 0; c < net.contexts(); ++c) {
        EXPECT_EQ(net.n_up(p, c), base.n_up(q, c));
        EXPECT_EQ(net.n_down(p, c), base.n_down(q, c));
      }
    }
  }
}

TEST(BuildNetwork, MarginalizingEMatchesBc) {
  const auto hs = synthetic(40, 6);
  const auto bce = build_network(hs, ContextSchema::from_tags("BCE"));
  const auto bc = build_network(hs, ContextSchema::from_tags("BC"));
  ASSERT_EQ(bce.players(), bc.players());
  const auto& s = bce.schema();
  for (std::size_t p = 0; p < bc.players(); ++p) {
    for (std::size_t c2 = 0; c2 < bc.contexts(); ++c2) {
      const ContextKey k2 = bc.schema().decode(bc.context_code(c2));
      int up = 0, down = 0;
      for (std::size_t c3 = 0; c3 < bce.contexts(); ++c3) {
        const ContextKey k3 = s.decode(bce.context_code(c3));
        if (k3.value(Feature::B) == k2.value(Feature::B) &&
            k3.value(Feature::C) == k2.value(Feature::C)) {
          up += bce.n_up(p, c3);
          down += bce.n_down(p, c3);
        }
      }
      EXPECT_EQ(up, bc.n_up(p, c2));
      EXPECT_EQ(down, bc.n_down(p, c2));
    }
  }
}

TEST(BuildNetwork, RecordIdsIndexFlattenedInput) {
  const auto hs = synthetic(5, 8);
  const auto data = extract_observations(hs, ContextSchema::from_tags("H"));
  for (const auto& o : data.observations) {
    const std::size_t offset = o.player * 25;
    EXPECT_EQ(o.record_id, offset + static_cast<std::size_t>(o.round) - 1);
    EXPECT_GE(o.round, 3);
  }
  EXPECT_EQ(data.skipped, 5u * 2);
  EXPECT_EQ(data.player_labels.size(), 5u);
}

TEST(BuildNetwork, EmptyInput) {
  auto net = build_network({}, ContextSchema::from_tags("BCE"));
  EXPECT_TRUE(net.empty());
  EXPECT_EQ(net.players(), 0u);
}
