#include <gtest/gtest.h>

#include <algorithm>

#include "deepmpr/scenario.hpp"
#include "deepmpr/simulator.hpp"

namespace deepmpr {
namespace {

bool mentions(const ConfigError& e, const std::string& field) {
  return std::any_of(e.errors().begin(), e.errors().end(), [&](const FieldError& f) { return f.field == field; });
}

TEST(Scenario, EmptyTextGivesBaseline) {
  const ScenarioConfig c = validate("");
  EXPECT_EQ(c, ScenarioConfig{});
  EXPECT_EQ(c.node_count, 25u);
  EXPECT_EQ(c.arena_side, 700.0);
  EXPECT_EQ(c.radio.full_range, 200.0);
  EXPECT_EQ(c.radio.max_range, 250.0);
  EXPECT_EQ(c.radio.link_rate, 1e6);
  EXPECT_EQ(c.flow.packet_bytes, 256u);
  EXPECT_EQ(c.hello_bytes, 64u);
}

TEST(Scenario, SectionsAndComments) {
  const ScenarioConfig c = validate(
      "# demo\n"
      "[nodes]\n"
      "count = 15   # fifteen\n"
      "[arena]\n"
      "side = 550\n"
      "[forwarding]\n"
      "mode = ns-mpr\n");
  EXPECT_EQ(c.node_count, 15u);
  EXPECT_EQ(c.arena_side, 550.0);
  EXPECT_EQ(c.mode, ForwardingMode::kNsMpr);
}

TEST(Scenario, ZeroNodesRejected) {
  try {
    validate("nodes.count = 0\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "nodes.count"));
  }
}

TEST(Scenario, DeepMprNeedsCheckpoint) {
  try {
    validate("forwarding.mode = deep-mpr\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(mentions(e, "forwarding.checkpoint"));
  }
  EXPECT_NO_THROW(validate("forwarding.mode = deep-mpr\nforwarding.checkpoint = policy.bin\n"));
}

TEST(Scenario, CollectsEveryRangeError) {
  try {
    validate("flow.rate = -1\nradio.max_range = 100\nmobility.alpha = 2\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.errors().size(), 3u);
    EXPECT_TRUE(mentions(e, "flow.rate"));
    EXPECT_TRUE(mentions(e, "radio.max_range"));
    EXPECT_TRUE(mentions(e, "mobility.alpha"));
  }
}

TEST(Scenario, CollectsEveryParseError) {
  try {
    validate("bogus = 1\nnodes.count = many\nthis line has no equals\n", {"alsobogus=2"});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.errors().size(), 4u);
    EXPECT_TRUE(mentions(e, "bogus"));
    EXPECT_TRUE(mentions(e, "nodes.count"));
    EXPECT_TRUE(mentions(e, "alsobogus"));
  }
}

TEST(Scenario, OverridesWinOverText) {
  const ScenarioConfig c = validate("nodes.count = 10\n", {"nodes.count=12", "flow.rate=400"});
  EXPECT_EQ(c.node_count, 12u);
  EXPECT_EQ(c.flow.rate, 400.0);
}

TEST(Scenario, SerializeRoundTrips) {
  ScenarioConfig c;
  c.name = "rt";
  c.node_count = 3;
  c.positions = {{1.5, 2}, {3, 4.25}, {0, 0}};
  c.mobile = false;
  c.flow.source_ids = {2};
  c.flow.rate = 0.1;
  c.mode = ForwardingMode::kDeepMpr;
  c.checkpoint = "x.bin";
  c.rl.reward_weights = {0.5, 0.25, 1.0 / 3.0};
  c.seeds.flow = 99;
  c.sweep_rates = {1, 2.5};
  const ScenarioConfig back = validate(serialize(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize(back), serialize(c));
}

TEST(Scenario, FlowSeedOverrideLeavesMobilityAlone) {
  ScenarioConfig a;
  a.node_count = 10;
  a.episode_length = 10.0;
  a.flow.rate = 5.0;
  ScenarioConfig b = a;
  b.seeds.flow = 12345;
  EXPECT_EQ(a.stream_seed(Stream::kMobility), b.stream_seed(Stream::kMobility));
  EXPECT_NE(a.stream_seed(Stream::kFlow), b.stream_seed(Stream::kFlow));

  Simulator sa(a);
  Simulator sb(b);
  sa.run();
  sb.run();
  for (NodeId k = 0; k < 10; ++k) EXPECT_EQ(sa.positions()[k], sb.positions()[k]);
}

TEST(Scenario, StreamsAreDistinct) {
  ScenarioConfig c;
  std::vector<std::uint64_t> seeds;
  for (auto s : {Stream::kMobility, Stream::kRadio, Stream::kHello, Stream::kFlow, Stream::kPolicy})
    seeds.push_back(c.stream_seed(s));
  std::sort(seeds.begin(), seeds.end());
  EXPECT_EQ(std::unique(seeds.begin(), seeds.end()), seeds.end());
}

}  // namespace
}  // namespace deepmpr
