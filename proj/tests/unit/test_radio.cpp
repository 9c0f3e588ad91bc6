#include <gtest/gtest.h>

#include <cmath>

#include "deepmpr/radio.hpp"
#include "deepmpr/simulator.hpp"
#include "deepmpr/topology.hpp"
#include "support.hpp"

namespace deepmpr {
namespace {

HelloMessage hello_from(NodeId sender, std::vector<NodeId> list, std::vector<NodeId> mprs = {}) {
  HelloMessage h;
  h.sender = sender;
  h.neighbor_list = std::move(list);
  h.mpr_set = std::move(mprs);
  return h;
}

TEST(Radio, DeliveryProbabilityRamp) {
  RadioModel r;
  EXPECT_EQ(r.delivery_probability(0.0), 1.0);
  EXPECT_EQ(r.delivery_probability(100.0), 1.0);
  EXPECT_EQ(r.delivery_probability(200.0), 1.0);
  EXPECT_DOUBLE_EQ(r.delivery_probability(225.0), 0.5);
  EXPECT_EQ(r.delivery_probability(250.0), 0.0);
  EXPECT_EQ(r.delivery_probability(300.0), 0.0);
}

TEST(Radio, StepModelWhenRangesCoincide) {
  RadioModel r;
  r.max_range = r.full_range;
  EXPECT_EQ(r.delivery_probability(200.0), 1.0);
  EXPECT_EQ(r.delivery_probability(200.0001), 0.0);
}

TEST(Radio, Airtime) {
  RadioModel r;
  EXPECT_DOUBLE_EQ(r.airtime(256 * 8), 2.048e-3);
  EXPECT_DOUBLE_EQ(r.airtime(64 * 8), 0.512e-3);
}

TEST(Radio, BroadcastOutOfRangeReachesNobody) {
  RadioModel r;
  const std::vector<Vec2> pos{{0, 0}, {300, 0}};
  Rng rng(1);
  auto frame = std::make_shared<const Frame>(Packet{});
  EXPECT_TRUE(broadcast(r, 0, frame, 0.0, pos, rng).empty());
}

TEST(Radio, BroadcastTriangleReachesBothOthers) {
  RadioModel r;
  const auto pos = test::triangle();
  Rng rng(1);
  Rng untouched(1);
  auto frame = std::make_shared<const Frame>(Packet{});
  const auto events = broadcast(r, 1, frame, 1.0, pos, rng);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].node, 0u);
  EXPECT_EQ(events[1].node, 2u);
  for (const auto& e : events) {
    EXPECT_EQ(e.kind, EventKind::kRxComplete);
    EXPECT_EQ(e.from, 1u);
    EXPECT_DOUBLE_EQ(e.time, 1.0 + 2.048e-3);
  }
  // reliable links draw nothing from the loss stream
  EXPECT_EQ(rng(), untouched());
}

TEST(Radio, RampLinkLossRateMatchesProbability) {
  RadioModel r;
  const std::vector<Vec2> pos{{0, 0}, {225, 0}};
  Rng rng(3);
  auto frame = std::make_shared<const Frame>(Packet{});
  int got = 0;
  const int trials = 20000;
  for (int k = 0; k < trials; ++k) got += static_cast<int>(broadcast(r, 0, frame, 0.0, pos, rng).size());
  EXPECT_NEAR(static_cast<double>(got) / trials, 0.5, 0.02);
}

TEST(Radio, HelloIntervalCadence) {
  Rng rng(9);
  double sum = 0.0;
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) {
    const double g = next_hello_interval(rng, 0.25, 0.75);
    ASSERT_GE(g, 0.25);
    ASSERT_LE(g, 0.75);
    sum += g;
  }
  EXPECT_NEAR(sum / draws, 0.5, 0.5 * 0.02);
}

TEST(Radio, RefreshBuildsChainTable) {
  // chain 0 - 1 - 2 seen from each end and the middle
  std::map<NodeId, HelloRecord> at0{{1, {1.0, hello_from(1, {0, 2})}}};
  const NeighborTable t0 = refresh_tables(0, 3, at0, 1.5, 2.25);
  EXPECT_EQ(t0.one_hop, (std::vector<NodeId>{1}));
  EXPECT_EQ(t0.two_hop, (std::vector<NodeId>{2}));
  EXPECT_TRUE(t0.link_matrix.linked(0, 1));
  EXPECT_TRUE(t0.link_matrix.linked(1, 2));
  EXPECT_FALSE(t0.link_matrix.linked(0, 2));

  std::map<NodeId, HelloRecord> at1{{0, {1.0, hello_from(0, {1})}}, {2, {1.1, hello_from(2, {1})}}};
  const NeighborTable t1 = refresh_tables(1, 3, at1, 1.5, 2.25);
  EXPECT_EQ(t1.one_hop, (std::vector<NodeId>{2, 0}));
  EXPECT_TRUE(t1.two_hop.empty());
  EXPECT_EQ(t1.link_matrix.ordering(), (std::vector<NodeId>{1, 2, 0}));
}

TEST(Radio, RefreshIgnoresExpiredRecords) {
  std::map<NodeId, HelloRecord> heard{{1, {0.0, hello_from(1, {0, 2})}}, {2, {2.0, hello_from(2, {0})}}};
  const NeighborTable t = refresh_tables(0, 3, heard, 3.0, 2.25);
  EXPECT_EQ(t.one_hop, (std::vector<NodeId>{2}));
  EXPECT_TRUE(t.two_hop.empty());
}

TEST(Radio, RefreshWithoutHellosIsEmpty) {
  const NeighborTable t = refresh_tables(4, 6, {}, 10.0, 2.25);
  EXPECT_TRUE(t.one_hop.empty());
  EXPECT_TRUE(t.two_hop.empty());
  EXPECT_EQ(t.local_size(), 1u);
  EXPECT_EQ(t.link_matrix.ordering(), (std::vector<NodeId>{4}));
}

TEST(Radio, DiscoveryEvictsAndTracksSelectors) {
  NeighborDiscovery d(0, 4);
  d.ingest(hello_from(1, {0, 2}, {0}), 0.0);
  d.ingest(hello_from(3, {0}), 1.0);
  d.ingest(hello_from(0, {1}), 1.0);  // own echo ignored
  EXPECT_TRUE(d.refresh(1.0, 2.25));
  EXPECT_EQ(d.table().one_hop, (std::vector<NodeId>{1, 3}));
  EXPECT_EQ(d.selectors(), (std::vector<NodeId>{1}));
  EXPECT_FALSE(d.refresh(1.5, 2.25));
  EXPECT_TRUE(d.has_stale(2.5, 2.25));
  EXPECT_TRUE(d.refresh(2.5, 2.25));
  EXPECT_EQ(d.table().one_hop, (std::vector<NodeId>{3}));
  EXPECT_TRUE(d.selectors().empty());
  const HelloMessage h = d.make_hello({3}, 7, 512);
  EXPECT_EQ(h.sender, 0u);
  EXPECT_EQ(h.neighbor_list, (std::vector<NodeId>{3}));
  EXPECT_EQ(h.mpr_set, (std::vector<NodeId>{3}));
  EXPECT_EQ(h.queue_length, 7u);
}

// After three HELLO periods on a static lossless network every table equals
// the one built from the true adjacency.
TEST(Radio, TablesConvergeToGroundTruth) {
  Rng rng(21);
  std::vector<Vec2> pos;
  for (int k = 0; k < 12; ++k) pos.push_back({uniform(rng, 0, 500), uniform(rng, 0, 500)});
  ScenarioConfig c = test::static_scenario(pos);
  c.flow.start_time = 100.0;
  c.episode_length = 3.0 * c.hello_max + 0.01;
  Simulator sim(c);
  sim.run();
  const LinkMatrix global = global_link_matrix(pos, c.radio.full_range);
  for (NodeId i = 0; i < pos.size(); ++i) {
    const NeighborTable truth = ground_truth_table(global, i);
    EXPECT_EQ(sim.table(i).one_hop, truth.one_hop) << "node " << i;
    EXPECT_EQ(sim.table(i).two_hop, truth.two_hop) << "node " << i;
    EXPECT_EQ(sim.table(i).link_matrix, truth.link_matrix) << "node " << i;
  }
}

TEST(Radio, NeighborRelationIsSymmetric) {
  Rng rng(4);
  std::vector<Vec2> pos;
  for (int k = 0; k < 15; ++k) pos.push_back({uniform(rng, 0, 550), uniform(rng, 0, 550)});
  ScenarioConfig c = test::static_scenario(pos);
  c.flow.start_time = 100.0;
  c.episode_length = 5.0;
  Simulator sim(c);
  sim.run();
  for (NodeId i = 0; i < pos.size(); ++i) {
    for (NodeId j : sim.table(i).one_hop) EXPECT_TRUE(sim.table(j).is_one_hop(i)) << i << " " << j;
  }
}

}  // namespace
}  // namespace deepmpr
