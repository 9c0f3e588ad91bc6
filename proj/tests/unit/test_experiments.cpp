#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "deepmpr/experiments.hpp"
#include "deepmpr/rl_env.hpp"
#include "deepmpr/topology.hpp"

namespace deepmpr {
namespace {

ScenarioConfig dense_static() {
  ScenarioConfig c;
  c.node_count = 15;
  c.arena_side = 300.0;
  c.mobile = false;
  c.radio.max_range = c.radio.full_range;
  c.episode_length = 8.0;
  return c;
}

TEST(Experiments, OneRowPerModeAndRate) {
  ScenarioConfig c = dense_static();
  CompareOptions opt;
  opt.rates = {5.0, 20.0};
  std::size_t episodes = 0;
  opt.on_episode = [&](ForwardingMode, double, std::uint64_t, const EpisodeTrace&) { ++episodes; };
  const auto rows = compare(c, {ForwardingMode::kFlooding, ForwardingMode::kSMpr}, {1, 2}, opt);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(episodes, 8u);
  EXPECT_EQ(rows[0].mode, ForwardingMode::kFlooding);
  EXPECT_EQ(rows[0].rate, 5.0);
  EXPECT_EQ(rows[1].rate, 20.0);
  EXPECT_EQ(rows[2].mode, ForwardingMode::kSMpr);
  for (const auto& r : rows) EXPECT_EQ(r.episodes, 2u);

  std::ostringstream out;
  write_compare_csv(out, rows);
  const std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "mode,rate,episodes,delivery_mean,delivery_std,overhead_mean,overhead_std,tx_mean,zero_goodput");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Experiments, SourceMprCheaperThanFloodingWhenDense) {
  const ScenarioConfig c = dense_static();
  CompareOptions opt;
  opt.rates = {20.0};
  const auto rows = compare(c, {ForwardingMode::kFlooding, ForwardingMode::kSMpr}, {1, 2, 3}, opt);
  EXPECT_LE(rows[1].overhead_mean, rows[0].overhead_mean);
  EXPECT_LT(rows[1].tx_mean, rows[0].tx_mean);
}

TEST(Experiments, DeepMprNeedsParams) {
  ScenarioConfig c = dense_static();
  CompareOptions opt;
  opt.rates = {10.0};
  EXPECT_THROW(compare(c, {ForwardingMode::kDeepMpr}, {1}, opt), Error);
  const PolicyParams p = zero_params(policy_shape(c, {8}));
  opt.params = &p;
  const auto rows = compare(c, {ForwardingMode::kDeepMpr}, {1}, opt);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GT(rows[0].delivery_mean, 0.0);
}

TEST(Experiments, StaticLayoutIsConnectedAndInside) {
  Rng rng(4);
  RadioModel radio;
  for (int k = 0; k < 20; ++k) {
    const auto pos = sample_static_layout(15, 550.0, radio, rng);
    ASSERT_EQ(pos.size(), 15u);
    EXPECT_TRUE(is_connected(global_link_matrix(pos, radio.full_range)));
    for (auto p : pos) {
      EXPECT_GE(p.x, 0.0);
      EXPECT_LE(p.x, 550.0);
    }
  }
}

TEST(Experiments, MprCheckPassesOnFifteenNodes) {
  ScenarioConfig c;
  c.node_count = 15;
  c.arena_side = 550.0;
  const MprCheckReport r = mpr_check(c, 3, 100);
  EXPECT_EQ(r.snapshots, 100u);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.oracle_checked, 0u);
  EXPECT_GE(r.heuristic_mean, r.oracle_mean);
  std::size_t hist = 0;
  for (auto [excess, count] : r.excess_histogram) hist += count;
  EXPECT_EQ(hist, r.oracle_checked);
  std::ostringstream out;
  write_mpr_report(out, r);
  EXPECT_FALSE(out.str().empty());
}

}  // namespace
}  // namespace deepmpr
