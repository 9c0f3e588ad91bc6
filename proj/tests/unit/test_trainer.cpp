#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "deepmpr/rl_env.hpp"
#include "deepmpr/trainer.hpp"

namespace deepmpr {
namespace {

ScenarioConfig small_net() {
  ScenarioConfig c;
  c.node_count = 8;
  c.arena_side = 400.0;
  c.episode_length = 6.0;
  c.flow.rate = 20.0;
  return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("deepmpr_trainer_" + name);
  std::filesystem::remove_all(p);
  return p;
}

TEST(Trainer, ZeroStepsReturnsInitialParams) {
  const ScenarioConfig c = small_net();
  TrainConfig tc;
  tc.total_steps = 0;
  tc.hidden = {16};
  tc.out_dir = scratch_dir("zero").string();
  Rng rng(3);
  const PolicyParams init = init_params(policy_shape(c, {16}), rng);
  const TrainResult r = train(c, tc, &init);
  EXPECT_EQ(r.params, init);
  EXPECT_EQ(r.steps, 0u);
  EXPECT_TRUE(r.curve.empty());
  ASSERT_EQ(r.checkpoints.size(), 1u);
  const PolicyParams back = load_checkpoint(r.checkpoints[0]);
  EXPECT_EQ(back.shape, init.shape);
  std::filesystem::remove_all(tc.out_dir);
}

TEST(Trainer, InitialShapeMustMatch) {
  TrainConfig tc;
  tc.total_steps = 0;
  const PolicyParams wrong = zero_params(policy_shape(small_net(), {8}));
  EXPECT_THROW(train(small_net(), tc, &wrong), ShapeMismatch);
}

TEST(Trainer, FixedSeedGivesIdenticalCurves) {
  TrainConfig tc;
  tc.total_steps = 600;
  tc.rollout_steps = 200;
  tc.hidden = {16, 16};
  tc.ppo.minibatch = 64;
  tc.eval_every = 2;
  tc.eval_episodes = 1;
  tc.train_rates = {10.0, 30.0};
  const TrainResult a = train(small_net(), tc);
  const TrainResult b = train(small_net(), tc);
  ASSERT_FALSE(a.curve.empty());
  EXPECT_EQ(a.steps, 600u);
  EXPECT_EQ(a.params, b.params);
  std::ostringstream sa;
  std::ostringstream sb;
  for (const auto& r : a.curve) write_curve_row(sa, r);
  for (const auto& r : b.curve) write_curve_row(sb, r);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.params.version, a.updates);
  EXPECT_TRUE(a.curve.back().eval_delivery.has_value());
  EXPECT_TRUE(a.curve.back().smpr_delivery.has_value());
}

TEST(Trainer, ParallelWorkersAreDeterministic) {
  TrainConfig tc;
  tc.total_steps = 300;
  tc.rollout_steps = 150;
  tc.hidden = {8};
  tc.workers = 3;
  const TrainResult a = train(small_net(), tc);
  const TrainResult b = train(small_net(), tc);
  EXPECT_EQ(a.params, b.params);
}

TEST(Trainer, WritesCurveAndCheckpoints) {
  TrainConfig tc;
  tc.total_steps = 400;
  tc.rollout_steps = 100;
  tc.hidden = {8};
  tc.checkpoint_every = 2;
  tc.out_dir = scratch_dir("files").string();
  const TrainResult r = train(small_net(), tc);
  std::ifstream curve(std::filesystem::path(tc.out_dir) / "learning_curve.csv");
  std::string header;
  std::getline(curve, header);
  EXPECT_EQ(header,
            "update,steps,mean_reward,forward_fraction,delivery_ratio,overhead_ratio,eval_delivery,eval_overhead,"
            "smpr_delivery,smpr_overhead,clip_fraction,policy_loss,value_loss,entropy");
  std::size_t lines = 0;
  for (std::string line; std::getline(curve, line);) ++lines;
  EXPECT_EQ(lines, r.curve.size());
  EXPECT_GE(r.checkpoints.size(), 2u);
  for (const auto& p : r.checkpoints) EXPECT_TRUE(std::filesystem::exists(p));
  EXPECT_EQ(load_checkpoint(r.checkpoints.back()).version, r.updates);
  std::filesystem::remove_all(tc.out_dir);
}

TEST(Trainer, EvaluateModeAveragesEpisodes) {
  const ScenarioConfig c = small_net();
  const EvalSummary s = evaluate_mode(c, ForwardingMode::kFlooding, {1, 2, 3});
  EXPECT_EQ(s.episodes, 3u);
  EXPECT_GT(s.delivery, 0.0);
  EXPECT_LE(s.delivery, 1.0);
  EXPECT_GE(s.overhead, 1.0);
}

}  // namespace
}  // namespace deepmpr
