#ifndef DEEPMPR_TRAINER_HPP_
#define DEEPMPR_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deepmpr/policy_net.hpp"
#include "deepmpr/ppo.hpp"
#include "deepmpr/scenario.hpp"

namespace deepmpr {

struct TrainConfig {
  PpoConfig ppo;
  std::uint64_t total_steps = 1'000'000;
  std::size_t rollout_steps = 4096;  // minimum agent steps per update
  std::size_t workers = 1;           // episodes collected concurrently
  std::uint64_t seed = 1;
  std::vector<double> train_rates;   // per-episode rate cycle; empty keeps flow.rate
  std::vector<std::size_t> hidden{64, 64};
  bool separate_critic = false;

  std::size_t eval_every = 0;  // updates between evaluations; 0 disables
  std::size_t eval_episodes = 2;
  std::uint64_t eval_seed_base = 1'000'000;
  bool eval_greedy = false;

  std::size_t checkpoint_every = 0;  // updates; 0 keeps only initial and final
  std::string out_dir;               // empty writes nothing
};

// One learning-curve row. Rollout columns describe the training episodes of
// this update; eval columns are set only on evaluation updates.
struct CurveRow {
  std::size_t update = 0;
  std::uint64_t steps = 0;
  double mean_reward = 0.0;  // per agent step
  double forward_fraction = 0.0;
  double delivery_ratio = 0.0;
  double overhead_ratio = 0.0;
  std::optional<double> eval_delivery;
  std::optional<double> eval_overhead;
  std::optional<double> smpr_delivery;
  std::optional<double> smpr_overhead;
  double clip_fraction = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

void write_curve_header(std::ostream& out);
void write_curve_row(std::ostream& out, const CurveRow& row);

struct TrainResult {
  PolicyParams params;
  std::vector<CurveRow> curve;
  std::vector<std::string> checkpoints;
  std::uint64_t steps = 0;
  std::size_t updates = 0;
};

// Collect rollouts with the shared policy, then update; repeat until
// exactly total_steps agent steps have been consumed (the last rollout is
// cut at the budget). With total_steps == 0 the
// initial parameters are returned (and checkpointed) unchanged.
TrainResult train(const ScenarioConfig& scenario, const TrainConfig& config,
                  const PolicyParams* initial = nullptr,
                  const std::function<void(const CurveRow&)>& on_row = {});

// Mean delivery ratio and Thr/Gp over episodes; episodes without goodput are
// left out of the overhead mean.
struct EvalSummary {
  double delivery = 0.0;
  double overhead = 0.0;
  std::size_t episodes = 0;
  std::size_t zero_goodput = 0;
};
EvalSummary evaluate_policy(const ScenarioConfig& scenario, const PolicyParams& params,
                            const std::vector<std::uint64_t>& seeds, bool greedy = false);
EvalSummary evaluate_mode(const ScenarioConfig& scenario, ForwardingMode mode,
                          const std::vector<std::uint64_t>& seeds);

}  // namespace deepmpr

#endif  // DEEPMPR_TRAINER_HPP_
