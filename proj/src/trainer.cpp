#include "deepmpr/trainer.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "deepmpr/metrics.hpp"
#include "deepmpr/rl_env.hpp"
#include "deepmpr/simulator.hpp"

namespace deepmpr {

namespace {

constexpr std::uint64_t kInitStream = 101;
constexpr std::uint64_t kShuffleStream = 102;
constexpr std::uint64_t kEpisodeStream = 1000;

struct Tally {
  double delivery = 0.0;
  double overhead = 0.0;
  std::size_t episodes = 0;
  std::size_t with_goodput = 0;
  std::size_t zero_goodput = 0;

  void add(const EpisodeTrace& t) {
    delivery += delivery_ratio(t).value_or(0.0);
    ++episodes;
    if (t.totals().goodput_bits > 0) {
      overhead += overhead_ratio(t);
      ++with_goodput;
    } else {
      ++zero_goodput;
    }
  }
  EvalSummary summary() const {
    EvalSummary s;
    s.episodes = episodes;
    s.zero_goodput = zero_goodput;
    s.delivery = episodes ? delivery / static_cast<double>(episodes) : 0.0;
    s.overhead = with_goodput ? overhead / static_cast<double>(with_goodput) : 0.0;
    return s;
  }
};

void put_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_number(*v);
}

// Drops steps beyond `budget`, in trajectory order. A cut trajectory ends at
// its last kept step, which becomes terminal.
void truncate_to_budget(RolloutBuffer& buffer, std::uint64_t budget) {
  std::uint64_t kept = 0;
  std::size_t t = 0;
  for (; t < buffer.trajectories.size() && kept < budget; ++t) {
    Trajectory& traj = buffer.trajectories[t];
    if (kept + traj.size() > budget) {
      traj.resize(static_cast<std::size_t>(budget - kept));
      traj.back().done = true;
    }
    kept += traj.size();
  }
  buffer.trajectories.resize(t);
}

std::string checkpoint_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

void write_curve_header(std::ostream& out) {
  out << "update,steps,mean_reward,forward_fraction,delivery_ratio,overhead_ratio,eval_delivery,eval_overhead,"
         "smpr_delivery,smpr_overhead,clip_fraction,policy_loss,value_loss,entropy\n";
}

void write_curve_row(std::ostream& out, const CurveRow& r) {
  out << r.update << ',' << r.steps << ',' << format_number(r.mean_reward) << ',' << format_number(r.forward_fraction) << ','
      << format_number(r.delivery_ratio) << ',' << format_number(r.overhead_ratio) << ',';
  put_optional(out, r.eval_delivery);
  out << ',';
  put_optional(out, r.eval_overhead);
  out << ',';
  put_optional(out, r.smpr_delivery);
  out << ',';
  put_optional(out, r.smpr_overhead);
  out << ',' << format_number(r.clip_fraction) << ',' << format_number(r.policy_loss) << ','
      << format_number(r.value_loss) << ',' << format_number(r.entropy) << '\n';
}

EvalSummary evaluate_policy(const ScenarioConfig& scenario, const PolicyParams& params,
                            const std::vector<std::uint64_t>& seeds, bool greedy) {
  Tally t;
  AgentOptions opt;
  opt.greedy = greedy;
  for (std::uint64_t s : seeds) t.add(run_policy_episode(scenario, s, params, opt).trace);
  return t.summary();
}

EvalSummary evaluate_mode(const ScenarioConfig& scenario, ForwardingMode mode,
                          const std::vector<std::uint64_t>& seeds) {
  ScenarioConfig c = scenario;
  c.mode = mode;
  Tally t;
  for (std::uint64_t s : seeds) t.add(run_episode(c, s));
  return t.summary();
}

TrainResult train(const ScenarioConfig& scenario, const TrainConfig& config, const PolicyParams* initial,
                  const std::function<void(const CurveRow&)>& on_row) {
  config.ppo.check();
  if (config.workers == 0) throw ConfigError("train.workers", "must be positive");
  if (config.rollout_steps == 0) throw ConfigError("train.rollout_steps", "must be positive");

  TrainResult result;
  const NetworkShape shape = policy_shape(scenario, config.hidden, config.separate_critic);
  if (initial) {
    if (!(initial->shape == shape)) throw ShapeMismatch("initial parameters do not match the scenario's network shape");
    result.params = *initial;
  } else {
    Rng init_rng(derive_seed(config.seed, kInitStream));
    result.params = init_params(shape, init_rng);
  }
  if (!config.out_dir.empty()) std::filesystem::create_directories(config.out_dir);
  auto save = [&](const std::string& name) {
    if (config.out_dir.empty()) return;
    const std::string path = checkpoint_path(config.out_dir, name);
    save_checkpoint(path, result.params);
    result.checkpoints.push_back(path);
  };
  save("checkpoint_0.bin");
  if (config.total_steps == 0) return result;

  std::vector<std::uint64_t> eval_seeds;
  for (std::size_t k = 0; k < config.eval_episodes; ++k) eval_seeds.push_back(config.eval_seed_base + k);
  std::optional<EvalSummary> smpr_baseline;

  Rng shuffle_rng(derive_seed(config.seed, kShuffleStream));
  AdamState adam;
  std::uint64_t episode = 0;

  while (result.steps < config.total_steps) {
    RolloutBuffer buffer;
    Tally rollout;
    double reward = 0.0;
    std::uint64_t decisions = 0;
    std::uint64_t forwards = 0;
    while (buffer.steps() < config.rollout_steps) {
      std::vector<PolicyEpisode> batch(config.workers);
      std::vector<ScenarioConfig> configs(config.workers, scenario);
      std::vector<std::uint64_t> seeds(config.workers);
      for (std::size_t w = 0; w < config.workers; ++w) {
        const std::uint64_t e = episode + w;
        if (!config.train_rates.empty()) configs[w].flow.rate = config.train_rates[e % config.train_rates.size()];
        seeds[w] = derive_seed(config.seed, kEpisodeStream + e);
      }
      AgentOptions opt;
      opt.record = true;
      if (config.workers == 1) {
        batch[0] = run_policy_episode(configs[0], seeds[0], result.params, opt);
      } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(config.workers);
        for (std::size_t w = 0; w < config.workers; ++w) {
          pool.emplace_back([&, w] {
            try {
              batch[w] = run_policy_episode(configs[w], seeds[w], result.params, opt);
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
          if (e) std::rethrow_exception(e);
      }
      episode += config.workers;
      for (auto& ep : batch) {
        rollout.add(ep.trace);
        reward += ep.reward_sum;
        decisions += ep.decisions;
        forwards += ep.forwards;
        buffer.append(std::move(ep.buffer));
      }
    }

    truncate_to_budget(buffer, config.total_steps - result.steps);
    const std::size_t steps = buffer.steps();
    const UpdateStats stats = ppo_update(result.params, buffer, config.ppo, adam, shuffle_rng);
    result.steps += steps;
    ++result.updates;

    CurveRow row;
    row.update = result.updates;
    row.steps = result.steps;
    row.mean_reward = steps ? reward / static_cast<double>(steps) : 0.0;
    row.forward_fraction = decisions ? static_cast<double>(forwards) / static_cast<double>(decisions) : 0.0;
    const EvalSummary rs = rollout.summary();
    row.delivery_ratio = rs.delivery;
    row.overhead_ratio = rs.overhead;
    row.clip_fraction = stats.loss.clip_fraction;
    row.policy_loss = -stats.loss.surrogate;
    row.value_loss = stats.loss.value_loss;
    row.entropy = stats.loss.entropy;
    const bool last = result.steps >= config.total_steps;
    if (config.eval_every > 0 && !eval_seeds.empty() && (result.updates % config.eval_every == 0 || last)) {
      const EvalSummary ev = evaluate_policy(scenario, result.params, eval_seeds, config.eval_greedy);
      if (!smpr_baseline) smpr_baseline = evaluate_mode(scenario, ForwardingMode::kSMpr, eval_seeds);
      row.eval_delivery = ev.delivery;
      row.eval_overhead = ev.overhead;
      row.smpr_delivery = smpr_baseline->delivery;
      row.smpr_overhead = smpr_baseline->overhead;
    }
    result.curve.push_back(row);
    if (on_row) on_row(row);
    if (config.checkpoint_every > 0 && result.updates % config.checkpoint_every == 0 && !last) {
      save("checkpoint_" + std::to_string(result.updates) + ".bin");
    }
  }
  save("checkpoint_" + std::to_string(result.updates) + ".bin");

  if (!config.out_dir.empty()) {
    std::ofstream curve(checkpoint_path(config.out_dir, "learning_curve.csv"));
    write_curve_header(curve);
    for (const auto& r : result.curve) write_curve_row(curve, r);
  }
  return result;
}

}  // namespace deepmpr
