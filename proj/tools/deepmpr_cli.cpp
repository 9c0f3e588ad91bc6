// deepmpr: scenario validation, simulation runs, training, mode comparison
// and MPR invariant checks. Every output lands in a run directory.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "deepmpr/experiments.hpp"
#include "deepmpr/metrics.hpp"
#include "deepmpr/policy_net.hpp"
#include "deepmpr/rl_env.hpp"
#include "deepmpr/scenario.hpp"
#include "deepmpr/simulator.hpp"
#include "deepmpr/trainer.hpp"

namespace fs = std::filesystem;
using namespace deepmpr;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kAcceptanceFailure = 3;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

ScenarioConfig load(const Common& c) {
  if (c.config_path.empty()) return validate("", c.overrides);
  return load_scenario(c.config_path, c.overrides);
}

void prepare_run_dir(const std::string& dir, const ScenarioConfig& config) {
  fs::create_directories(dir);
  std::ofstream(fs::path(dir) / "config.txt") << serialize(config);
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> s;
  for (std::size_t k = 0; k < count; ++k) s.push_back(first + k);
  return s;
}

std::string episode_name(const std::string& prefix, std::uint64_t seed) {
  return prefix + "episode_seed" + std::to_string(seed) + ".csv";
}

void add_common(CLI::App* cmd, Common& c, bool needs_out) {
  cmd->add_option("config", c.config_path, "scenario file (key = value lines)");
  cmd->add_option("--set", c.overrides, "override a key, e.g. --set flow.rate=100")->take_all();
  if (needs_out) cmd->add_option("-o,--out", c.out_dir, "run directory")->required();
}

PolicyParams load_policy(const ScenarioConfig& config) {
  PolicyParams p = load_checkpoint(config.checkpoint);
  if (p.shape.input != observation_width(config.rl.n_max, config.rl.k_max) || p.shape.actions != config.rl.k_max) {
    throw ShapeMismatch("checkpoint '" + config.checkpoint + "' does not match rl.n_max / rl.k_max");
  }
  return p;
}

int cmd_validate(const Common& c) {
  std::cout << serialize(load(c));
  return kOk;
}

int cmd_run(const Common& c, std::uint64_t seed, std::size_t episodes, bool greedy) {
  const ScenarioConfig config = load(c);
  prepare_run_dir(c.out_dir, config);
  std::optional<PolicyParams> params;
  if (config.mode == ForwardingMode::kDeepMpr) params = load_policy(config);

  std::ofstream summary(fs::path(c.out_dir) / "summary.csv");
  summary << "seed,mode,delivery_ratio,overhead_ratio,goodput_fraction,goodput_bps,throughput_bps,tx_count\n";
  for (std::uint64_t s : seed_range(seed, episodes)) {
    EpisodeTrace trace;
    if (params) {
      AgentOptions opt;
      opt.greedy = greedy;
      trace = run_policy_episode(config, s, *params, opt).trace;
    } else {
      trace = run_episode(config, s);
    }
    std::ofstream(fs::path(c.out_dir) / episode_name("", s)) << trace_csv(trace);
    const WindowRow t = trace.totals();
    summary << s << ',' << trace.mode << ',' << format_number(delivery_ratio(trace).value_or(0.0)) << ',';
    if (t.goodput_bits > 0) summary << format_number(overhead_ratio(trace));
    summary << ',' << format_number(goodput_fraction(trace)) << ',' << format_number(goodput(trace)) << ','
            << format_number(throughput(trace)) << ',' << t.tx_count << '\n';
    std::cout << "seed " << s << ": delivery " << format_number(delivery_ratio(trace).value_or(0.0))
              << ", tx " << t.tx_count << '\n';
  }
  return kOk;
}

int cmd_train(const Common& c, TrainConfig tc, const std::string& init_path) {
  ScenarioConfig config = load(c);
  prepare_run_dir(c.out_dir, config);
  tc.out_dir = c.out_dir;
  std::optional<PolicyParams> init;
  if (!init_path.empty()) init = load_checkpoint(init_path);
  std::cout << "update,steps,mean_reward,delivery,overhead,eval_delivery,smpr_delivery,entropy\n";
  auto progress = [](const CurveRow& r) {
    std::cout << r.update << ',' << r.steps << ',' << format_number(r.mean_reward) << ','
              << format_number(r.delivery_ratio) << ',' << format_number(r.overhead_ratio) << ','
              << (r.eval_delivery ? format_number(*r.eval_delivery) : "") << ','
              << (r.smpr_delivery ? format_number(*r.smpr_delivery) : "") << ',' << format_number(r.entropy)
              << std::endl;
  };
  const TrainResult res = train(config, tc, init ? &*init : nullptr, progress);
  std::cout << "trained " << res.steps << " steps in " << res.updates << " updates; final checkpoint "
            << (res.checkpoints.empty() ? "(none)" : res.checkpoints.back()) << '\n';
  return kOk;
}

int cmd_compare(const Common& c, const std::vector<std::string>& mode_names, std::uint64_t seed,
                std::size_t episodes, const std::vector<double>& rates, bool greedy) {
  ScenarioConfig config = load(c);
  std::vector<ForwardingMode> modes;
  for (const auto& name : mode_names) {
    auto m = parse_forwarding_mode(name);
    if (!m) throw ConfigError("compare.modes", "unknown mode '" + name + "'");
    modes.push_back(*m);
  }
  std::optional<PolicyParams> params;
  if (std::find(modes.begin(), modes.end(), ForwardingMode::kDeepMpr) != modes.end()) {
    if (config.checkpoint.empty()) throw ConfigError("forwarding.checkpoint", "deep-mpr requires a checkpoint path");
    params = load_policy(config);
  }
  prepare_run_dir(c.out_dir, config);
  const fs::path episodes_dir = fs::path(c.out_dir) / "episodes";
  fs::create_directories(episodes_dir);

  CompareOptions opt;
  opt.params = params ? &*params : nullptr;
  opt.greedy = greedy;
  opt.rates = rates;
  opt.on_episode = [&](ForwardingMode m, double rate, std::uint64_t s, const EpisodeTrace& trace) {
    const std::string prefix = std::string(to_string(m)) + "_rate" + format_number(rate) + "_";
    std::ofstream(episodes_dir / episode_name(prefix, s)) << trace_csv(trace);
  };
  const auto rows = compare(config, modes, seed_range(seed, episodes), opt);
  std::ofstream out(fs::path(c.out_dir) / "summary.csv");
  write_compare_csv(out, rows);
  write_compare_csv(std::cout, rows);
  return kOk;
}

int cmd_mpr_check(const Common& c, std::uint64_t seed, std::size_t snapshots, std::size_t oracle_limit) {
  const ScenarioConfig config = load(c);
  const MprCheckReport rep = mpr_check(config, seed, snapshots, oracle_limit);
  if (!c.out_dir.empty()) {
    prepare_run_dir(c.out_dir, config);
    std::ofstream out(fs::path(c.out_dir) / "mpr_check.csv");
    write_mpr_report(out, rep);
  }
  write_mpr_report(std::cout, rep);
  std::cout << (rep.passed() ? "PASS" : "FAIL") << '\n';
  return rep.passed() ? kOk : kAcceptanceFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicast MPR forwarding simulator and Deep-MPR trainer"};
  app.require_subcommand(1);

  Common validate_opts;
  auto* validate_cmd = app.add_subcommand("validate", "check a scenario and print it fully defaulted");
  add_common(validate_cmd, validate_opts, false);

  Common run_opts;
  std::uint64_t run_seed = 1;
  std::size_t run_episodes = 1;
  bool run_greedy = false;
  auto* run_cmd = app.add_subcommand("run", "simulate episodes in the configured forwarding mode");
  add_common(run_cmd, run_opts, true);
  run_cmd->add_option("--seed", run_seed, "first seed");
  run_cmd->add_option("--episodes", run_episodes, "consecutive seeds to run")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--greedy", run_greedy, "deep-mpr: forward iff p >= 0.5");

  Common train_opts;
  TrainConfig tc;
  std::string init_path;
  auto* train_cmd = app.add_subcommand("train", "train the shared Deep-MPR policy with PPO");
  add_common(train_cmd, train_opts, true);
  train_cmd->add_option("--steps", tc.total_steps, "total agent steps");
  train_cmd->add_option("--rollout-steps", tc.rollout_steps, "agent steps per update");
  train_cmd->add_option("--workers", tc.workers, "episodes collected concurrently");
  train_cmd->add_option("--seed", tc.seed, "training seed");
  train_cmd->add_option("--train-rates", tc.train_rates, "per-episode flow rate cycle")->delimiter(',');
  train_cmd->add_option("--hidden", tc.hidden, "hidden widths")->delimiter(',');
  train_cmd->add_flag("--separate-critic", tc.separate_critic, "separate actor and critic networks");
  train_cmd->add_option("--eval-every", tc.eval_every, "updates between evaluations");
  train_cmd->add_option("--eval-episodes", tc.eval_episodes, "held-out episodes per evaluation");
  train_cmd->add_option("--checkpoint-every", tc.checkpoint_every, "updates between checkpoints");
  train_cmd->add_option("--init", init_path, "start from this checkpoint");
  train_cmd->add_option("--lr", tc.ppo.learning_rate, "Adam learning rate");
  train_cmd->add_option("--clip", tc.ppo.clip, "PPO clip epsilon");
  train_cmd->add_option("--gamma", tc.ppo.gamma, "discount");
  train_cmd->add_option("--lambda", tc.ppo.lambda, "GAE lambda");
  train_cmd->add_option("--epochs", tc.ppo.epochs, "epochs per update");
  train_cmd->add_option("--minibatch", tc.ppo.minibatch, "minibatch size");
  train_cmd->add_option("--entropy-coef", tc.ppo.entropy_coef, "entropy bonus");
  train_cmd->add_option("--value-coef", tc.ppo.value_coef, "value loss weight");

  Common compare_opts;
  std::vector<std::string> mode_names{"flooding", "s-mpr", "ns-mpr"};
  std::uint64_t compare_seed = 1;
  std::size_t compare_episodes = 5;
  std::vector<double> compare_rates;
  bool compare_greedy = false;
  auto* compare_cmd = app.add_subcommand("compare", "sweep offered rates across forwarding modes");
  add_common(compare_cmd, compare_opts, true);
  compare_cmd->add_option("--modes", mode_names, "forwarding modes")->delimiter(',');
  compare_cmd->add_option("--seed", compare_seed, "first seed");
  compare_cmd->add_option("--episodes", compare_episodes, "seeds per point")->check(CLI::PositiveNumber);
  compare_cmd->add_option("--rates", compare_rates, "offered rates (default compare.rates)")->delimiter(',');
  compare_cmd->add_flag("--greedy", compare_greedy, "deep-mpr: forward iff p >= 0.5");

  Common mpr_opts;
  std::uint64_t mpr_seed = 1;
  std::size_t mpr_snapshots = 100;
  std::size_t mpr_oracle_limit = 12;
  auto* mpr_cmd = app.add_subcommand("mpr-check", "check MPR coverage and optimality on random snapshots");
  mpr_cmd->add_option("config", mpr_opts.config_path, "scenario file");
  mpr_cmd->add_option("--set", mpr_opts.overrides, "override a key")->take_all();
  mpr_cmd->add_option("-o,--out", mpr_opts.out_dir, "run directory");
  mpr_cmd->add_option("--seed", mpr_seed, "sampling seed");
  mpr_cmd->add_option("--snapshots", mpr_snapshots, "neighborhoods to sample")->check(CLI::PositiveNumber);
  mpr_cmd->add_option("--oracle-limit", mpr_oracle_limit, "largest |N1| solved exactly");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate_opts);
    if (*run_cmd) return cmd_run(run_opts, run_seed, run_episodes, run_greedy);
    if (*train_cmd) return cmd_train(train_opts, tc, init_path);
    if (*compare_cmd) return cmd_compare(compare_opts, mode_names, compare_seed, compare_episodes, compare_rates,
                                         compare_greedy);
    if (*mpr_cmd) return cmd_mpr_check(mpr_opts, mpr_seed, mpr_snapshots, mpr_oracle_limit);
  } catch (const ConfigError& e) {
    for (const auto& fe : e.errors()) std::cerr << "config error: " << fe.field << ": " << fe.reason << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
