#include "deepmpr/rl_env.hpp"

#include <algorithm>
#include <cmath>

namespace deepmpr {

Observation observe(const NeighborTable& table, std::size_t own_queue, std::size_t queue_capacity,
                    std::size_t n_max, std::size_t k_max) {
  Observation o;
  o.values.assign(observation_width(n_max, k_max), 0.0);
  o.action_mask.assign(k_max, 0);

  const LinkMatrix& lm = table.link_matrix;
  const std::size_t dim = lm.dim();
  if (dim > n_max) o.truncated = true;
  if (dim > 0) {
    const std::size_t self_idx = lm.index_of(table.self).value_or(0);
    const std::size_t span = std::min(dim, n_max);
    for (std::size_t k = 0; k < span; ++k) {
      o.values[k] = lm.at(self_idx, k) ? 1.0 : 0.0;
      o.values[n_max + k] = lm.at(k, self_idx) ? 1.0 : 0.0;
    }
  }

  const double cap = static_cast<double>(std::max<std::size_t>(queue_capacity, 1));
  auto norm = [cap](std::size_t q) { return std::min(1.0, static_cast<double>(q) / cap); };
  const std::size_t qbase = 2 * n_max;
  o.values[qbase] = norm(own_queue);
  if (table.one_hop.size() > k_max) o.truncated = true;
  const std::size_t live = std::min(table.one_hop.size(), k_max);
  for (std::size_t k = 0; k < live; ++k) {
    const NodeId nb = table.one_hop[k];
    o.live_neighbors.push_back(nb);
    o.action_mask[k] = 1;
    auto it = table.neighbor_queue_lengths.find(nb);
    if (it != table.neighbor_queue_lengths.end()) o.values[qbase + 1 + k] = norm(it->second);
  }
  return o;
}

HopDecision decide(const NeighborTable& table, const Packet& packet, std::span<const std::uint8_t> action,
                   std::size_t k_max) {
  HopDecision d;
  const auto& n1 = table.one_hop;
  auto it = std::find(n1.begin(), n1.end(), packet.prev_hop);
  const auto pos = static_cast<std::size_t>(it - n1.begin());
  if (it == n1.end() || pos >= k_max || pos >= action.size()) {
    d.unknown_hop = true;
    return d;
  }
  d.decision = action[pos] ? Decision::kForward : Decision::kDrop;
  return d;
}

void RewardAccumulator::sync(const Simulator& sim) {
  for (std::size_t k = 0; k < pending_.size(); ++k) {
    const std::uint64_t now = sim.credited_bits(static_cast<NodeId>(k));
    pending_[k] += now - seen_[k];
    seen_[k] = now;
  }
}

double RewardAccumulator::collect(NodeId node, Seconds window, double scale) {
  if (!(window > 0.0)) throw Error("reward window must be positive");
  const double r = static_cast<double>(pending_.at(node)) / window * scale;
  pending_[node] = 0;
  return r;
}

DeepMprAgent::DeepMprAgent(const PolicyParams& params, AgentOptions options) : params_(params), options_(options) {}

void DeepMprAgent::ensure_init(const Simulator& sim) {
  if (!slots_.empty()) return;
  const std::size_t n = sim.node_count();
  const auto& w = sim.config().rl.reward_weights;
  if (w.empty()) {
    weights_.assign(n, 1.0 / static_cast<double>(n));
  } else {
    if (w.size() != n) throw ConfigError("rl.reward_weights", "needs one weight per node");
    weights_ = w;
  }
  slots_.resize(n);
}

double DeepMprAgent::team_credit(const Simulator& sim) const {
  double s = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    s += weights_[k] * static_cast<double>(sim.credited_bits(static_cast<NodeId>(k)));
  }
  return s;
}

void DeepMprAgent::close_pending(const Simulator& sim, NodeId node, bool done) {
  NodeSlot& slot = slots_[node];
  if (!slot.open) return;
  const auto& rl = sim.config().rl;
  const double team = team_credit(sim);
  const std::uint64_t own = sim.credited_bits(node);
  const double r = rl.reward_scale * (rl.reward_self_weight * static_cast<double>(own - slot.self_mark) +
                                      (team - slot.team_mark));
  reward_sum_ += r;
  if (options_.record) {
    slot.steps.back().reward = r;
    slot.steps.back().done = done;
  }
  slot.open = false;
}

Decision DeepMprAgent::decide(Simulator& sim, NodeId node, const Packet& packet) {
  ensure_init(sim);
  const ScenarioConfig& cfg = sim.config();
  const NeighborTable& table = sim.table(node);
  const auto& n1 = table.one_hop;
  auto hop = std::find(n1.begin(), n1.end(), packet.prev_hop);
  if (hop == n1.end() || static_cast<std::size_t>(hop - n1.begin()) >= cfg.rl.k_max) {
    ++sim.trace().unknown_hop_drops;
    return Decision::kDrop;
  }

  Observation obs = observe(table, sim.queue_length(node), cfg.queue_capacity, cfg.rl.n_max, cfg.rl.k_max);
  if (obs.truncated) ++sim.trace().truncated_observations;
  RowMatrix x(1, static_cast<Eigen::Index>(obs.values.size()));
  for (std::size_t k = 0; k < obs.values.size(); ++k) x(0, static_cast<Eigen::Index>(k)) = obs.values[k];
  const ForwardCache fc = forward_batch(params_, x);
  const std::size_t m = cfg.rl.k_max;
  if (static_cast<std::size_t>(fc.logits.cols()) != m) throw ShapeMismatch("policy action width != rl.k_max");

  std::vector<double> logits(m);
  std::vector<std::uint8_t> action(m, 0);
  Rng& rng = sim.policy_rng();
  for (std::size_t j = 0; j < m; ++j) {
    logits[j] = fc.logits(0, static_cast<Eigen::Index>(j));
    if (!obs.action_mask[j]) continue;
    const double p = 1.0 / (1.0 + std::exp(-logits[j]));
    action[j] = options_.greedy ? (p >= 0.5) : (uniform01(rng) < p);
  }

  close_pending(sim, node, false);
  NodeSlot& slot = slots_[node];
  if (options_.record) {
    Transition t;
    t.log_prob = bernoulli_log_prob(logits, action, obs.action_mask);
    t.value = fc.values(0);
    t.obs = std::move(obs.values);
    t.mask = std::move(obs.action_mask);
    t.action = action;
    slot.steps.push_back(std::move(t));
  }
  slot.open = true;
  slot.team_mark = team_credit(sim);
  slot.self_mark = sim.credited_bits(node);
  ++decisions_;

  const HopDecision d = deepmpr::decide(table, packet, action, m);
  if (d.decision == Decision::kForward) ++forwards_;
  return d.decision;
}

void DeepMprAgent::on_episode_end(Simulator& sim) {
  if (slots_.empty()) return;
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    close_pending(sim, static_cast<NodeId>(k), true);
    if (options_.record && !slots_[k].steps.empty()) buffer_.trajectories.push_back(std::move(slots_[k].steps));
    slots_[k].steps.clear();
  }
}

Decision FixedActionAgent::decide(Simulator& sim, NodeId node, const Packet& packet) {
  const HopDecision d = deepmpr::decide(sim.table(node), packet, action_, sim.config().rl.k_max);
  if (d.unknown_hop) ++sim.trace().unknown_hop_drops;
  return d.decision;
}

NetworkShape policy_shape(const ScenarioConfig& config, std::vector<std::size_t> hidden, bool separate_critic) {
  NetworkShape s;
  s.input = observation_width(config.rl.n_max, config.rl.k_max);
  s.hidden = std::move(hidden);
  s.actions = config.rl.k_max;
  s.separate_critic = separate_critic;
  return s;
}

PolicyEpisode run_policy_episode(const ScenarioConfig& scenario, std::uint64_t seed, const PolicyParams& params,
                                 AgentOptions options) {
  ScenarioConfig c = scenario;
  c.seed = seed;
  c.mode = ForwardingMode::kDeepMpr;
  if (c.checkpoint.empty()) c.checkpoint = "(in-memory)";
  DeepMprAgent agent(params, options);
  Simulator sim(std::move(c), &agent);
  PolicyEpisode out;
  out.trace = sim.run();
  out.buffer = agent.take_buffer();
  out.decisions = agent.decisions();
  out.forwards = agent.forwards();
  out.reward_sum = agent.reward_sum();
  return out;
}

}  // namespace deepmpr
