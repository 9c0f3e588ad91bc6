#ifndef DEEPMPR_RL_ENV_HPP_
#define DEEPMPR_RL_ENV_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "deepmpr/metrics.hpp"
#include "deepmpr/neighbor_table.hpp"
#include "deepmpr/policy_net.hpp"
#include "deepmpr/ppo.hpp"
#include "deepmpr/simulator.hpp"

namespace deepmpr {

inline std::size_t observation_width(std::size_t n_max, std::size_t k_max) { return 2 * n_max + 1 + k_max; }

// Layout: own_row[n_max], own_col[n_max], queues[1 + k_max]. The row and
// column come from the local link matrix in psi order, so slot 0 is the node
// itself. Queue slots hold self then N1 in psi order, divided by capacity.
struct Observation {
  std::vector<double> values;
  std::vector<std::uint8_t> action_mask;  // k_max wide; 1 for live N1 slots
  std::vector<NodeId> live_neighbors;     // N1 in psi order, at most k_max
  bool truncated = false;                 // neighborhood exceeded n_max or k_max
};

Observation observe(const NeighborTable& table, std::size_t own_queue, std::size_t queue_capacity,
                    std::size_t n_max, std::size_t k_max);

struct HopDecision {
  Decision decision = Decision::kDrop;
  bool unknown_hop = false;  // previous hop not among the first k_max of N1
};

// Picks the action component at the previous hop's psi position in N1.
HopDecision decide(const NeighborTable& table, const Packet& packet, std::span<const std::uint8_t> action,
                   std::size_t k_max);

// Per-node ledger of first-time-delivered bits caused by each node's
// transmissions. Reading a node resets it.
class RewardAccumulator {
 public:
  explicit RewardAccumulator(std::size_t node_count) : pending_(node_count, 0), seen_(node_count, 0) {}

  void add(NodeId node, std::uint64_t bits) { pending_.at(node) += bits; }
  // Pulls the simulator's cumulative credit counters into the ledger.
  void sync(const Simulator& sim);
  std::uint64_t pending(NodeId node) const { return pending_.at(node); }
  // Bits since the last read, per second of window, times scale.
  double collect(NodeId node, Seconds window, double scale = 1.0);

 private:
  std::vector<std::uint64_t> pending_;
  std::vector<std::uint64_t> seen_;
};

struct AgentOptions {
  bool record = false;  // keep transitions for training
  bool greedy = false;  // forward iff p >= 0.5 instead of sampling
};

// Shared-parameter policy acting for every node. Samples a fresh action
// vector for each unique packet. The reward of a decision is what the team
// earned between it and the same node's next decision (or episode end).
class DeepMprAgent : public ForwardingAgent {
 public:
  DeepMprAgent(const PolicyParams& params, AgentOptions options = {});

  Decision decide(Simulator& sim, NodeId node, const Packet& packet) override;
  void on_episode_end(Simulator& sim) override;

  RolloutBuffer take_buffer() { return std::move(buffer_); }
  std::uint64_t decisions() const { return decisions_; }
  std::uint64_t forwards() const { return forwards_; }
  double reward_sum() const { return reward_sum_; }

 private:
  struct NodeSlot {
    Trajectory steps;
    bool open = false;
    double team_mark = 0.0;
    std::uint64_t self_mark = 0;
  };
  void ensure_init(const Simulator& sim);
  double team_credit(const Simulator& sim) const;
  void close_pending(const Simulator& sim, NodeId node, bool done);

  const PolicyParams& params_;
  AgentOptions options_;
  std::vector<double> weights_;
  std::vector<NodeSlot> slots_;
  RolloutBuffer buffer_;
  std::uint64_t decisions_ = 0;
  std::uint64_t forwards_ = 0;
  double reward_sum_ = 0.0;
};

// Applies one fixed action vector to every decision.
class FixedActionAgent : public ForwardingAgent {
 public:
  explicit FixedActionAgent(std::vector<std::uint8_t> action) : action_(std::move(action)) {}
  Decision decide(Simulator& sim, NodeId node, const Packet& packet) override;

 private:
  std::vector<std::uint8_t> action_;
};

NetworkShape policy_shape(const ScenarioConfig& config, std::vector<std::size_t> hidden = {64, 64},
                          bool separate_critic = false);

struct PolicyEpisode {
  EpisodeTrace trace;
  RolloutBuffer buffer;
  std::uint64_t decisions = 0;
  std::uint64_t forwards = 0;
  double reward_sum = 0.0;
};

// Runs `scenario` in deep-mpr mode with the given parameters.
PolicyEpisode run_policy_episode(const ScenarioConfig& scenario, std::uint64_t seed, const PolicyParams& params,
                                 AgentOptions options = {});

}  // namespace deepmpr

#endif  // DEEPMPR_RL_ENV_HPP_
