#ifndef DEEPMPR_SIMULATOR_HPP_
#define DEEPMPR_SIMULATOR_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "deepmpr/event_queue.hpp"
#include "deepmpr/metrics.hpp"
#include "deepmpr/mobility.hpp"
#include "deepmpr/mpr.hpp"
#include "deepmpr/radio.hpp"
#include "deepmpr/rng.hpp"
#include "deepmpr/scenario.hpp"

namespace deepmpr {

class Simulator;

// Forwarding decision maker for deep-mpr mode. Consulted once per unique
// packet whose TTL still allows a relay.
class ForwardingAgent {
 public:
  virtual ~ForwardingAgent() = default;
  virtual Decision decide(Simulator& sim, NodeId node, const Packet& packet) = 0;
  // Called once after the last event of the episode.
  virtual void on_episode_end(Simulator& sim) { (void)sim; }
};

struct NodeRuntime {
  MobilityState mobility;
  NeighborDiscovery discovery;
  MprState mpr;
  DuplicateCache duplicates;
  std::deque<Packet> queue;
  bool hello_pending = false;
  bool tx_armed = false;
  Seconds busy_until = 0.0;
  std::uint32_t next_seq = 0;
  std::uint64_t generated = 0;
  // First-time deliveries caused by this node's transmissions, cumulative.
  std::uint64_t credited_bits = 0;
};

// One episode of the multicast network. Not reusable: construct, run(), read.
class Simulator {
 public:
  // Throws ConfigError if the scenario fails range checks, or if deep-mpr
  // mode is requested without an agent.
  explicit Simulator(ScenarioConfig config, ForwardingAgent* agent = nullptr);

  EpisodeTrace run();

  // Invoked for each event just before it is handled.
  void set_observer(std::function<void(const Event&, const Simulator&)> observer) {
    observer_ = std::move(observer);
  }

  Seconds now() const { return events_.now(); }
  const ScenarioConfig& config() const { return config_; }
  std::size_t node_count() const { return nodes_.size(); }
  const NodeRuntime& node(NodeId id) const { return nodes_[id]; }
  const NeighborTable& table(NodeId id) const { return nodes_[id].discovery.table(); }
  std::size_t queue_length(NodeId id) const { return nodes_[id].queue.size(); }
  std::span<const Vec2> positions() const { return positions_; }
  const std::vector<NodeId>& sources() const { return sources_; }
  std::uint64_t credited_bits(NodeId id) const { return nodes_[id].credited_bits; }
  Rng& policy_rng() { return policy_rng_; }
  EpisodeTrace& trace() { return metrics_.trace(); }

  // Rebuilds the node's table if any remembered HELLO has expired.
  void refresh_if_stale(NodeId id);

 private:
  void schedule(Event e) { events_.schedule(std::move(e)); }
  void handle(const Event& e);
  void on_tx_start(NodeId i);
  void on_rx(NodeId j, NodeId from, const Frame& frame);
  void on_data(NodeId j, NodeId from, const Packet& packet);
  void on_hello_due(NodeId i);
  void on_mobility_tick();
  void on_flow_arrival(NodeId s);
  void refresh(NodeId i);
  void enqueue(NodeId i, const Packet& packet);
  void kick(NodeId i);
  Seconds next_arrival_gap();

  ScenarioConfig config_;
  ForwardingAgent* agent_;
  EventQueue events_;
  MetricsRecorder metrics_;
  std::vector<NodeRuntime> nodes_;
  std::vector<Vec2> positions_;
  std::vector<NodeId> sources_;
  Rng mobility_rng_;
  Rng radio_rng_;
  Rng hello_rng_;
  Rng flow_rng_;
  Rng policy_rng_;
  std::function<void(const Event&, const Simulator&)> observer_;
  bool ran_ = false;
};

// Runs one episode of `scenario` with the root seed replaced by `seed`.
EpisodeTrace run_episode(const ScenarioConfig& scenario, std::uint64_t seed, ForwardingAgent* agent = nullptr);

}  // namespace deepmpr

#endif  // DEEPMPR_SIMULATOR_HPP_
