#ifndef DEEPMPR_RADIO_HPP_
#define DEEPMPR_RADIO_HPP_

#include <map>
#include <memory>
#include <span>
#include <vector>

#include "deepmpr/common.hpp"
#include "deepmpr/event_queue.hpp"
#include "deepmpr/frame.hpp"
#include "deepmpr/mobility.hpp"
#include "deepmpr/neighbor_table.hpp"
#include "deepmpr/rng.hpp"

namespace deepmpr {

// Range-dependent loss: reliable up to full_range, linear ramp to zero at
// max_range, nothing beyond.
struct RadioModel {
  double full_range = 200.0;  // m
  double max_range = 250.0;   // m
  double link_rate = 1e6;     // bit/s

  double delivery_probability(double distance) const;
  Seconds airtime(std::uint32_t bits) const { return static_cast<double>(bits) / link_rate; }

  bool operator==(const RadioModel&) const = default;
};

// Reception events for one broadcast by `node` at time t. Each other node
// within max_range receives independently; the loss draw consumes `loss_rng`
// only for links strictly inside the ramp.
std::vector<Event> broadcast(const RadioModel& radio, NodeId node, std::shared_ptr<const Frame> frame,
                             Seconds t, std::span<const Vec2> positions, Rng& loss_rng);

// Gap until the next HELLO, uniform over [lo, hi].
Seconds next_hello_interval(Rng& rng, Seconds lo, Seconds hi);

struct HelloRecord {
  Seconds heard_at = 0.0;
  HelloMessage message;
};

// Rebuilds a node's table from the HELLOs it currently remembers. Records
// older than `expiry` are ignored.
NeighborTable refresh_tables(NodeId self, std::size_t node_count,
                             const std::map<NodeId, HelloRecord>& heard, Seconds now, Seconds expiry);

// Soft-state HELLO bookkeeping for one node.
class NeighborDiscovery {
 public:
  NeighborDiscovery() = default;
  NeighborDiscovery(NodeId self, std::size_t node_count) : self_(self), node_count_(node_count) {
    table_.self = self;
    table_.node_count = node_count;
  }

  void ingest(const HelloMessage& hello, Seconds now);

  // Evicts records older than `expiry` and rebuilds the table. Returns true
  // if N1, N2 or the link matrix changed.
  bool refresh(Seconds now, Seconds expiry);

  // True if some remembered HELLO is older than `expiry`.
  bool has_stale(Seconds now, Seconds expiry) const;

  const NeighborTable& table() const { return table_; }

  // Neighbors whose latest HELLO lists self as an MPR: K(self).
  const std::vector<NodeId>& selectors() const { return selectors_; }

  HelloMessage make_hello(std::vector<NodeId> mpr_set, std::uint32_t queue_length,
                          std::uint32_t size_bits) const;

  const std::map<NodeId, HelloRecord>& heard() const { return heard_; }

 private:
  NodeId self_ = 0;
  std::size_t node_count_ = 1;
  std::map<NodeId, HelloRecord> heard_;
  NeighborTable table_;
  std::vector<NodeId> selectors_;
};

}  // namespace deepmpr

#endif  // DEEPMPR_RADIO_HPP_
