#include "deepmpr/radio.hpp"

#include <algorithm>

#include "deepmpr/topology.hpp"

namespace deepmpr {

double RadioModel::delivery_probability(double d) const {
  if (d <= full_range) return 1.0;
  if (d >= max_range) return 0.0;
  return (max_range - d) / (max_range - full_range);
}

std::vector<Event> broadcast(const RadioModel& radio, NodeId node, std::shared_ptr<const Frame> frame,
                             Seconds t, std::span<const Vec2> positions, Rng& loss_rng) {
  std::vector<Event> out;
  const Seconds arrival = t + radio.airtime(frame_bits(*frame));
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (j == node) continue;
    const double p = radio.delivery_probability(distance(positions[node], positions[j]));
    if (p <= 0.0) continue;
    if (p < 1.0 && uniform01(loss_rng) >= p) continue;
    Event e;
    e.time = arrival;
    e.kind = EventKind::kRxComplete;
    e.node = static_cast<NodeId>(j);
    e.from = node;
    e.frame = frame;
    out.push_back(std::move(e));
  }
  return out;
}

Seconds next_hello_interval(Rng& rng, Seconds lo, Seconds hi) { return uniform(rng, lo, hi); }

NeighborTable refresh_tables(NodeId self, std::size_t node_count,
                             const std::map<NodeId, HelloRecord>& heard, Seconds now, Seconds expiry) {
  std::map<NodeId, std::vector<NodeId>> lists;
  std::map<NodeId, std::uint32_t> queues;
  for (const auto& [sender, record] : heard) {
    if (sender == self || now - record.heard_at > expiry) continue;
    lists.emplace(sender, record.message.neighbor_list);
    queues.emplace(sender, record.message.queue_length);
  }
  NeighborTable t = build_neighbor_table(self, node_count, lists);
  t.neighbor_queue_lengths = std::move(queues);
  return t;
}

void NeighborDiscovery::ingest(const HelloMessage& hello, Seconds now) {
  if (hello.sender == self_) return;
  heard_[hello.sender] = HelloRecord{now, hello};
}

bool NeighborDiscovery::has_stale(Seconds now, Seconds expiry) const {
  for (const auto& [sender, record] : heard_) {
    if (now - record.heard_at > expiry) return true;
  }
  return false;
}

bool NeighborDiscovery::refresh(Seconds now, Seconds expiry) {
  for (auto it = heard_.begin(); it != heard_.end();) {
    if (now - it->second.heard_at > expiry) {
      it = heard_.erase(it);
    } else {
      ++it;
    }
  }
  NeighborTable next = refresh_tables(self_, node_count_, heard_, now, expiry);
  const bool changed = next.one_hop != table_.one_hop || next.two_hop != table_.two_hop ||
                       !(next.link_matrix == table_.link_matrix);
  table_ = std::move(next);

  selectors_.clear();
  for (const auto& [sender, record] : heard_) {
    const auto& m = record.message.mpr_set;
    if (std::find(m.begin(), m.end(), self_) != m.end()) selectors_.push_back(sender);
  }
  sort_by_psi(self_, node_count_, selectors_);
  return changed;
}

HelloMessage NeighborDiscovery::make_hello(std::vector<NodeId> mpr_set, std::uint32_t queue_length,
                                           std::uint32_t size_bits) const {
  HelloMessage h;
  h.sender = self_;
  h.neighbor_list = table_.one_hop;
  h.mpr_set = std::move(mpr_set);
  h.queue_length = queue_length;
  h.size_bits = size_bits;
  return h;
}

}  // namespace deepmpr
