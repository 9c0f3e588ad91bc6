#ifndef DEEPMPR_MPR_HPP_
#define DEEPMPR_MPR_HPP_

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deepmpr/common.hpp"
#include "deepmpr/frame.hpp"
#include "deepmpr/neighbor_table.hpp"

namespace deepmpr {

enum class ForwardingMode { kFlooding, kSMpr, kNsMpr, kDeepMpr };

std::string_view to_string(ForwardingMode mode);
std::optional<ForwardingMode> parse_forwarding_mode(std::string_view text);

struct MprSelection {
  std::vector<NodeId> mpr_set;      // psi_self order
  std::vector<NodeId> uncoverable;  // two-hop nodes with no covering neighbor
};

// Greedy OLSR-style cover of N2 by N1: sole covers first, then repeatedly the
// candidate reaching the most uncovered two-hop nodes (ties by psi order).
MprSelection select_mpr(const NeighborTable& table);

// Smallest subset of N1 covering every coverable N2 node; ties resolved by
// psi-lexicographic order. Throws TooLarge when |N1| > kBruteForceLimit.
inline constexpr std::size_t kBruteForceLimit = 20;
std::vector<NodeId> brute_force_min_mpr(const NeighborTable& table);

// True when every coverable two-hop node is adjacent to some member of `set`.
bool covers_two_hop(const NeighborTable& table, std::span<const NodeId> set);

struct MprState {
  std::vector<NodeId> mpr_set;    // M(i)
  std::vector<NodeId> selectors;  // K(i)

  bool has_selector(NodeId u) const;
};

// Selector sets implied by every node announcing its MPR set to its one-hop
// neighbors: K(i) = { u : i in M(u) and u in N1(i) }.
std::vector<std::vector<NodeId>> announce_and_collect(std::span<const std::vector<NodeId>> mpr_sets,
                                                      std::span<const NeighborTable> tables);

// Remembers (source, seq) pairs for an age limit, FIFO-evicting beyond capacity.
class DuplicateCache {
 public:
  explicit DuplicateCache(Seconds age_limit = 30.0, std::size_t capacity = 4096)
      : age_limit_(age_limit), capacity_(capacity) {}

  bool contains(NodeId source, std::uint32_t seq, Seconds now);
  // Returns false if the pair was already present.
  bool insert(NodeId source, std::uint32_t seq, Seconds now);
  std::size_t size() const { return entries_.size(); }

 private:
  static std::uint64_t key(NodeId source, std::uint32_t seq) {
    return (static_cast<std::uint64_t>(source) << 32) | seq;
  }
  void evict(Seconds now);

  Seconds age_limit_;
  std::size_t capacity_;
  std::unordered_map<std::uint64_t, Seconds> entries_;
  std::deque<std::pair<std::uint64_t, Seconds>> fifo_;
};

enum class Decision { kForward, kDrop };

// Classic forwarding rules. Marks the packet as seen. Duplicates and packets
// whose TTL would reach zero are always dropped. kDeepMpr is not handled here.
Decision forward_decision(ForwardingMode mode, const Packet& packet, const MprState& state,
                          DuplicateCache& cache, Seconds now);

}  // namespace deepmpr

#endif  // DEEPMPR_MPR_HPP_
