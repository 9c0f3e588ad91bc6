#ifndef DEEPMPR_TOPOLOGY_HPP_
#define DEEPMPR_TOPOLOGY_HPP_

#include <map>
#include <span>
#include <vector>

#include "deepmpr/common.hpp"
#include "deepmpr/mobility.hpp"
#include "deepmpr/neighbor_table.hpp"

namespace deepmpr {

// psi_i = [i, i+1, ..., n-1, 0, ..., i-1] over 0-based ids.
std::vector<NodeId> circular_permutation(NodeId i, std::size_t n);

// Position of `node` within psi_self.
inline std::size_t psi_rank(NodeId self, NodeId node, std::size_t n) {
  return (static_cast<std::size_t>(node) + n - self) % n;
}

// Sorts ids in place into psi_self order.
void sort_by_psi(NodeId self, std::size_t n, std::vector<NodeId>& ids);

// Builds a local table for `self` from the neighbor lists reported by each
// one-hop neighbor (key = neighbor, value = that neighbor's N1). Links are
// recorded symmetrically: self-y for every y in N1 and y-x for every x in
// the list of y.
NeighborTable build_neighbor_table(NodeId self, std::size_t node_count,
                                   const std::map<NodeId, std::vector<NodeId>>& reported_lists);

// Global adjacency over node ids 0..n-1: a link where distance <= range.
LinkMatrix global_link_matrix(std::span<const Vec2> positions, double range);

// The table a node would hold with perfect discovery over `global`.
NeighborTable ground_truth_table(const LinkMatrix& global, NodeId self);

// All nodes reachable from node 0 in `global`.
bool is_connected(const LinkMatrix& global);

// N~1(z; i): one-hop neighbors of i linked to z. Throws UnknownNode if z is
// not in two_hop.
std::vector<NodeId> covering_neighbors(NodeId z, const NeighborTable& table);

// N~2(y; i): two-hop neighbors of i linked to y. Throws UnknownNode if y is
// not in one_hop.
std::vector<NodeId> reach_set(NodeId y, const NeighborTable& table);

}  // namespace deepmpr

#endif  // DEEPMPR_TOPOLOGY_HPP_
