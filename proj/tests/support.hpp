#ifndef DEEPMPR_TESTS_SUPPORT_HPP_
#define DEEPMPR_TESTS_SUPPORT_HPP_

#include <utility>
#include <vector>

#include "deepmpr/neighbor_table.hpp"
#include "deepmpr/scenario.hpp"
#include "deepmpr/topology.hpp"

namespace deepmpr::test {

using Edge = std::pair<NodeId, NodeId>;

inline LinkMatrix graph(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<NodeId> ids(n);
  for (std::size_t k = 0; k < n; ++k) ids[k] = static_cast<NodeId>(k);
  LinkMatrix g(ids);
  for (auto [a, b] : edges) g.connect(a, b);
  return g;
}

inline NeighborTable table_from_edges(std::size_t n, NodeId self, const std::vector<Edge>& edges) {
  return ground_truth_table(graph(n, edges), self);
}

// Static network with lossless links inside the full range.
inline ScenarioConfig static_scenario(std::vector<Vec2> positions, ForwardingMode mode = ForwardingMode::kFlooding) {
  ScenarioConfig c;
  c.node_count = positions.size();
  c.arena_side = 1000.0;
  c.positions = std::move(positions);
  c.mobile = false;
  c.radio.max_range = c.radio.full_range;
  c.mode = mode;
  return c;
}

// Three nodes within range of each other.
inline std::vector<Vec2> triangle() { return {{100, 100}, {200, 100}, {150, 180}}; }

// 0 - 1 - 2 with 0 and 2 out of range.
inline std::vector<Vec2> chain3() { return {{50, 100}, {200, 100}, {350, 100}}; }

}  // namespace deepmpr::test

#endif  // DEEPMPR_TESTS_SUPPORT_HPP_
