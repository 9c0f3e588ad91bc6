#include "deepmpr/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace deepmpr {

LinkMatrix::LinkMatrix(std::vector<NodeId> ordering)
    : ordering_(std::move(ordering)), entries_(ordering_.size() * ordering_.size(), 0) {
  NodeId max_id = 0;
  for (NodeId n : ordering_) max_id = std::max(max_id, n);
  position_.assign(ordering_.empty() ? 0 : max_id + 1, -1);
  for (std::size_t k = 0; k < ordering_.size(); ++k) position_[ordering_[k]] = static_cast<std::int32_t>(k);
}

std::optional<std::size_t> LinkMatrix::index_of(NodeId node) const {
  if (node >= position_.size() || position_[node] < 0) return std::nullopt;
  return static_cast<std::size_t>(position_[node]);
}

void LinkMatrix::set(std::size_t row, std::size_t col, bool value) {
  if (row == col) return;
  entries_[row * dim() + col] = value ? 1 : 0;
}

void LinkMatrix::connect(NodeId a, NodeId b) {
  auto ia = index_of(a);
  auto ib = index_of(b);
  if (!ia || !ib || *ia == *ib) return;
  set(*ia, *ib, true);
  set(*ib, *ia, true);
}

bool LinkMatrix::linked(NodeId from, NodeId to) const {
  auto ia = index_of(from);
  auto ib = index_of(to);
  return ia && ib && at(*ia, *ib);
}

std::vector<std::uint8_t> LinkMatrix::row(std::size_t r) const {
  return {entries_.begin() + static_cast<std::ptrdiff_t>(r * dim()),
          entries_.begin() + static_cast<std::ptrdiff_t>((r + 1) * dim())};
}

std::vector<std::uint8_t> LinkMatrix::col(std::size_t c) const {
  std::vector<std::uint8_t> out(dim());
  for (std::size_t r = 0; r < dim(); ++r) out[r] = entries_[r * dim() + c];
  return out;
}

bool NeighborTable::is_one_hop(NodeId n) const {
  return std::find(one_hop.begin(), one_hop.end(), n) != one_hop.end();
}

bool NeighborTable::is_two_hop(NodeId n) const {
  return std::find(two_hop.begin(), two_hop.end(), n) != two_hop.end();
}

std::vector<NodeId> circular_permutation(NodeId i, std::size_t n) {
  std::vector<NodeId> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<NodeId>((i + k) % n);
  return out;
}

void sort_by_psi(NodeId self, std::size_t n, std::vector<NodeId>& ids) {
  std::sort(ids.begin(), ids.end(),
            [&](NodeId a, NodeId b) { return psi_rank(self, a, n) < psi_rank(self, b, n); });
}

NeighborTable build_neighbor_table(NodeId self, std::size_t node_count,
                                   const std::map<NodeId, std::vector<NodeId>>& reported_lists) {
  NeighborTable t;
  t.self = self;
  t.node_count = node_count;
  for (const auto& [y, list] : reported_lists) {
    if (y != self) t.one_hop.push_back(y);
  }
  std::set<NodeId> second;
  for (const auto& [y, list] : reported_lists) {
    for (NodeId x : list) {
      if (x == self || x >= node_count) continue;
      if (reported_lists.count(x)) continue;
      second.insert(x);
    }
  }
  t.two_hop.assign(second.begin(), second.end());
  sort_by_psi(self, node_count, t.one_hop);
  sort_by_psi(self, node_count, t.two_hop);

  std::vector<NodeId> order;
  order.reserve(t.local_size());
  order.push_back(self);
  order.insert(order.end(), t.one_hop.begin(), t.one_hop.end());
  order.insert(order.end(), t.two_hop.begin(), t.two_hop.end());
  sort_by_psi(self, node_count, order);
  t.link_matrix = LinkMatrix(std::move(order));
  for (const auto& [y, list] : reported_lists) {
    t.link_matrix.connect(self, y);
    for (NodeId x : list) t.link_matrix.connect(y, x);
  }
  return t;
}

LinkMatrix global_link_matrix(std::span<const Vec2> positions, double range) {
  std::vector<NodeId> ids(positions.size());
  for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = static_cast<NodeId>(k);
  LinkMatrix m(std::move(ids));
  for (std::size_t a = 0; a < positions.size(); ++a) {
    for (std::size_t b = a + 1; b < positions.size(); ++b) {
      if (distance(positions[a], positions[b]) <= range) m.connect(static_cast<NodeId>(a), static_cast<NodeId>(b));
    }
  }
  return m;
}

NeighborTable ground_truth_table(const LinkMatrix& global, NodeId self) {
  const auto self_idx = global.index_of(self);
  if (!self_idx) throw UnknownNode("node not in global link matrix");
  std::map<NodeId, std::vector<NodeId>> lists;
  for (std::size_t y = 0; y < global.dim(); ++y) {
    if (!global.at(*self_idx, y)) continue;
    std::vector<NodeId> nbrs;
    for (std::size_t x = 0; x < global.dim(); ++x) {
      if (global.at(y, x)) nbrs.push_back(global.ordering()[x]);
    }
    lists.emplace(global.ordering()[y], std::move(nbrs));
  }
  return build_neighbor_table(self, global.dim(), lists);
}

bool is_connected(const LinkMatrix& global) {
  const std::size_t n = global.dim();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> frontier{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!frontier.empty()) {
    std::size_t a = frontier.front();
    frontier.pop_front();
    for (std::size_t b = 0; b < n; ++b) {
      if (!seen[b] && global.at(a, b)) {
        seen[b] = true;
        ++count;
        frontier.push_back(b);
      }
    }
  }
  return count == n;
}

std::vector<NodeId> covering_neighbors(NodeId z, const NeighborTable& table) {
  if (!table.is_two_hop(z)) {
    std::ostringstream msg;
    msg << "node " << z << " is not a two-hop neighbor of " << table.self;
    throw UnknownNode(msg.str());
  }
  std::vector<NodeId> out;
  for (NodeId y : table.one_hop) {
    if (table.link_matrix.linked(y, z)) out.push_back(y);
  }
  return out;
}

std::vector<NodeId> reach_set(NodeId y, const NeighborTable& table) {
  if (!table.is_one_hop(y)) {
    std::ostringstream msg;
    msg << "node " << y << " is not a one-hop neighbor of " << table.self;
    throw UnknownNode(msg.str());
  }
  std::vector<NodeId> out;
  for (NodeId z : table.two_hop) {
    if (table.link_matrix.linked(y, z)) out.push_back(z);
  }
  return out;
}

}  // namespace deepmpr
