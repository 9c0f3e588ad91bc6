#ifndef DEEPMPR_NEIGHBOR_TABLE_HPP_
#define DEEPMPR_NEIGHBOR_TABLE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "deepmpr/common.hpp"

namespace deepmpr {

// Binary adjacency over an explicit node ordering. Row/column k refers to
// ordering()[k]. Diagonal is always zero.
class LinkMatrix {
 public:
  LinkMatrix() = default;
  explicit LinkMatrix(std::vector<NodeId> ordering);

  std::size_t dim() const { return ordering_.size(); }
  const std::vector<NodeId>& ordering() const { return ordering_; }

  std::optional<std::size_t> index_of(NodeId node) const;
  bool contains(NodeId node) const { return index_of(node).has_value(); }

  bool at(std::size_t row, std::size_t col) const { return entries_[row * dim() + col] != 0; }
  void set(std::size_t row, std::size_t col, bool value);

  // Both directions, by node id. Ignores self-loops and unknown ids.
  void connect(NodeId a, NodeId b);
  // False if either id is absent.
  bool linked(NodeId from, NodeId to) const;

  std::vector<std::uint8_t> row(std::size_t r) const;
  std::vector<std::uint8_t> col(std::size_t c) const;

  bool operator==(const LinkMatrix& other) const {
    return ordering_ == other.ordering_ && entries_ == other.entries_;
  }

 private:
  std::vector<NodeId> ordering_;
  std::vector<std::int32_t> position_;  // node id -> index, -1 if absent
  std::vector<std::uint8_t> entries_;
};

// Local view of node `self`: N1, N2, and the local link matrix over
// {self} u N1 u N2 ordered by the circular permutation rooted at self.
struct NeighborTable {
  NodeId self = 0;
  std::size_t node_count = 1;
  std::vector<NodeId> one_hop;  // psi_self order
  std::vector<NodeId> two_hop;  // psi_self order
  LinkMatrix link_matrix;
  std::map<NodeId, std::uint32_t> neighbor_queue_lengths;

  // n_i = |N1 u N2| + 1
  std::size_t local_size() const { return one_hop.size() + two_hop.size() + 1; }

  bool is_one_hop(NodeId n) const;
  bool is_two_hop(NodeId n) const;

  bool operator==(const NeighborTable& other) const = default;
};

}  // namespace deepmpr

#endif  // DEEPMPR_NEIGHBOR_TABLE_HPP_
