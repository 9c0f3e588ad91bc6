#ifndef DEEPMPR_FRAME_HPP_
#define DEEPMPR_FRAME_HPP_

#include <cstdint>
#include <variant>
#include <vector>

#include "deepmpr/common.hpp"

namespace deepmpr {

// Multicast datagram p = (s, i, h): generated at `source`, last transmitted by
// `prev_hop`. The holder i is implicit in whoever owns the copy.
struct Packet {
  NodeId source = kNoNode;
  std::uint32_t seq = 0;
  NodeId prev_hop = kNoNode;
  std::uint32_t ttl = 255;
  std::uint32_t size_bits = 256 * 8;
};

// Periodic neighbor advertisement. `mpr_set` carries the sender's current MPR
// choices so selectors learn about them without an extra message type.
struct HelloMessage {
  NodeId sender = kNoNode;
  std::vector<NodeId> neighbor_list;
  std::vector<NodeId> mpr_set;
  std::uint32_t queue_length = 0;
  std::uint32_t size_bits = 64 * 8;
};

using Frame = std::variant<Packet, HelloMessage>;

inline std::uint32_t frame_bits(const Frame& f) {
  return std::visit([](const auto& m) { return m.size_bits; }, f);
}

}  // namespace deepmpr

#endif  // DEEPMPR_FRAME_HPP_
