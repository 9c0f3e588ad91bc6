#include "deepmpr/mpr.hpp"

#include <algorithm>
#include <sstream>

#include "deepmpr/topology.hpp"

namespace deepmpr {

std::string_view to_string(ForwardingMode mode) {
  switch (mode) {
    case ForwardingMode::kFlooding:
      return "flooding";
    case ForwardingMode::kSMpr:
      return "s-mpr";
    case ForwardingMode::kNsMpr:
      return "ns-mpr";
    case ForwardingMode::kDeepMpr:
      return "deep-mpr";
  }
  return "?";
}

std::optional<ForwardingMode> parse_forwarding_mode(std::string_view text) {
  for (auto m : {ForwardingMode::kFlooding, ForwardingMode::kSMpr, ForwardingMode::kNsMpr,
                 ForwardingMode::kDeepMpr}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

namespace {

// Bitset over two-hop indices.
using Cover = std::vector<std::uint64_t>;

Cover empty_cover(std::size_t bits) { return Cover((bits + 63) / 64, 0); }

void set_bit(Cover& c, std::size_t k) { c[k / 64] |= std::uint64_t{1} << (k % 64); }

std::size_t count_and_not(const Cover& a, const Cover& covered) {
  std::size_t n = 0;
  for (std::size_t w = 0; w < a.size(); ++w) n += static_cast<std::size_t>(__builtin_popcountll(a[w] & ~covered[w]));
  return n;
}

struct CoverProblem {
  std::vector<Cover> reach;  // per one-hop index
  Cover target;              // coverable two-hop nodes
  std::vector<NodeId> uncoverable;
};

CoverProblem make_problem(const NeighborTable& t) {
  CoverProblem p;
  const std::size_t m = t.two_hop.size();
  p.reach.assign(t.one_hop.size(), empty_cover(m));
  p.target = empty_cover(m);
  for (std::size_t z = 0; z < m; ++z) {
    bool any = false;
    for (std::size_t y = 0; y < t.one_hop.size(); ++y) {
      if (t.link_matrix.linked(t.one_hop[y], t.two_hop[z])) {
        set_bit(p.reach[y], z);
        any = true;
      }
    }
    if (any) {
      set_bit(p.target, z);
    } else {
      p.uncoverable.push_back(t.two_hop[z]);
    }
  }
  return p;
}

bool covers(const Cover& have, const Cover& target) {
  for (std::size_t w = 0; w < target.size(); ++w) {
    if ((target[w] & ~have[w]) != 0) return false;
  }
  return true;
}

}  // namespace

MprSelection select_mpr(const NeighborTable& table) {
  MprSelection out;
  CoverProblem p = make_problem(table);
  out.uncoverable = p.uncoverable;
  const std::size_t n1 = table.one_hop.size();
  const std::size_t n2 = table.two_hop.size();
  std::vector<bool> chosen(n1, false);
  Cover covered = empty_cover(n2);
  // everything outside the target counts as already covered
  for (std::size_t w = 0; w < covered.size(); ++w) covered[w] = ~p.target[w];

  auto take = [&](std::size_t y) {
    if (chosen[y]) return;
    chosen[y] = true;
    for (std::size_t w = 0; w < covered.size(); ++w) covered[w] |= p.reach[y][w];
  };

  // sole covers
  for (std::size_t z = 0; z < n2; ++z) {
    std::size_t count = 0;
    std::size_t sole = 0;
    for (std::size_t y = 0; y < n1; ++y) {
      if (p.reach[y][z / 64] >> (z % 64) & 1) {
        ++count;
        sole = y;
      }
    }
    if (count == 1) take(sole);
  }

  // greedy on remaining
  while (!covers(covered, p.target)) {
    std::size_t best = n1;
    std::size_t best_gain = 0;
    for (std::size_t y = 0; y < n1; ++y) {
      if (chosen[y]) continue;
      const std::size_t gain = count_and_not(p.reach[y], covered);
      if (gain > best_gain) {
        best_gain = gain;
        best = y;
      }
    }
    if (best == n1) break;  // unreachable for a consistent problem
    take(best);
  }

  for (std::size_t y = 0; y < n1; ++y) {
    if (chosen[y]) out.mpr_set.push_back(table.one_hop[y]);
  }
  return out;
}

std::vector<NodeId> brute_force_min_mpr(const NeighborTable& table) {
  const std::size_t n1 = table.one_hop.size();
  if (n1 > kBruteForceLimit) {
    std::ostringstream msg;
    msg << "|N1| = " << n1 << " exceeds brute-force limit " << kBruteForceLimit;
    throw TooLarge(msg.str());
  }
  CoverProblem p = make_problem(table);
  const std::size_t n2 = table.two_hop.size();
  for (std::size_t k = 0; k <= n1; ++k) {
    // combinations of size k in lexicographic index order
    std::vector<std::size_t> idx(k);
    for (std::size_t j = 0; j < k; ++j) idx[j] = j;
    while (true) {
      Cover have = empty_cover(n2);
      for (std::size_t y : idx) {
        for (std::size_t w = 0; w < have.size(); ++w) have[w] |= p.reach[y][w];
      }
      if (covers(have, p.target)) {
        std::vector<NodeId> out;
        for (std::size_t y : idx) out.push_back(table.one_hop[y]);
        return out;
      }
      // advance
      std::size_t j = k;
      while (j > 0 && idx[j - 1] == n1 - k + j - 1) --j;
      if (j == 0) break;
      ++idx[j - 1];
      for (std::size_t l = j; l < k; ++l) idx[l] = idx[l - 1] + 1;
    }
  }
  return {};  // unreachable: the full N1 covers every coverable node
}

bool covers_two_hop(const NeighborTable& table, std::span<const NodeId> set) {
  for (NodeId z : table.two_hop) {
    bool coverable = false;
    bool hit = false;
    for (NodeId y : table.one_hop) {
      if (!table.link_matrix.linked(y, z)) continue;
      coverable = true;
      if (std::find(set.begin(), set.end(), y) != set.end()) {
        hit = true;
        break;
      }
    }
    if (coverable && !hit) return false;
  }
  return true;
}

bool MprState::has_selector(NodeId u) const {
  return std::find(selectors.begin(), selectors.end(), u) != selectors.end();
}

std::vector<std::vector<NodeId>> announce_and_collect(std::span<const std::vector<NodeId>> mpr_sets,
                                                      std::span<const NeighborTable> tables) {
  std::vector<std::vector<NodeId>> selectors(tables.size());
  for (std::size_t u = 0; u < mpr_sets.size(); ++u) {
    for (NodeId v : mpr_sets[u]) {
      if (v >= tables.size()) continue;
      if (tables[v].is_one_hop(static_cast<NodeId>(u))) selectors[v].push_back(static_cast<NodeId>(u));
    }
  }
  for (std::size_t v = 0; v < tables.size(); ++v) {
    sort_by_psi(static_cast<NodeId>(v), tables.size(), selectors[v]);
  }
  return selectors;
}

void DuplicateCache::evict(Seconds now) {
  while (!fifo_.empty() && (now - fifo_.front().second > age_limit_ || fifo_.size() > capacity_)) {
    entries_.erase(fifo_.front().first);
    fifo_.pop_front();
  }
}

bool DuplicateCache::contains(NodeId source, std::uint32_t seq, Seconds now) {
  evict(now);
  return entries_.count(key(source, seq)) != 0;
}

bool DuplicateCache::insert(NodeId source, std::uint32_t seq, Seconds now) {
  evict(now);
  const auto k = key(source, seq);
  if (!entries_.emplace(k, now).second) return false;
  fifo_.emplace_back(k, now);
  evict(now);
  return true;
}

Decision forward_decision(ForwardingMode mode, const Packet& packet, const MprState& state,
                          DuplicateCache& cache, Seconds now) {
  if (!cache.insert(packet.source, packet.seq, now)) return Decision::kDrop;
  if (packet.ttl <= 1) return Decision::kDrop;
  switch (mode) {
    case ForwardingMode::kFlooding:
      return Decision::kForward;
    case ForwardingMode::kSMpr:
      return state.has_selector(packet.prev_hop) ? Decision::kForward : Decision::kDrop;
    case ForwardingMode::kNsMpr:
      return state.selectors.empty() ? Decision::kDrop : Decision::kForward;
    case ForwardingMode::kDeepMpr:
      break;
  }
  return Decision::kDrop;
}

}  // namespace deepmpr
