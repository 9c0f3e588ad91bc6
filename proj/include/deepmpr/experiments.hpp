#ifndef DEEPMPR_EXPERIMENTS_HPP_
#define DEEPMPR_EXPERIMENTS_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include "deepmpr/metrics.hpp"
#include "deepmpr/mpr.hpp"
#include "deepmpr/policy_net.hpp"
#include "deepmpr/radio.hpp"
#include "deepmpr/scenario.hpp"

namespace deepmpr {

struct CompareRow {
  ForwardingMode mode = ForwardingMode::kSMpr;
  double rate = 0.0;
  std::size_t episodes = 0;
  double delivery_mean = 0.0;
  double delivery_std = 0.0;
  double overhead_mean = 0.0;  // over episodes with goodput
  double overhead_std = 0.0;
  double tx_mean = 0.0;        // data transmissions per episode
  std::size_t zero_goodput = 0;
};

struct CompareOptions {
  const PolicyParams* params = nullptr;  // required for deep-mpr
  bool greedy = false;
  // Sweep points; empty uses config.sweep_rates.
  std::vector<double> rates;
  // Called for every finished episode, in sweep order.
  std::function<void(ForwardingMode, double, std::uint64_t, const EpisodeTrace&)> on_episode;
};

// Every mode x rate x seed episode. Rows ordered by mode, then rate.
std::vector<CompareRow> compare(const ScenarioConfig& config, const std::vector<ForwardingMode>& modes,
                                const std::vector<std::uint64_t>& seeds, const CompareOptions& options = {});

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

// Uniform placement in the arena, redrawn until the full-delivery-range
// graph is connected when `connected` is set.
std::vector<Vec2> sample_static_layout(std::size_t n, double side, const RadioModel& radio, Rng& rng,
                                       bool connected = true);

struct MprCheckReport {
  std::size_t snapshots = 0;
  std::size_t covered = 0;
  std::size_t oracle_checked = 0;
  std::size_t dominance_violations = 0;
  std::size_t sole_cover_violations = 0;
  std::size_t empty_two_hop = 0;
  std::size_t empty_two_hop_mismatch = 0;
  double heuristic_mean = 0.0;  // over oracle-checked snapshots
  double oracle_mean = 0.0;
  std::map<std::size_t, std::size_t> excess_histogram;  // |heuristic| - |oracle| -> count
  double seconds = 0.0;

  bool passed() const {
    return covered == snapshots && dominance_violations == 0 && sole_cover_violations == 0 &&
           empty_two_hop_mismatch == 0;
  }
};

// Samples random geometric neighborhoods (node_count nodes in the arena,
// links within the full-delivery range) rooted at a random node with at
// least one neighbor. Snapshots with |N1| <= oracle_limit are also solved
// exactly. When oracle_only is set, only such snapshots are counted.
MprCheckReport mpr_check(const ScenarioConfig& config, std::uint64_t seed, std::size_t snapshots,
                         std::size_t oracle_limit = 12, bool oracle_only = false);

void write_mpr_report(std::ostream& out, const MprCheckReport& report);

}  // namespace deepmpr

#endif  // DEEPMPR_EXPERIMENTS_HPP_
