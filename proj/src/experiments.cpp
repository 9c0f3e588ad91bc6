#include "deepmpr/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "deepmpr/rl_env.hpp"
#include "deepmpr/simulator.hpp"
#include "deepmpr/topology.hpp"

namespace deepmpr {

namespace {

struct Moments {
  double sum = 0.0;
  double sq = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double stddev() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)));
  }
};

}  // namespace

std::vector<CompareRow> compare(const ScenarioConfig& config, const std::vector<ForwardingMode>& modes,
                                const std::vector<std::uint64_t>& seeds, const CompareOptions& options) {
  if (seeds.empty()) throw ConfigError("compare.seeds", "need at least one seed");
  const std::vector<double>& rates = options.rates.empty() ? config.sweep_rates : options.rates;
  if (rates.empty()) throw ConfigError("compare.rates", "need at least one rate");
  std::vector<CompareRow> rows;
  for (ForwardingMode mode : modes) {
    if (mode == ForwardingMode::kDeepMpr && options.params == nullptr) {
      throw ConfigError("forwarding.checkpoint", "deep-mpr comparison needs trained parameters");
    }
    for (double rate : rates) {
      ScenarioConfig c = config;
      c.flow.rate = rate;
      c.mode = mode;
      Moments delivery, overhead, tx;
      CompareRow row;
      row.mode = mode;
      row.rate = rate;
      for (std::uint64_t seed : seeds) {
        EpisodeTrace trace;
        if (mode == ForwardingMode::kDeepMpr) {
          AgentOptions opt;
          opt.greedy = options.greedy;
          trace = run_policy_episode(c, seed, *options.params, opt).trace;
        } else {
          trace = run_episode(c, seed);
        }
        const WindowRow totals = trace.totals();
        delivery.add(delivery_ratio(trace).value_or(0.0));
        tx.add(static_cast<double>(totals.tx_count));
        if (totals.goodput_bits > 0) {
          overhead.add(overhead_ratio(trace));
        } else {
          ++row.zero_goodput;
        }
        if (options.on_episode) options.on_episode(mode, rate, seed, trace);
      }
      row.episodes = seeds.size();
      row.delivery_mean = delivery.mean();
      row.delivery_std = delivery.stddev();
      row.overhead_mean = overhead.mean();
      row.overhead_std = overhead.stddev();
      row.tx_mean = tx.mean();
      rows.push_back(row);
    }
  }
  return rows;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "mode,rate,episodes,delivery_mean,delivery_std,overhead_mean,overhead_std,tx_mean,zero_goodput\n";
  for (const auto& r : rows) {
    out << to_string(r.mode) << ',' << format_number(r.rate) << ',' << r.episodes << ','
        << format_number(r.delivery_mean) << ',' << format_number(r.delivery_std) << ','
        << format_number(r.overhead_mean) << ',' << format_number(r.overhead_std) << ','
        << format_number(r.tx_mean) << ',' << r.zero_goodput << '\n';
  }
}

std::vector<Vec2> sample_static_layout(std::size_t n, double side, const RadioModel& radio, Rng& rng,
                                       bool connected) {
  constexpr int kMaxTries = 100000;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    std::vector<Vec2> pos(n);
    for (auto& p : pos) {
      p.x = uniform(rng, 0.0, side);
      p.y = uniform(rng, 0.0, side);
    }
    if (!connected || is_connected(global_link_matrix(pos, radio.full_range))) return pos;
  }
  throw Error("no connected layout found; the arena is too sparse for the radio range");
}

MprCheckReport mpr_check(const ScenarioConfig& config, std::uint64_t seed, std::size_t snapshots,
                         std::size_t oracle_limit, bool oracle_only) {
  const auto start = std::chrono::steady_clock::now();
  MprCheckReport rep;
  Rng rng(derive_seed(seed, Stream::kTopology));
  const std::size_t n = config.node_count;
  double h_sum = 0.0;
  double o_sum = 0.0;
  std::size_t attempts = 0;
  while (rep.snapshots < snapshots) {
    if (++attempts > 1000 * std::max<std::size_t>(snapshots, 1)) {
      throw Error("mpr-check could not draw enough snapshots with the requested neighborhood size");
    }
    std::vector<Vec2> pos(n);
    for (auto& p : pos) {
      p.x = uniform(rng, 0.0, config.arena_side);
      p.y = uniform(rng, 0.0, config.arena_side);
    }
    const LinkMatrix global = global_link_matrix(pos, config.radio.full_range);
    const auto self = static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    const NeighborTable table = ground_truth_table(global, self);
    if (table.one_hop.empty()) continue;
    const bool oracle_ok = table.one_hop.size() <= oracle_limit && table.one_hop.size() <= kBruteForceLimit;
    if (oracle_only && !oracle_ok) continue;
    ++rep.snapshots;

    const MprSelection sel = select_mpr(table);
    if (sel.uncoverable.empty() && covers_two_hop(table, sel.mpr_set)) ++rep.covered;

    // a two-hop node with a single covering neighbor forces that neighbor in
    for (NodeId z : table.two_hop) {
      const auto cover = covering_neighbors(z, table);
      if (cover.size() == 1 && std::find(sel.mpr_set.begin(), sel.mpr_set.end(), cover[0]) == sel.mpr_set.end()) {
        ++rep.sole_cover_violations;
        break;
      }
    }

    if (oracle_ok) {
      const auto best = brute_force_min_mpr(table);
      ++rep.oracle_checked;
      if (sel.mpr_set.size() < best.size()) {
        ++rep.dominance_violations;
      } else {
        ++rep.excess_histogram[sel.mpr_set.size() - best.size()];
      }
      h_sum += static_cast<double>(sel.mpr_set.size());
      o_sum += static_cast<double>(best.size());
      if (table.two_hop.empty()) {
        ++rep.empty_two_hop;
        if (!sel.mpr_set.empty() || !best.empty()) ++rep.empty_two_hop_mismatch;
      }
    } else if (table.two_hop.empty()) {
      ++rep.empty_two_hop;
      if (!sel.mpr_set.empty()) ++rep.empty_two_hop_mismatch;
    }
  }
  if (rep.oracle_checked) {
    rep.heuristic_mean = h_sum / static_cast<double>(rep.oracle_checked);
    rep.oracle_mean = o_sum / static_cast<double>(rep.oracle_checked);
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

void write_mpr_report(std::ostream& out, const MprCheckReport& r) {
  out << "snapshots," << r.snapshots << '\n'
      << "covered," << r.covered << '\n'
      << "oracle_checked," << r.oracle_checked << '\n'
      << "dominance_violations," << r.dominance_violations << '\n'
      << "sole_cover_violations," << r.sole_cover_violations << '\n'
      << "empty_two_hop," << r.empty_two_hop << '\n'
      << "empty_two_hop_mismatch," << r.empty_two_hop_mismatch << '\n'
      << "heuristic_mean," << format_number(r.heuristic_mean) << '\n'
      << "oracle_mean," << format_number(r.oracle_mean) << '\n';
  for (const auto& [excess, count] : r.excess_histogram) out << "excess_" << excess << ',' << count << '\n';
}

}  // namespace deepmpr
