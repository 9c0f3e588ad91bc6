#ifndef DEEPMPR_SCENARIO_HPP_
#define DEEPMPR_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deepmpr/common.hpp"
#include "deepmpr/mobility.hpp"
#include "deepmpr/mpr.hpp"
#include "deepmpr/radio.hpp"

namespace deepmpr {

enum class ArrivalLaw { kPoisson, kDeterministic };

struct FlowConfig {
  std::size_t source_count = 1;      // sources drawn uniformly without replacement
  std::vector<NodeId> source_ids;    // explicit sources; overrides source_count
  double rate = 10.0;                // packets/s per source
  std::uint32_t packet_bytes = 256;
  std::uint32_t ttl = 255;
  ArrivalLaw arrival = ArrivalLaw::kPoisson;
  Seconds start_time = 3.0;
  std::uint64_t packet_limit = 0;    // per source; 0 = unlimited

  bool operator==(const FlowConfig&) const = default;
};

struct RlConfig {
  std::size_t n_max = 32;  // observation slots for the local link row/column
  std::size_t k_max = 24;  // action width and queue slots for neighbors
  double reward_scale = 1.0 / 2048.0;
  double reward_self_weight = 0.0;
  // Team weights per node; empty means uniform 1/N.
  std::vector<double> reward_weights;

  bool operator==(const RlConfig&) const = default;
};

struct SeedOverrides {
  std::optional<std::uint64_t> mobility;
  std::optional<std::uint64_t> radio;
  std::optional<std::uint64_t> hello;
  std::optional<std::uint64_t> flow;
  std::optional<std::uint64_t> policy;

  bool operator==(const SeedOverrides&) const = default;
};

struct ScenarioConfig {
  std::string name = "baseline";
  std::size_t node_count = 25;
  double arena_side = 700.0;
  std::vector<Vec2> positions;  // fixed initial placement, optional
  bool mobile = true;
  MobilityParams mobility;
  RadioModel radio;
  Seconds hello_min = 0.25;
  Seconds hello_max = 0.75;
  std::uint32_t hello_bytes = 64;
  Seconds neighbor_expiry = 2.25;
  FlowConfig flow;
  std::size_t queue_capacity = 64;
  Seconds dup_age = 30.0;
  std::size_t dup_capacity = 4096;
  Seconds episode_length = 100.0;
  Seconds metrics_window = 1.0;
  ForwardingMode mode = ForwardingMode::kSMpr;
  std::string checkpoint;
  RlConfig rl;
  std::uint64_t seed = 1;
  SeedOverrides seeds;
  std::vector<double> sweep_rates{50.0, 100.0, 200.0, 300.0, 400.0, 500.0};

  bool operator==(const ScenarioConfig&) const = default;

  std::uint64_t stream_seed(Stream stream) const;
};

// Parses the flat key = value format (with optional [section] prefixes),
// applies `overrides` ("dotted.key=value") on top, and range-checks the
// result. Throws ConfigError listing every problem found.
ScenarioConfig validate(std::string_view text, const std::vector<std::string>& overrides = {});

// Range checks on an already-built config.
void check(const ScenarioConfig& config);

// Every key, in a fixed order, one per line.
std::string serialize(const ScenarioConfig& config);

// Applies one dotted override onto `config` without range checks.
void apply_override(ScenarioConfig& config, std::string_view assignment);

ScenarioConfig load_scenario(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace deepmpr

#endif  // DEEPMPR_SCENARIO_HPP_
