#include "deepmpr/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "deepmpr/metrics.hpp"

namespace deepmpr {

ConfigError::ConfigError(std::vector<FieldError> errors)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e.field + ": " + e.reason;
        return msg;
      }()),
      errors_(std::move(errors)) {}

ConfigError::ConfigError(std::string field, std::string reason)
    : ConfigError(std::vector<FieldError>{{std::move(field), std::move(reason)}}) {}

std::uint64_t ScenarioConfig::stream_seed(Stream stream) const {
  const std::optional<std::uint64_t>* over = nullptr;
  switch (stream) {
    case Stream::kMobility:
      over = &seeds.mobility;
      break;
    case Stream::kRadio:
      over = &seeds.radio;
      break;
    case Stream::kHello:
      over = &seeds.hello;
      break;
    case Stream::kFlow:
      over = &seeds.flow;
      break;
    case Stream::kPolicy:
      over = &seeds.policy;
      break;
    case Stream::kTopology:
      break;
  }
  if (over && over->has_value()) return derive_seed(**over, stream);
  return derive_seed(seed, stream);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Value conversion failures surface as this and are tagged with the key.
struct BadValue {
  std::string reason;
};

double to_double(std::string_view v) {
  double out = 0.0;
  auto s = trim(v);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw BadValue{"expected a number, got '" + s + "'"};
  return out;
}

std::uint64_t to_uint(std::string_view v) {
  std::uint64_t out = 0;
  auto s = trim(v);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw BadValue{"expected a non-negative integer, got '" + s + "'"};
  return out;
}

bool to_bool(std::string_view v) {
  auto s = trim(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw BadValue{"expected true/false, got '" + s + "'"};
}

std::vector<std::string> split(std::string_view v, char sep) {
  std::vector<std::string> out;
  auto s = trim(v);
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(trim(std::string_view(s).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> to_doubles(std::string_view v) {
  std::vector<double> out;
  for (const auto& part : split(v, ',')) out.push_back(to_double(part));
  return out;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += ',';
    out += format_number(xs[k]);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  bool optional = false;  // omitted from serialization when get() is empty
};

#define DOUBLE_FIELD(KEY, MEMBER)                                                      \
  Field {                                                                              \
    KEY, [](const ScenarioConfig& c) { return format_number(c.MEMBER); },              \
        [](ScenarioConfig& c, std::string_view v) { c.MEMBER = to_double(v); }         \
  }
#define UINT_FIELD(KEY, MEMBER, TYPE)                                                  \
  Field {                                                                              \
    KEY, [](const ScenarioConfig& c) { return std::to_string(c.MEMBER); },             \
        [](ScenarioConfig& c, std::string_view v) { c.MEMBER = static_cast<TYPE>(to_uint(v)); } \
  }
#define SEED_FIELD(KEY, MEMBER)                                                                       \
  Field {                                                                                             \
    KEY, [](const ScenarioConfig& c) { return c.MEMBER ? std::to_string(*c.MEMBER) : std::string(); }, \
        [](ScenarioConfig& c, std::string_view v) { c.MEMBER = to_uint(v); }, true                    \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"scenario.name", [](const ScenarioConfig& c) { return c.name; },
       [](ScenarioConfig& c, std::string_view v) { c.name = trim(v); }},
      UINT_FIELD("nodes.count", node_count, std::size_t),
      {"nodes.positions",
       [](const ScenarioConfig& c) {
         std::string out;
         for (std::size_t k = 0; k < c.positions.size(); ++k) {
           if (k) out += ',';
           out += format_number(c.positions[k].x) + ':' + format_number(c.positions[k].y);
         }
         return out;
       },
       [](ScenarioConfig& c, std::string_view v) {
         c.positions.clear();
         for (const auto& part : split(v, ',')) {
           auto colon = part.find(':');
           if (colon == std::string::npos) throw BadValue{"expected x:y, got '" + part + "'"};
           c.positions.push_back({to_double(part.substr(0, colon)), to_double(part.substr(colon + 1))});
         }
       },
       true},
      DOUBLE_FIELD("arena.side", arena_side),
      {"mobility.enabled", [](const ScenarioConfig& c) { return std::string(c.mobile ? "true" : "false"); },
       [](ScenarioConfig& c, std::string_view v) { c.mobile = to_bool(v); }},
      DOUBLE_FIELD("mobility.speed_min", mobility.speed_min),
      DOUBLE_FIELD("mobility.speed_max", mobility.speed_max),
      DOUBLE_FIELD("mobility.alpha", mobility.alpha),
      DOUBLE_FIELD("mobility.speed_sigma", mobility.speed_sigma),
      DOUBLE_FIELD("mobility.direction_sigma", mobility.direction_sigma),
      DOUBLE_FIELD("mobility.tick", mobility.tick),
      DOUBLE_FIELD("radio.full_range", radio.full_range),
      DOUBLE_FIELD("radio.max_range", radio.max_range),
      DOUBLE_FIELD("radio.link_rate", radio.link_rate),
      DOUBLE_FIELD("hello.interval_min", hello_min),
      DOUBLE_FIELD("hello.interval_max", hello_max),
      UINT_FIELD("hello.size_bytes", hello_bytes, std::uint32_t),
      DOUBLE_FIELD("hello.expiry", neighbor_expiry),
      UINT_FIELD("flow.sources", flow.source_count, std::size_t),
      {"flow.source_ids",
       [](const ScenarioConfig& c) {
         std::string out;
         for (std::size_t k = 0; k < c.flow.source_ids.size(); ++k) {
           if (k) out += ',';
           out += std::to_string(c.flow.source_ids[k]);
         }
         return out;
       },
       [](ScenarioConfig& c, std::string_view v) {
         c.flow.source_ids.clear();
         for (const auto& part : split(v, ',')) c.flow.source_ids.push_back(static_cast<NodeId>(to_uint(part)));
       },
       true},
      DOUBLE_FIELD("flow.rate", flow.rate),
      UINT_FIELD("flow.packet_bytes", flow.packet_bytes, std::uint32_t),
      UINT_FIELD("flow.ttl", flow.ttl, std::uint32_t),
      {"flow.arrival",
       [](const ScenarioConfig& c) {
         return std::string(c.flow.arrival == ArrivalLaw::kPoisson ? "poisson" : "deterministic");
       },
       [](ScenarioConfig& c, std::string_view v) {
         auto s = trim(v);
         if (s == "poisson") {
           c.flow.arrival = ArrivalLaw::kPoisson;
         } else if (s == "deterministic") {
           c.flow.arrival = ArrivalLaw::kDeterministic;
         } else {
           throw BadValue{"expected poisson or deterministic, got '" + s + "'"};
         }
       }},
      DOUBLE_FIELD("flow.start_time", flow.start_time),
      UINT_FIELD("flow.packet_limit", flow.packet_limit, std::uint64_t),
      UINT_FIELD("queue.capacity", queue_capacity, std::size_t),
      DOUBLE_FIELD("dup_cache.age", dup_age),
      UINT_FIELD("dup_cache.capacity", dup_capacity, std::size_t),
      DOUBLE_FIELD("episode.length", episode_length),
      DOUBLE_FIELD("metrics.window", metrics_window),
      {"forwarding.mode", [](const ScenarioConfig& c) { return std::string(to_string(c.mode)); },
       [](ScenarioConfig& c, std::string_view v) {
         auto m = parse_forwarding_mode(trim(v));
         if (!m) throw BadValue{"expected one of flooding, s-mpr, ns-mpr, deep-mpr; got '" + trim(v) + "'"};
         c.mode = *m;
       }},
      {"forwarding.checkpoint", [](const ScenarioConfig& c) { return c.checkpoint; },
       [](ScenarioConfig& c, std::string_view v) { c.checkpoint = trim(v); }, true},
      UINT_FIELD("rl.n_max", rl.n_max, std::size_t),
      UINT_FIELD("rl.k_max", rl.k_max, std::size_t),
      DOUBLE_FIELD("rl.reward_scale", rl.reward_scale),
      DOUBLE_FIELD("rl.reward_self_weight", rl.reward_self_weight),
      {"rl.reward_weights", [](const ScenarioConfig& c) { return join_doubles(c.rl.reward_weights); },
       [](ScenarioConfig& c, std::string_view v) { c.rl.reward_weights = to_doubles(v); }, true},
      UINT_FIELD("seed", seed, std::uint64_t),
      SEED_FIELD("seeds.mobility", seeds.mobility),
      SEED_FIELD("seeds.radio", seeds.radio),
      SEED_FIELD("seeds.hello", seeds.hello),
      SEED_FIELD("seeds.flow", seeds.flow),
      SEED_FIELD("seeds.policy", seeds.policy),
      {"compare.rates", [](const ScenarioConfig& c) { return join_doubles(c.sweep_rates); },
       [](ScenarioConfig& c, std::string_view v) { c.sweep_rates = to_doubles(v); }},
  };
  return table;
}

#undef DOUBLE_FIELD
#undef UINT_FIELD
#undef SEED_FIELD

const Field* find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

void assign(ScenarioConfig& c, const std::string& key, std::string_view value, std::vector<FieldError>& errors) {
  const Field* f = find_field(key);
  if (!f) {
    errors.push_back({key, "unknown key"});
    return;
  }
  try {
    f->set(c, value);
  } catch (const BadValue& bad) {
    errors.push_back({key, bad.reason});
  }
}

void collect_range_errors(const ScenarioConfig& c, std::vector<FieldError>& errors) {
  auto require = [&](bool ok, const char* field, const std::string& reason) {
    if (!ok) errors.push_back({field, reason});
  };
  require(c.node_count >= 1, "nodes.count", "must be at least 1");
  require(c.arena_side > 0.0, "arena.side", "must be positive");
  if (!c.positions.empty()) {
    require(c.positions.size() == c.node_count, "nodes.positions", "must list exactly nodes.count positions");
    for (const auto& p : c.positions) {
      if (p.x < 0.0 || p.y < 0.0 || p.x > c.arena_side || p.y > c.arena_side) {
        errors.push_back({"nodes.positions", "position outside the arena"});
        break;
      }
    }
  }
  require(c.mobility.alpha >= 0.0 && c.mobility.alpha <= 1.0, "mobility.alpha", "must be in [0, 1]");
  require(c.mobility.speed_sigma >= 0.0, "mobility.speed_sigma", "must be non-negative");
  require(c.mobility.direction_sigma >= 0.0, "mobility.direction_sigma", "must be non-negative");
  require(c.mobility.tick > 0.0, "mobility.tick", "must be positive");
  require(c.mobility.speed_min >= 0.0, "mobility.speed_min", "must be non-negative");
  require(c.mobility.speed_max >= c.mobility.speed_min, "mobility.speed_max", "must be >= mobility.speed_min");
  require(c.radio.full_range > 0.0, "radio.full_range", "must be positive");
  require(c.radio.max_range >= c.radio.full_range, "radio.max_range", "must be >= radio.full_range");
  require(c.radio.link_rate > 0.0, "radio.link_rate", "must be positive");
  require(c.hello_min > 0.0, "hello.interval_min", "must be positive");
  require(c.hello_max >= c.hello_min, "hello.interval_max", "must be >= hello.interval_min");
  require(c.hello_bytes > 0, "hello.size_bytes", "must be positive");
  require(c.neighbor_expiry > 0.0, "hello.expiry", "must be positive");
  if (c.flow.source_ids.empty()) {
    require(c.flow.source_count >= 1 && c.flow.source_count <= c.node_count, "flow.sources",
            "must be in [1, nodes.count]");
  } else {
    std::set<NodeId> unique(c.flow.source_ids.begin(), c.flow.source_ids.end());
    require(unique.size() == c.flow.source_ids.size(), "flow.source_ids", "duplicate source id");
    for (NodeId s : c.flow.source_ids) {
      if (s >= c.node_count) {
        errors.push_back({"flow.source_ids", "source id " + std::to_string(s) + " >= nodes.count"});
        break;
      }
    }
  }
  require(c.flow.rate > 0.0, "flow.rate", "must be positive");
  require(c.flow.packet_bytes > 0, "flow.packet_bytes", "must be positive");
  require(c.flow.ttl >= 1 && c.flow.ttl <= 255, "flow.ttl", "must be in [1, 255]");
  require(c.flow.start_time >= 0.0, "flow.start_time", "must be non-negative");
  require(c.queue_capacity >= 1, "queue.capacity", "must be at least 1");
  require(c.dup_age > 0.0, "dup_cache.age", "must be positive");
  require(c.dup_capacity >= 1, "dup_cache.capacity", "must be at least 1");
  require(c.episode_length > 0.0, "episode.length", "must be positive");
  require(c.metrics_window > 0.0, "metrics.window", "must be positive");
  require(c.mode != ForwardingMode::kDeepMpr || !c.checkpoint.empty(), "forwarding.checkpoint",
          "deep-mpr requires a checkpoint path");
  require(c.rl.n_max >= 2, "rl.n_max", "must be at least 2");
  require(c.rl.k_max >= 1 && c.rl.k_max < c.rl.n_max, "rl.k_max", "must be in [1, rl.n_max)");
  require(c.rl.reward_scale > 0.0, "rl.reward_scale", "must be positive");
  require(c.rl.reward_self_weight >= 0.0, "rl.reward_self_weight", "must be non-negative");
  if (!c.rl.reward_weights.empty()) {
    require(c.rl.reward_weights.size() == c.node_count, "rl.reward_weights", "must have nodes.count entries");
    for (double w : c.rl.reward_weights) {
      if (w < 0.0) {
        errors.push_back({"rl.reward_weights", "weights must be non-negative"});
        break;
      }
    }
  }
  for (double r : c.sweep_rates) {
    if (r <= 0.0) {
      errors.push_back({"compare.rates", "rates must be positive"});
      break;
    }
  }
}

std::pair<std::string, std::string> split_assignment(std::string_view line) {
  auto eq = line.find('=');
  if (eq == std::string_view::npos) return {trim(line), std::string("\x01")};
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace

void apply_override(ScenarioConfig& config, std::string_view assignment) {
  auto [key, value] = split_assignment(assignment);
  std::vector<FieldError> errors;
  if (value == "\x01") {
    errors.push_back({key, "override must look like key=value"});
  } else {
    assign(config, key, value, errors);
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

void check(const ScenarioConfig& config) {
  std::vector<FieldError> errors;
  collect_range_errors(config, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

ScenarioConfig validate(std::string_view text, const std::vector<std::string>& overrides) {
  ScenarioConfig c;
  std::vector<FieldError> errors;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back({"line " + std::to_string(line_no), "unterminated section header"});
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    auto [key, value] = split_assignment(line);
    if (value == "\x01") {
      errors.push_back({"line " + std::to_string(line_no), "expected key = value"});
      continue;
    }
    assign(c, section.empty() ? key : section + "." + key, value, errors);
  }
  for (const auto& o : overrides) {
    auto [key, value] = split_assignment(o);
    if (value == "\x01") {
      errors.push_back({key, "override must look like key=value"});
      continue;
    }
    assign(c, key, value, errors);
  }
  if (errors.empty()) collect_range_errors(c, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

std::string serialize(const ScenarioConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    auto value = f.get(config);
    if (f.optional && value.empty()) continue;
    out += f.key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

ScenarioConfig load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return validate(buf.str(), overrides);
}

}  // namespace deepmpr
