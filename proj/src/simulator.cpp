#include "deepmpr/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace deepmpr {

Simulator::Simulator(ScenarioConfig config, ForwardingAgent* agent)
    : config_(std::move(config)),
      agent_(agent),
      events_(config_.episode_length),
      metrics_(config_.episode_length > 0.0 ? config_.episode_length : 1.0,
               config_.metrics_window > 0.0 ? config_.metrics_window : 1.0) {
  check(config_);
  if (config_.mode == ForwardingMode::kDeepMpr && agent_ == nullptr) {
    throw ConfigError("forwarding.mode", "deep-mpr needs a policy agent");
  }
  mobility_rng_ = Rng(config_.stream_seed(Stream::kMobility));
  radio_rng_ = Rng(config_.stream_seed(Stream::kRadio));
  hello_rng_ = Rng(config_.stream_seed(Stream::kHello));
  flow_rng_ = Rng(config_.stream_seed(Stream::kFlow));
  policy_rng_ = Rng(config_.stream_seed(Stream::kPolicy));

  const std::size_t n = config_.node_count;
  auto& trace = metrics_.trace();
  trace.scenario = config_.name;
  trace.seed = config_.seed;
  trace.mode = std::string(to_string(config_.mode));
  trace.node_count = n;

  auto states = place_initial(n, config_.arena_side, config_.mobility, mobility_rng_);
  if (!config_.positions.empty()) {
    for (std::size_t k = 0; k < n; ++k) states[k].position = config_.positions[k];
  }
  nodes_.resize(n);
  positions_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto id = static_cast<NodeId>(k);
    nodes_[k].mobility = states[k];
    nodes_[k].discovery = NeighborDiscovery(id, n);
    nodes_[k].duplicates = DuplicateCache(config_.dup_age, config_.dup_capacity);
    positions_[k] = states[k].position;
  }

  if (!config_.flow.source_ids.empty()) {
    sources_ = config_.flow.source_ids;
  } else {
    std::vector<NodeId> pool(n);
    for (std::size_t k = 0; k < n; ++k) pool[k] = static_cast<NodeId>(k);
    for (std::size_t k = 0; k < config_.flow.source_count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, n - 1);
      std::swap(pool[k], pool[pick(flow_rng_)]);
    }
    sources_.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(config_.flow.source_count));
  }
  std::sort(sources_.begin(), sources_.end());
}

Seconds Simulator::next_arrival_gap() {
  if (config_.flow.arrival == ArrivalLaw::kDeterministic) return 1.0 / config_.flow.rate;
  return std::exponential_distribution<double>(config_.flow.rate)(flow_rng_);
}

EpisodeTrace Simulator::run() {
  if (ran_) throw Error("Simulator::run called twice");
  ran_ = true;

  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    Event e;
    e.time = uniform(hello_rng_, 0.0, config_.hello_max);
    e.kind = EventKind::kHelloDue;
    e.node = static_cast<NodeId>(k);
    schedule(std::move(e));
  }
  if (config_.mobile) {
    Event e;
    e.time = config_.mobility.tick;
    e.kind = EventKind::kMobilityTick;
    schedule(std::move(e));
  }
  for (NodeId s : sources_) {
    Event e;
    e.time = config_.flow.start_time;
    if (config_.flow.arrival == ArrivalLaw::kPoisson) e.time += next_arrival_gap();
    e.kind = EventKind::kFlowArrival;
    e.node = s;
    schedule(std::move(e));
  }
  {
    Event e;
    e.time = config_.episode_length;
    e.kind = EventKind::kEpisodeEnd;
    schedule(std::move(e));
  }

  while (!events_.empty()) {
    Event e = events_.pop();
    if (observer_) observer_(e, *this);
    if (e.kind == EventKind::kEpisodeEnd) break;
    handle(e);
  }
  if (agent_) agent_->on_episode_end(*this);
  return metrics_.trace();
}

void Simulator::handle(const Event& e) {
  switch (e.kind) {
    case EventKind::kTxStart:
      on_tx_start(e.node);
      break;
    case EventKind::kRxComplete:
      on_rx(e.node, e.from, *e.frame);
      break;
    case EventKind::kHelloDue:
      on_hello_due(e.node);
      break;
    case EventKind::kMobilityTick:
      on_mobility_tick();
      break;
    case EventKind::kFlowArrival:
      on_flow_arrival(e.node);
      break;
    case EventKind::kEpisodeEnd:
      break;
  }
}

void Simulator::kick(NodeId i) {
  NodeRuntime& node = nodes_[i];
  if (node.tx_armed) return;
  Event e;
  e.time = std::max(now(), node.busy_until);
  e.kind = EventKind::kTxStart;
  e.node = i;
  node.tx_armed = true;
  schedule(std::move(e));
}

void Simulator::on_tx_start(NodeId i) {
  NodeRuntime& node = nodes_[i];
  node.tx_armed = false;
  std::shared_ptr<const Frame> frame;
  if (node.hello_pending) {
    node.hello_pending = false;
    auto hello = node.discovery.make_hello(node.mpr.mpr_set, static_cast<std::uint32_t>(node.queue.size()),
                                           config_.hello_bytes * 8);
    metrics_.control(now(), hello.size_bits);
    frame = std::make_shared<const Frame>(std::move(hello));
  } else if (!node.queue.empty()) {
    Packet p = node.queue.front();
    node.queue.pop_front();
    metrics_.transmitted(now());
    frame = std::make_shared<const Frame>(p);
  } else {
    return;
  }
  node.busy_until = now() + config_.radio.airtime(frame_bits(*frame));
  for (auto& rx : broadcast(config_.radio, i, frame, now(), positions_, radio_rng_)) schedule(std::move(rx));
  kick(i);
}

void Simulator::on_rx(NodeId j, NodeId from, const Frame& frame) {
  if (const auto* hello = std::get_if<HelloMessage>(&frame)) {
    nodes_[j].discovery.ingest(*hello, now());
    refresh(j);
  } else {
    on_data(j, from, std::get<Packet>(frame));
  }
}

void Simulator::refresh(NodeId i) {
  NodeRuntime& node = nodes_[i];
  if (node.discovery.refresh(now(), config_.neighbor_expiry)) {
    node.mpr.mpr_set = select_mpr(node.discovery.table()).mpr_set;
  }
  node.mpr.selectors = node.discovery.selectors();
}

void Simulator::refresh_if_stale(NodeId i) {
  if (nodes_[i].discovery.has_stale(now(), config_.neighbor_expiry)) refresh(i);
}

void Simulator::on_data(NodeId j, NodeId from, const Packet& packet) {
  if (packet.source == j) return;  // echo of our own packet
  NodeRuntime& node = nodes_[j];
  const bool first = !node.duplicates.contains(packet.source, packet.seq, now());
  metrics_.received(now(), packet.size_bits, first);
  if (!first) return;
  nodes_[from].credited_bits += packet.size_bits;

  Decision d = Decision::kDrop;
  if (config_.mode == ForwardingMode::kDeepMpr) {
    node.duplicates.insert(packet.source, packet.seq, now());
    if (packet.ttl > 1) {
      refresh_if_stale(j);
      d = agent_->decide(*this, j, packet);
    }
  } else {
    if (config_.mode == ForwardingMode::kSMpr) refresh_if_stale(j);
    d = forward_decision(config_.mode, packet, node.mpr, node.duplicates, now());
  }
  if (d == Decision::kForward) {
    Packet out = packet;
    out.prev_hop = j;
    out.ttl = packet.ttl - 1;
    enqueue(j, out);
  }
}

void Simulator::enqueue(NodeId i, const Packet& packet) {
  NodeRuntime& node = nodes_[i];
  if (node.queue.size() >= config_.queue_capacity) {
    metrics_.queue_drop(now());
    return;
  }
  node.queue.push_back(packet);
  kick(i);
}

void Simulator::on_hello_due(NodeId i) {
  refresh(i);
  nodes_[i].hello_pending = true;
  kick(i);
  Event e;
  e.time = now() + next_hello_interval(hello_rng_, config_.hello_min, config_.hello_max);
  e.kind = EventKind::kHelloDue;
  e.node = i;
  schedule(std::move(e));
}

void Simulator::on_mobility_tick() {
  const Seconds dt = config_.mobility.tick;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    const double n1 = standard_normal(mobility_rng_);
    const double n2 = standard_normal(mobility_rng_);
    nodes_[k].mobility = step(nodes_[k].mobility, dt, config_.arena_side, n1, n2);
    positions_[k] = nodes_[k].mobility.position;
  }
  Event e;
  e.time = now() + dt;
  e.kind = EventKind::kMobilityTick;
  schedule(std::move(e));
}

void Simulator::on_flow_arrival(NodeId s) {
  NodeRuntime& node = nodes_[s];
  const auto limit = config_.flow.packet_limit;
  if (limit != 0 && node.generated >= limit) return;
  Packet p;
  p.source = s;
  p.seq = node.next_seq++;
  p.prev_hop = s;
  p.ttl = config_.flow.ttl;
  p.size_bits = config_.flow.packet_bytes * 8;
  ++node.generated;
  metrics_.offered(now(), p.size_bits);
  node.duplicates.insert(p.source, p.seq, now());
  enqueue(s, p);
  if (limit == 0 || node.generated < limit) {
    Event e;
    e.time = now() + next_arrival_gap();
    e.kind = EventKind::kFlowArrival;
    e.node = s;
    schedule(std::move(e));
  }
}

EpisodeTrace run_episode(const ScenarioConfig& scenario, std::uint64_t seed, ForwardingAgent* agent) {
  ScenarioConfig c = scenario;
  c.seed = seed;
  Simulator sim(std::move(c), agent);
  return sim.run();
}

}  // namespace deepmpr
