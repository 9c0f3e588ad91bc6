#ifndef DEEPMPR_METRICS_HPP_
#define DEEPMPR_METRICS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deepmpr/common.hpp"

namespace deepmpr {

// One accounting window. Bits are data-plane only; HELLO traffic is kept in
// control_bits.
struct WindowRow {
  Seconds time = 0.0;  // window start
  std::uint64_t offered_bits = 0;
  std::uint64_t goodput_bits = 0;     // first copies at non-source receivers
  std::uint64_t throughput_bits = 0;  // every copy at non-source receivers
  std::uint64_t tx_count = 0;         // data transmissions
  std::uint64_t dup_rx_count = 0;
  std::uint64_t control_bits = 0;
  std::uint64_t queue_drops = 0;

  bool operator==(const WindowRow&) const = default;
};

struct EpisodeTrace {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string mode;
  std::size_t node_count = 0;
  Seconds duration = 0.0;
  Seconds window = 1.0;
  std::vector<WindowRow> rows;
  std::uint64_t offered_packets = 0;
  // diagnostics
  std::uint64_t unknown_hop_drops = 0;
  std::uint64_t truncated_observations = 0;

  WindowRow totals() const;
};

// Accumulates events into fixed windows over [0, duration].
class MetricsRecorder {
 public:
  MetricsRecorder(Seconds duration, Seconds window);

  void offered(Seconds t, std::uint32_t bits);
  void received(Seconds t, std::uint32_t bits, bool first_copy);
  void transmitted(Seconds t);
  void control(Seconds t, std::uint32_t bits);
  void queue_drop(Seconds t);

  EpisodeTrace& trace() { return trace_; }
  const EpisodeTrace& trace() const { return trace_; }

 private:
  WindowRow& at(Seconds t);

  EpisodeTrace trace_;
};

// Gp in bit/s: first-copy bits at all receivers over the episode duration.
double goodput(const EpisodeTrace& trace);
// Thr in bit/s: all received copies.
double throughput(const EpisodeTrace& trace);
// Thr / Gp. Throws ZeroGoodput when nothing was delivered.
double overhead_ratio(const EpisodeTrace& trace);
// Gp / Thr, the literal form of the ratio; 0 when Thr is 0.
double goodput_fraction(const EpisodeTrace& trace);
// Gp bits / (offered bits * (N - 1)); nullopt when nothing was offered.
std::optional<double> delivery_ratio(const EpisodeTrace& trace);

// Exact column order: time_s, offered_bits, goodput_bits, throughput_bits,
// tx_count, dup_rx_count, control_bits, queue_drops.
void write_trace_csv(std::ostream& out, const EpisodeTrace& trace);
std::string trace_csv(const EpisodeTrace& trace);

// Shortest decimal that round-trips a double.
std::string format_number(double value);

}  // namespace deepmpr

#endif  // DEEPMPR_METRICS_HPP_
