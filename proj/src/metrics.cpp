#include "deepmpr/metrics.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace deepmpr {

WindowRow EpisodeTrace::totals() const {
  WindowRow t;
  for (const auto& r : rows) {
    t.offered_bits += r.offered_bits;
    t.goodput_bits += r.goodput_bits;
    t.throughput_bits += r.throughput_bits;
    t.tx_count += r.tx_count;
    t.dup_rx_count += r.dup_rx_count;
    t.control_bits += r.control_bits;
    t.queue_drops += r.queue_drops;
  }
  return t;
}

MetricsRecorder::MetricsRecorder(Seconds duration, Seconds window) {
  trace_.duration = duration;
  trace_.window = window;
  const auto n = static_cast<std::size_t>(std::ceil(duration / window - 1e-9));
  trace_.rows.resize(n == 0 ? 1 : n);
  for (std::size_t k = 0; k < trace_.rows.size(); ++k) trace_.rows[k].time = static_cast<double>(k) * window;
}

WindowRow& MetricsRecorder::at(Seconds t) {
  auto k = static_cast<std::size_t>(t / trace_.window);
  if (k >= trace_.rows.size()) k = trace_.rows.size() - 1;
  return trace_.rows[k];
}

void MetricsRecorder::offered(Seconds t, std::uint32_t bits) {
  at(t).offered_bits += bits;
  ++trace_.offered_packets;
}

void MetricsRecorder::received(Seconds t, std::uint32_t bits, bool first_copy) {
  WindowRow& r = at(t);
  r.throughput_bits += bits;
  if (first_copy) {
    r.goodput_bits += bits;
  } else {
    ++r.dup_rx_count;
  }
}

void MetricsRecorder::transmitted(Seconds t) { ++at(t).tx_count; }

void MetricsRecorder::control(Seconds t, std::uint32_t bits) { at(t).control_bits += bits; }

void MetricsRecorder::queue_drop(Seconds t) { ++at(t).queue_drops; }

double goodput(const EpisodeTrace& trace) {
  return static_cast<double>(trace.totals().goodput_bits) / trace.duration;
}

double throughput(const EpisodeTrace& trace) {
  return static_cast<double>(trace.totals().throughput_bits) / trace.duration;
}

double overhead_ratio(const EpisodeTrace& trace) {
  const WindowRow t = trace.totals();
  if (t.goodput_bits == 0) throw ZeroGoodput("overhead ratio undefined: no goodput");
  return static_cast<double>(t.throughput_bits) / static_cast<double>(t.goodput_bits);
}

double goodput_fraction(const EpisodeTrace& trace) {
  const WindowRow t = trace.totals();
  if (t.throughput_bits == 0) return 0.0;
  return static_cast<double>(t.goodput_bits) / static_cast<double>(t.throughput_bits);
}

std::optional<double> delivery_ratio(const EpisodeTrace& trace) {
  const WindowRow t = trace.totals();
  if (t.offered_bits == 0 || trace.node_count < 2) return std::nullopt;
  return static_cast<double>(t.goodput_bits) /
         (static_cast<double>(t.offered_bits) * static_cast<double>(trace.node_count - 1));
}

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const EpisodeTrace& trace) {
  out << "time_s,offered_bits,goodput_bits,throughput_bits,tx_count,dup_rx_count,control_bits,queue_drops\n";
  for (const auto& r : trace.rows) {
    out << format_number(r.time) << ',' << r.offered_bits << ',' << r.goodput_bits << ',' << r.throughput_bits
        << ',' << r.tx_count << ',' << r.dup_rx_count << ',' << r.control_bits << ',' << r.queue_drops << '\n';
  }
}

std::string trace_csv(const EpisodeTrace& trace) {
  std::ostringstream s;
  write_trace_csv(s, trace);
  return s.str();
}

}  // namespace deepmpr
