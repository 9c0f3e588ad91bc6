#include <gtest/gtest.h>

#include "deepmpr/metrics.hpp"
#include "deepmpr/rng.hpp"

namespace deepmpr {
namespace {

TEST(Metrics, GoodputInBitsPerSecond) {
  MetricsRecorder m(100.0, 1.0);
  m.offered(5.0, 2048);
  m.received(5.1, 2048, true);
  m.received(5.2, 2048, true);
  EXPECT_DOUBLE_EQ(goodput(m.trace()), 40.96);
  EXPECT_DOUBLE_EQ(throughput(m.trace()), 40.96);
  EXPECT_DOUBLE_EQ(overhead_ratio(m.trace()), 1.0);
}

TEST(Metrics, DuplicatesDoubleTheOverhead) {
  MetricsRecorder m(10.0, 1.0);
  m.offered(0.0, 2048);
  for (int k = 0; k < 2; ++k) m.received(0.5, 2048, true);
  for (int k = 0; k < 2; ++k) m.received(0.6, 2048, false);
  const EpisodeTrace& t = m.trace();
  EXPECT_EQ(t.totals().goodput_bits, 2u * 2048u);
  EXPECT_EQ(t.totals().throughput_bits, 4u * 2048u);
  EXPECT_EQ(t.totals().dup_rx_count, 2u);
  EXPECT_EQ(overhead_ratio(t), 2.0);
  EXPECT_EQ(goodput_fraction(t), 0.5);
}

TEST(Metrics, ZeroGoodputThrows) {
  MetricsRecorder m(10.0, 1.0);
  m.offered(1.0, 2048);
  EXPECT_THROW(overhead_ratio(m.trace()), ZeroGoodput);
  EXPECT_EQ(goodput_fraction(m.trace()), 0.0);
}

TEST(Metrics, DeliveryRatio) {
  MetricsRecorder m(10.0, 1.0);
  m.trace().node_count = 5;
  EXPECT_FALSE(delivery_ratio(m.trace()).has_value());
  m.offered(1.0, 2048);
  EXPECT_EQ(*delivery_ratio(m.trace()), 0.0);
  for (int k = 0; k < 4; ++k) m.received(1.0, 2048, true);
  EXPECT_EQ(*delivery_ratio(m.trace()), 1.0);
  m.offered(2.0, 2048);
  for (int k = 0; k < 2; ++k) m.received(2.0, 2048, true);
  EXPECT_EQ(*delivery_ratio(m.trace()), 0.75);
}

TEST(Metrics, WindowsPartitionTheEpisode) {
  MetricsRecorder m(3.5, 1.0);
  const EpisodeTrace& t = m.trace();
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[3].time, 3.0);
  m.transmitted(0.0);
  m.transmitted(0.999);
  m.transmitted(1.0);
  m.transmitted(3.5);
  m.control(2.2, 512);
  m.queue_drop(2.9);
  EXPECT_EQ(t.rows[0].tx_count, 2u);
  EXPECT_EQ(t.rows[1].tx_count, 1u);
  EXPECT_EQ(t.rows[3].tx_count, 1u);
  EXPECT_EQ(t.rows[2].control_bits, 512u);
  EXPECT_EQ(t.rows[2].queue_drops, 1u);
}

TEST(Metrics, TotalsAreWindowSums) {
  MetricsRecorder m(20.0, 2.0);
  Rng rng(2);
  std::uint64_t good = 0;
  std::uint64_t all = 0;
  for (int k = 0; k < 500; ++k) {
    const double t = uniform(rng, 0.0, 20.0);
    const bool first = uniform01(rng) < 0.4;
    m.received(t, 100, first);
    all += 100;
    if (first) good += 100;
  }
  const WindowRow tot = m.trace().totals();
  EXPECT_EQ(tot.goodput_bits, good);
  EXPECT_EQ(tot.throughput_bits, all);
}

TEST(Metrics, CsvLayout) {
  MetricsRecorder m(2.0, 1.0);
  m.offered(0.5, 2048);
  m.received(1.5, 2048, true);
  m.control(1.5, 512);
  EXPECT_EQ(trace_csv(m.trace()),
            "time_s,offered_bits,goodput_bits,throughput_bits,tx_count,dup_rx_count,control_bits,queue_drops\n"
            "0,2048,0,0,0,0,0,0\n"
            "1,0,2048,2048,0,0,512,0\n");
}

TEST(Metrics, FormatNumberRoundTrips) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

}  // namespace
}  // namespace deepmpr
