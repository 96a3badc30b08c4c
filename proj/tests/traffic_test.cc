#include "airtime/traffic.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace airtime {
namespace {

FlowSpec Cbr(double rate_bps) {
  FlowSpec spec;
  spec.profile = ProfileKind::kCbr;
  spec.rate_bps = rate_bps;
  return spec;
}

TEST(TrafficTest, CbrGapAtFourMbps) {
  TrafficSource source(Cbr(4e6), 1, "cbr");
  std::vector<TimeUs> times;
  for (int i = 0; i < 5; ++i) {
    times.push_back(source.Peek(0).emit_us);
    source.Pop(0);
  }
  // 1316 bytes * 8 / 4 Mbps.
  EXPECT_EQ(times, (std::vector<TimeUs>{0, 2632, 5264, 7896, 10528}));
  EXPECT_EQ(source.emitted(), 5);
}

TEST(TrafficTest, CbrStartsAtItsStartTime) {
  TrafficSource source(Cbr(4e6), 1, "cbr", 10'000);
  EXPECT_EQ(source.Peek(0).emit_us, 10'000);
}

TEST(TrafficTest, CbrLongRunRateIsExact) {
  TrafficSource source(Cbr(3.3e6), 1, "cbr");
  int64_t bytes = 0;
  while (source.Peek(0).emit_us < 30'000'000) {
    bytes += source.Peek(0).payload_bytes;
    source.Pop(0);
  }
  EXPECT_NEAR(bytes * 8 / 30.0, 3.3e6, 3.3e6 * 0.001);
}

TEST(TrafficTest, SetRateMovesNextDatagram) {
  TrafficSource source(Cbr(4e6), 1, "cbr");
  source.Pop(0);  // at 0
  source.SetRate(8e6, 100);
  EXPECT_EQ(source.Peek(100).emit_us, 1316);
  source.Pop(1316);
  EXPECT_EQ(source.Peek(1316).emit_us, 2632);
  // A slower rate set late never schedules into the past.
  source.Pop(2632);
  source.SetRate(1e6, 50'000);
  EXPECT_EQ(source.Peek(50'000).emit_us, 50'000);
  EXPECT_DOUBLE_EQ(source.rate_bps(), 1e6);
  EXPECT_THROW(source.SetRate(0.0, 0), std::invalid_argument);
}

TEST(TrafficTest, SaturatingIsAlwaysReady) {
  FlowSpec spec;
  spec.profile = ProfileKind::kSaturating;
  TrafficSource source(spec, 1, "sat");
  EXPECT_TRUE(source.saturating());
  for (TimeUs t : {0, 5, 5, 1'000'000}) {
    EXPECT_EQ(source.Peek(t).emit_us, t);
    source.Pop(t);
  }
}

TEST(TrafficTest, VbrMeanRateOverThirtySeconds) {
  FlowSpec spec;
  spec.profile = ProfileKind::kVbr;
  spec.rate_bps = 4e6;
  spec.burstiness = 2.0;
  TrafficSource source(spec, 77, "vbr");
  int64_t bytes = 0;
  TimeUs last = 0;
  while (true) {
    const Datagram d = source.Peek(0);
    if (d.emit_us >= 30'000'000) break;
    EXPECT_GE(d.emit_us, last);
    last = d.emit_us;
    bytes += d.payload_bytes;
    source.Pop(0);
  }
  EXPECT_NEAR(bytes * 8 / 30.0 / 4e6, 1.0, 0.05);
}

TEST(TrafficTest, VbrSigmaHitsBurstinessAtNinetyNinthPercentile) {
  constexpr double kZ99 = 2.3263478740408408;
  for (double b : {1.5, 2.0, 3.0}) {
    const double sigma = TrafficSource::VbrSigma(b);
    EXPECT_NEAR(std::exp(sigma * kZ99 - sigma * sigma / 2), b, 1e-12);
  }
  EXPECT_EQ(TrafficSource::VbrSigma(1.0), 0.0);
}

TEST(TrafficTest, ValidationAndNames) {
  FlowSpec spec = Cbr(0.0);
  EXPECT_THROW(spec.Validate(), std::invalid_argument);
  spec = Cbr(1e6);
  spec.datagram_payload_bytes = 0;
  EXPECT_THROW(spec.Validate(), std::invalid_argument);
  spec = Cbr(1e6);
  spec.profile = ProfileKind::kVbr;
  spec.burstiness = 0.5;
  EXPECT_THROW(spec.Validate(), std::invalid_argument);
  EXPECT_EQ(ToString(ProfileKind::kVbr), "vbr");
  EXPECT_EQ(ToString(Transport::kReliableSimplified), "reliable_simplified");
}

}  // namespace
}  // namespace airtime
