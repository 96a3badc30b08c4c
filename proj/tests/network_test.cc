#include "airtime/network.h"

#include <gtest/gtest.h>

#include <string>

#include "airtime/kernels.h"

namespace airtime {
namespace {

NetworkConfig Config(const std::string& spec, double loss = 0.0) {
  NetworkConfig config;
  config.topology = ParseTopology(spec);
  config.wireless.loss_prob = loss;
  config.seed = 3;
  return config;
}

double Goodput(Network& network, int windows) {
  for (int w = 0; w < windows; ++w) network.RunWindow();
  return static_cast<double>(network.sink_payload_bits_total()) * 1e6 /
         static_cast<double>(windows * network.config().window_us);
}

TEST(NetworkTest, ObserverLedgerMatchesMacCompletions) {
  NetworkConfig config = Config("g X5", 0.05);
  config.media.rate_bps = 6e6;
  Network network(config);
  for (int w = 0; w < 25; ++w) {
    const WindowSample sample = network.RunWindow();
    EXPECT_EQ(sample.observer.tx_bits, sample.observer_delivered_bits) << w;
    EXPECT_EQ(sample.observer.ledger.Total(), config.window_us);
    EXPECT_EQ(sample.observer.window_index, w);
    ASSERT_EQ(sample.observer.links.size(), 1u);
    for (const NodeWindow& node : sample.stations) {
      ASSERT_EQ(node.stats.ledger.Total(), config.window_us)
          << "node " << node.node_id;
    }
  }
}

TEST(NetworkTest, FixedRateBelowCapacityIsDelivered) {
  NetworkConfig config = Config("g");
  config.media.rate_bps = 4e6;
  Network network(config);
  EXPECT_NEAR(Goodput(network, 50), 4e6, 4e6 * 0.01);
  EXPECT_EQ(network.mac_drops(), 0u);
  EXPECT_EQ(network.queue_drops(), 0u);
}

TEST(NetworkTest, OneHopCapacityIsPlausible) {
  const double capacity = MeasureCapacity(Config("g"), 10'000'000);
  EXPECT_GE(capacity, 20e6);
  EXPECT_LE(capacity, 30e6);
}

TEST(NetworkTest, TwoHopsOnOneChannelHalveCapacity) {
  const double one = MeasureCapacity(Config("g"), 10'000'000);
  const double two = MeasureCapacity(Config("g-AP-g"), 10'000'000);
  EXPECT_NEAR(two / one, 0.5, 0.5 * 0.15);
}

TEST(NetworkTest, ChannelsAreIsolated) {
  const double one = MeasureCapacity(Config("g"), 10'000'000);
  const double split = MeasureCapacity(Config("g-AP-g ch=1,6"), 10'000'000);
  EXPECT_NEAR(split / one, 1.0, 0.05);
  // Cross traffic on channel 1 leaves a path on channel 6 alone.
  const double a_alone = MeasureCapacity(Config("a"), 10'000'000);
  const double a_cross = MeasureCapacity(Config("a X5"), 10'000'000);
  EXPECT_LT(a_cross, a_alone);  // same channel: contended
  const double g_over_a =
      MeasureCapacity(Config("g-AP-a ch=1,36 X5"), 10'000'000);
  const double g_over_a_clean =
      MeasureCapacity(Config("g-AP-a ch=1,36"), 10'000'000);
  EXPECT_LT(g_over_a, g_over_a_clean);
  const double cross_elsewhere =
      MeasureCapacity(Config("a-AP-g ch=36,1"), 10'000'000);
  EXPECT_NEAR(cross_elsewhere / g_over_a_clean, 1.0, 0.05);
}

TEST(NetworkTest, MediumConservation) {
  for (const char* spec : {"g X5", "g X20", "g-AP-g X5"}) {
    SCOPED_TRACE(spec);
    const double one_hop = MeasureCapacity(Config("g"), 10'000'000);
    NetworkConfig config = Config(spec);
    config.media.profile = ProfileKind::kSaturating;
    Network network(config);
    const double media = Goodput(network, 50);
    const double cross = static_cast<double>(network.cross_payload_bits_total()) /
                         10.0;
    EXPECT_GT(cross, 0.0);
    EXPECT_LE(media + cross, one_hop * 1.02);
  }
}

TEST(NetworkTest, CrossTrafficCanStartLate) {
  NetworkConfig config = Config("g X5");
  config.cross_start_us = 2'000'000;
  config.media.rate_bps = 1e6;
  Network network(config);
  for (int w = 0; w < 10; ++w) network.RunWindow();
  EXPECT_EQ(network.cross_payload_bits_total(), 0);
  for (int w = 0; w < 10; ++w) network.RunWindow();
  EXPECT_GT(network.cross_payload_bits_total(), 0);
}

TEST(NetworkTest, ReliableSaturatingIsSlowerThanUnreliable) {
  NetworkConfig config = Config("g");
  config.media.profile = ProfileKind::kSaturating;
  Network unreliable(config);
  config.media.transport = Transport::kReliableSimplified;
  Network reliable(config);
  const double u = Goodput(unreliable, 50);
  const double r = Goodput(reliable, 50);
  EXPECT_LT(r, u);
  EXPECT_GT(reliable.reverse_airtime_us(), 0);
  EXPECT_EQ(unreliable.reverse_airtime_us(), 0);
}

TEST(NetworkTest, ReliableCbrMatchesUnreliableWhenLossless) {
  NetworkConfig config = Config("g");
  config.media.rate_bps = 4e6;
  config.reliable.window = 256;
  Network unreliable(config);
  config.media.transport = Transport::kReliableSimplified;
  Network reliable(config);
  const double u = Goodput(unreliable, 50);
  const double r = Goodput(reliable, 50);
  EXPECT_NEAR(r / u, 1.0, 0.02);
}

TEST(NetworkTest, TransportRecoversMacDrops) {
  NetworkConfig config = Config("g", 0.6);
  config.media.rate_bps = 1e6;
  config.media.transport = Transport::kReliableSimplified;
  Network network(config);
  for (int w = 0; w < 50; ++w) network.RunWindow();
  EXPECT_GT(network.mac_drops(), 0u);
  EXPECT_GT(network.transport_retransmissions(), 0u);
  // Stop the source and let the transport drain.
  network.SetMediaRate(1.0);
  for (int w = 0; w < 100; ++w) network.RunWindow();
  const int64_t expected_bits =
      static_cast<int64_t>(1e6 * 10.0 / (1316 * 8)) * 1316 * 8;
  EXPECT_NEAR(static_cast<double>(network.sink_payload_bits_total()),
              static_cast<double>(expected_bits), 1316 * 8 * 2.0);
}

TEST(NetworkTest, SameSeedSameRun) {
  NetworkConfig config = Config("g-AP-g X5", 0.02);
  config.media.rate_bps = 3e6;
  Network a(config);
  Network b(config);
  for (int w = 0; w < 20; ++w) {
    const WindowSample x = a.RunWindow();
    const WindowSample y = b.RunWindow();
    ASSERT_EQ(x.observer.ledger, y.observer.ledger);
    ASSERT_EQ(x.observer.tx_bits, y.observer.tx_bits);
    ASSERT_EQ(x.sink_payload_bits, y.sink_payload_bits);
  }
}

TEST(NetworkTest, ScheduleDegradesLink) {
  NetworkConfig config = Config("g");
  config.media.profile = ProfileKind::kSaturating;
  config.schedules[0] = {{1'000'000, {0.0, 6'000'000}}};
  Network network(config);
  const double fast = Goodput(network, 5);
  Network slow_network(config);
  for (int w = 0; w < 5; ++w) slow_network.RunWindow();
  const int64_t before = slow_network.sink_payload_bits_total();
  for (int w = 0; w < 5; ++w) slow_network.RunWindow();
  const double slow =
      static_cast<double>(slow_network.sink_payload_bits_total() - before);
  EXPECT_LT(slow, fast * 0.5);
}

TEST(NetworkTest, RejectsBadConfig) {
  NetworkConfig config = Config("g");
  config.wireless.phy_rate_bps = 50'000'000;
  EXPECT_THROW(Network{config}, std::invalid_argument);
  config = Config("g-AP-w");
  config.schedules[1] = {{0, {}}};
  EXPECT_THROW(Network{config}, std::invalid_argument);
  config = Config("g");
  config.wireless.loss_prob = 1.5;
  EXPECT_THROW(Network{config}, std::invalid_argument);
}

}  // namespace
}  // namespace airtime
