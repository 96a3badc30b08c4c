#include "airtime/wlan_medium.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace airtime {
namespace {

constexpr TimeUs kM = 200'000;

// Independent evaluation of the OFDM PPDU duration.
TimeUs OracleAirtime(int64_t psdu_bytes, int64_t rate_bps) {
  const int64_t bits_per_symbol = rate_bps * 4 / 1'000'000;
  const int64_t bits = 16 + 8 * psdu_bytes + 6;
  const int64_t symbols = (bits + bits_per_symbol - 1) / bits_per_symbol;
  return 20 + 4 * symbols;
}

TEST(AirtimeTest, HandEvaluatedExamples) {
  const MacTimingParams timing;
  EXPECT_EQ(DataFrameAirtime(1500, 54'000'000, timing), 248);
  EXPECT_EQ(AckAirtime(timing), 28);
  EXPECT_EQ(ExchangeAirtime(1500, 54'000'000, timing), 326);
  // 1396-byte datagram MSDU used by the media flows.
  EXPECT_EQ(DataFrameAirtime(1396, 54'000'000, timing), 232);
  EXPECT_EQ(ExchangeAirtime(1396, 54'000'000, timing), 310);
}

TEST(AirtimeTest, MatchesOracleForEveryRate) {
  const MacTimingParams timing;
  for (int64_t rate : kOfdmRatesBps) {
    for (int64_t bytes : {1, 14, 100, 576, 1396, 1500, 2304}) {
      ASSERT_EQ(PpduAirtime(bytes, rate, timing), OracleAirtime(bytes, rate))
          << rate << " " << bytes;
      ASSERT_EQ(DataFrameAirtime(bytes, rate, timing),
                OracleAirtime(bytes + 28, rate));
      ASSERT_EQ(ExchangeAirtime(bytes, rate, timing),
                34 + OracleAirtime(bytes + 28, rate) + 16 +
                    OracleAirtime(14, 24'000'000));
    }
  }
}

TEST(AirtimeTest, RtsCtsAddsControlFrames) {
  MacTimingParams timing;
  timing.rts_cts = true;
  EXPECT_EQ(ExchangeAirtime(1500, 54'000'000, timing),
            326 + OracleAirtime(20, 24'000'000) + 16 +
                OracleAirtime(14, 24'000'000) + 16);
}

TEST(AirtimeTest, RejectsUnsupportedRates) {
  const MacTimingParams timing;
  EXPECT_THROW(PpduAirtime(100, 11'000'000, timing), std::invalid_argument);
  EXPECT_THROW(PpduAirtime(0, 54'000'000, timing), std::invalid_argument);
  EXPECT_FALSE(IsOfdmRate(5'500'000));
  EXPECT_TRUE(IsOfdmRate(6'000'000));
}

TEST(MacTimingParamsTest, Validation) {
  MacTimingParams timing;
  EXPECT_NO_THROW(timing.Validate());
  timing.cw_min = 2000;
  EXPECT_THROW(timing.Validate(), std::invalid_argument);
  timing = MacTimingParams();
  timing.retry_limit = 0;
  EXPECT_THROW(timing.Validate(), std::invalid_argument);
  timing = MacTimingParams();
  timing.slot_us = 0;
  EXPECT_THROW(timing.Validate(), std::invalid_argument);
}

TEST(WirelessLinkTest, ScheduleOverridesBase) {
  WirelessLink link;
  link.base = {0.0, 54'000'000};
  link.schedule = {{1000, {0.5, 24'000'000}}, {2000, {0.1, 6'000'000}}};
  EXPECT_EQ(link.ConditionsAt(999).phy_rate_bps, 54'000'000);
  EXPECT_EQ(link.ConditionsAt(1000).phy_rate_bps, 24'000'000);
  EXPECT_DOUBLE_EQ(link.ConditionsAt(1999).loss_prob, 0.5);
  EXPECT_EQ(link.ConditionsAt(5000).phy_rate_bps, 6'000'000);
}

TEST(NodeTimelineTest, RejectsGapsOverlapsAndReversal) {
  NodeTimeline timeline(0, 0);
  timeline.Classify(0, 10, TimeCategory::kIdle);
  EXPECT_THROW(timeline.Classify(11, 20, TimeCategory::kIdle),
               AccountingError);
  EXPECT_THROW(timeline.Classify(9, 20, TimeCategory::kIdle),
               AccountingError);
  EXPECT_THROW(timeline.Classify(10, 5, TimeCategory::kIdle),
               AccountingError);
  timeline.Classify(10, 10, TimeCategory::kTransmitting);
  timeline.Classify(10, 25, TimeCategory::kBackingOff);
  EXPECT_EQ(timeline.classified_until(), 25);
  EXPECT_EQ(timeline.total(TimeCategory::kIdle), 10);
  EXPECT_EQ(timeline.total(TimeCategory::kBackingOff), 15);
}

// One medium with N stations, each owning one link to a sink node.
class Bench {
 public:
  Bench(int stations, double loss, uint64_t seed, int64_t rate = 54'000'000,
        MacTimingParams timing = {})
      : links_(stations) {
    Medium::Options options;
    options.timing = timing;
    options.window_us = kM;
    options.keep_timeline_log = true;
    medium_ = std::make_unique<Medium>(sim_, 1, options, seed);
    for (int i = 0; i < stations; ++i) medium_->AddStation(i);
    medium_->AddStation(100);  // shared receiver
    for (int i = 0; i < stations; ++i) {
      links_[i].link_id = i;
      links_[i].tx_node = i;
      links_[i].rx_node = 100;
      links_[i].base = {loss, rate};
      medium_->AddLink(&links_[i]);
    }
    medium_->SetCompletionHandler(
        [this](int station, const MacFrame& frame, const TxOutcome& outcome) {
          outcomes_.push_back({station, outcome});
          if (station < static_cast<int>(saturate_.size()) &&
              saturate_[station]) {
            medium_->Enqueue(frame);
          }
        });
  }

  void Saturate(int station, int depth = 2) {
    saturate_.resize(std::max<size_t>(saturate_.size(), station + 1));
    saturate_[station] = true;
    for (int i = 0; i < depth; ++i) medium_->Enqueue({station, 1396, 0});
  }

  // Runs |windows| windows, snapshotting every station each time.
  std::vector<std::vector<WindowStats>> Run(int windows) {
    std::vector<std::vector<WindowStats>> out(medium_->station_count());
    for (int w = 1; w <= windows; ++w) {
      sim_.RunUntil(static_cast<TimeUs>(w) * kM);
      for (size_t s = 0; s < medium_->station_count(); ++s) {
        out[s].push_back(medium_->SnapshotWindow(static_cast<int>(s)));
      }
    }
    return out;
  }

  struct Entry {
    int station;
    TxOutcome outcome;
  };
  Simulator sim_;
  std::vector<WirelessLink> links_;
  std::unique_ptr<Medium> medium_;
  std::vector<Entry> outcomes_;
  std::vector<bool> saturate_;
};

TEST(MediumTest, LosslessSoleNodeDeliversInOneAttempt) {
  Bench bench(1, 0.0, 1);
  bench.medium_->Enqueue({0, 1500, 7});
  bench.sim_.RunUntil(10'000);
  ASSERT_EQ(bench.outcomes_.size(), 1u);
  EXPECT_TRUE(bench.outcomes_[0].outcome.delivered);
  EXPECT_EQ(bench.outcomes_[0].outcome.attempts, 1);
  EXPECT_EQ(bench.outcomes_[0].outcome.airtime_us, 326);
}

TEST(MediumTest, CertainLossExhaustsRetryLimit) {
  Bench bench(1, 1.0, 1);
  bench.medium_->Enqueue({0, 1500, 7});
  bench.sim_.RunUntil(1'000'000);
  ASSERT_EQ(bench.outcomes_.size(), 1u);
  EXPECT_FALSE(bench.outcomes_[0].outcome.delivered);
  EXPECT_EQ(bench.outcomes_[0].outcome.attempts, 7);
  EXPECT_EQ(bench.outcomes_[0].outcome.airtime_us, 7 * 326);
}

TEST(MediumTest, TwoNodeHandTrace) {
  // A sends one 1500-byte frame; B has nothing queued. A backs off for some
  // number of slots then owns the medium for 326 us; B hears it.
  for (uint64_t seed = 1; seed < 40; ++seed) {
    Bench bench(2, 0.0, seed);
    bench.medium_->Enqueue({0, 1500, 0});
    bench.sim_.RunUntil(kM);
    bench.medium_->Sync();
    const auto& a = bench.medium_->timeline(0).log();
    const auto& b = bench.medium_->timeline(1).log();
    ASSERT_GE(a.size(), 2u);
    TimeUs backoff = 0;
    size_t i = 0;
    if (a[0].category == TimeCategory::kBackingOff) {
      backoff = a[1].at_us - a[0].at_us;
      i = 1;
    }
    ASSERT_EQ(backoff % 9, 0);
    ASSERT_EQ(a[i].category, TimeCategory::kTransmitting);
    ASSERT_EQ(a[i].at_us, backoff);
    ASSERT_EQ(a[i + 1].at_us - a[i].at_us, 326);
    EXPECT_EQ(bench.medium_->timeline(0).total(TimeCategory::kTransmitting),
              326);
    EXPECT_EQ(bench.medium_->timeline(0).total(TimeCategory::kBackingOff),
              backoff);
    EXPECT_EQ(bench.medium_->timeline(1).total(TimeCategory::kHearingOther),
              326);
    EXPECT_EQ(bench.medium_->timeline(1).total(TimeCategory::kBackingOff), 0);
    EXPECT_EQ(bench.medium_->timeline(1).total(TimeCategory::kIdle),
              kM - 326);
    EXPECT_EQ(b.front().category, backoff > 0 ? TimeCategory::kIdle
                                              : TimeCategory::kHearingOther);
    if (backoff == 45) {
      // The five-slot case: A backing_off(45), B idle(45), then 326 each.
      EXPECT_EQ(b[1].at_us, 45);
      EXPECT_EQ(b[1].category, TimeCategory::kHearingOther);
      return;
    }
  }
  FAIL() << "no seed produced a five-slot first backoff";
}

TEST(MediumTest, IdleGapIsIdleForEveryone) {
  Bench bench(2, 0.0, 3);
  bench.medium_->Enqueue({0, 1500, 0});
  bench.sim_.RunUntil(50'000);
  bench.medium_->Sync();
  const TimeUs a_idle = bench.medium_->timeline(0).total(TimeCategory::kIdle);
  bench.sim_.RunUntil(60'000);
  bench.medium_->Sync();
  EXPECT_EQ(bench.medium_->timeline(0).total(TimeCategory::kIdle),
            a_idle + 10'000);
  EXPECT_EQ(bench.medium_->timeline(1).total(TimeCategory::kIdle),
            60'000 - 326);
}

// Closed-form truncated-geometric attempt statistics, computed directly.
TEST(MediumTest, MeanAttemptsMatchesTruncatedGeometric) {
  constexpr double p = 0.5;
  constexpr int kLimit = 7;
  double delivered_mean_num = 0.0;
  for (int k = 1; k <= kLimit; ++k) delivered_mean_num += k * std::pow(p, k);
  const double delivered_mean = delivered_mean_num / (1.0 - std::pow(p, kLimit));
  double overall_mean = 0.0;
  for (int k = 1; k < kLimit; ++k) {
    overall_mean += k * std::pow(p, k - 1) * (1.0 - p);
  }
  overall_mean += kLimit * std::pow(p, kLimit - 1);

  Bench bench(1, p, 2024, 54'000'000);
  bench.Saturate(0);
  constexpr size_t kFrames = 100'000;
  while (bench.outcomes_.size() < kFrames) {
    bench.sim_.RunUntil(bench.sim_.Now() + 1'000'000);
  }
  double all = 0.0, delivered = 0.0;
  int64_t delivered_count = 0;
  for (size_t i = 0; i < kFrames; ++i) {
    const TxOutcome& o = bench.outcomes_[i].outcome;
    ASSERT_GE(o.attempts, 1);
    ASSERT_LE(o.attempts, kLimit);
    all += o.attempts;
    if (o.delivered) {
      delivered += o.attempts;
      ++delivered_count;
    }
  }
  EXPECT_NEAR(delivered / delivered_count, delivered_mean,
              0.01 * delivered_mean);
  EXPECT_NEAR(all / kFrames, overall_mean, 0.01 * overall_mean);
}

TEST(MediumTest, SoleSaturatingNodeThroughputAndIdle) {
  Bench bench(1, 0.0, 5);
  bench.Saturate(0);
  const auto windows = bench.Run(50);
  int64_t bits = 0;
  for (const WindowStats& w : windows[0]) {
    bits += w.tx_bits;
    EXPECT_LT(w.ledger.idle_us, kM / 100);
  }
  const double mbps = static_cast<double>(bits) / (50 * 0.2) / 1e6;
  EXPECT_GE(mbps, 20.0);
  EXPECT_LE(mbps, 30.0);
}

TEST(MediumTest, TwoSaturatingNodesShareFairly) {
  Bench bench(2, 0.0, 8);
  bench.Saturate(0);
  bench.Saturate(1);
  const auto windows = bench.Run(150);
  int64_t bits[2] = {0, 0};
  for (int s = 0; s < 2; ++s) {
    for (const WindowStats& w : windows[s]) bits[s] += w.tx_bits;
  }
  EXPECT_NEAR(static_cast<double>(bits[0]) / bits[1], 1.0, 0.05);
  EXPECT_GT(bench.medium_->collisions(), 0u);
}

TEST(MediumTest, CollisionsChargeEveryColliderAndRetry) {
  Bench bench(6, 0.0, 4);
  for (int s = 0; s < 6; ++s) bench.Saturate(s);
  bench.Run(20);
  EXPECT_GT(bench.medium_->collisions(), 0u);
  bool saw_retry = false;
  for (const auto& e : bench.outcomes_) {
    EXPECT_LE(e.outcome.attempts, 7);
    if (e.outcome.attempts > 1) saw_retry = true;
    EXPECT_EQ(e.outcome.airtime_us % 310, 0);
  }
  EXPECT_TRUE(saw_retry);
}

TEST(MediumTest, TxBitsSumEqualsDeliveredBits) {
  Bench bench(3, 0.2, 12);
  for (int s = 0; s < 3; ++s) bench.Saturate(s);
  const auto windows = bench.Run(30);
  for (int s = 0; s < 3; ++s) {
    int64_t ledger_bits = 0, attempts = 0, intended = 0;
    for (const WindowStats& w : windows[s]) {
      ledger_bits += w.tx_bits;
      attempts += w.attempts;
      intended += w.intended_packets;
      if (w.tx_bits > 0) {
        EXPECT_GT(w.ledger.tx_us, 0);
      }
      if (w.intended_packets > 0) {
        EXPECT_GE(*RetryRate(w.attempts, w.intended_packets), 1.0);
      }
    }
    int64_t delivered = 0, outcome_attempts = 0, outcome_count = 0;
    for (const auto& e : bench.outcomes_) {
      if (e.station != s || e.outcome.completed_us > 30 * kM) continue;
      if (e.outcome.delivered) delivered += 1396 * 8;
      outcome_attempts += e.outcome.attempts;
      ++outcome_count;
    }
    EXPECT_EQ(ledger_bits, delivered);
    EXPECT_EQ(attempts, outcome_attempts);
    EXPECT_EQ(intended, outcome_count);
  }
}

TEST(MediumTest, QueueLimitRefusesFrames) {
  Simulator sim;
  Medium::Options options;
  options.queue_limit = 3;
  Medium medium(sim, 1, options, 1);
  medium.AddStation(0);
  medium.AddStation(1);
  WirelessLink link;
  link.link_id = 0;
  link.tx_node = 0;
  link.rx_node = 1;
  medium.AddLink(&link);
  EXPECT_TRUE(medium.Enqueue({0, 100, 0}));
  EXPECT_TRUE(medium.Enqueue({0, 100, 0}));
  EXPECT_TRUE(medium.Enqueue({0, 100, 0}));
  EXPECT_FALSE(medium.Enqueue({0, 100, 0}));
  EXPECT_EQ(medium.queue_frames(0), 3u);
  EXPECT_EQ(medium.queue_bits(0), 3 * 800);
}

// Randomized conservation property over many media, loads and windows.
TEST(MediumTest, ConservationPropertyAcrossRandomBenches) {
  RngStream rng(77, "property");
  int64_t windows_checked = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int stations = 1 + static_cast<int>(rng.UniformInt(0, 4));
    const double loss = rng.UniformUnit() * 0.6;
    const int64_t rate = kOfdmRatesBps[rng.UniformInt(0, 7)];
    Bench bench(stations, loss, 1000 + trial, rate);
    for (int s = 0; s < stations; ++s) {
      if (rng.Bernoulli(0.6)) bench.Saturate(s);
    }
    // Sparse arrivals on the others.
    for (int s = 0; s < stations; ++s) {
      for (TimeUs t = rng.UniformInt(0, 5000); t < 8 * kM;
           t += 1 + rng.UniformInt(0, 40'000)) {
        bench.sim_.Schedule(t, [&bench, s] {
          bench.medium_->Enqueue({s, 500, 0});
        });
      }
    }
    const auto windows = bench.Run(8);
    for (const auto& per_station : windows) {
      for (const WindowStats& w : per_station) {
        ASSERT_EQ(w.ledger.Total(), kM);
        ASSERT_GE(w.ledger.tx_us, 0);
        ASSERT_GE(w.ledger.backoff_us, 0);
        ASSERT_GE(w.ledger.other_us, 0);
        ASSERT_GE(w.ledger.idle_us, 0);
        ++windows_checked;
      }
    }
  }
  EXPECT_GE(windows_checked, 400);
}

}  // namespace
}  // namespace airtime
