// Shared OFDM (802.11a/g) channel with DCF contention.
//
// Every station on a Medium hears every other one. At each instant a
// station is in exactly one of four states:
//   transmitting   - it owns the current exchange (DIFS, data, SIFS, ACK)
//   backing_off    - medium idle and the station has a frame waiting
//   hearing_other  - another station owns the medium
//   idle           - medium idle and nothing to send
// The Medium classifies elapsed time into these states on every state
// change, so the four totals of a station always sum to elapsed time.

#ifndef AIRTIME_WLAN_MEDIUM_H_
#define AIRTIME_WLAN_MEDIUM_H_

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "airtime/sim_engine.h"
#include "airtime/stats_ledger.h"

namespace airtime {

enum class Band { k11a, k11g };

enum class TimeCategory : uint8_t {
  kTransmitting,
  kBackingOff,
  kHearingOther,
  kIdle,
};

std::string_view ToString(TimeCategory category);

// OFDM timing. Defaults are the 802.11a/g values.
struct MacTimingParams {
  TimeUs slot_us = 9;
  TimeUs sifs_us = 16;
  TimeUs difs_us = 34;
  TimeUs preamble_us = 20;
  TimeUs symbol_us = 4;
  int cw_min = 15;
  int cw_max = 1023;
  int retry_limit = 7;
  int64_t ack_bytes = 14;
  int64_t control_rate_bps = 24'000'000;
  int64_t mac_header_bytes = 28;  // header + FCS
  int64_t service_bits = 16;
  int64_t tail_bits = 6;
  bool rts_cts = false;
  int64_t rts_bytes = 20;
  int64_t cts_bytes = 14;

  // Throws std::invalid_argument on non-positive durations, cw_min > cw_max,
  // retry_limit < 1 or an unsupported control rate.
  void Validate() const;
};

inline constexpr std::array<int64_t, 8> kOfdmRatesBps = {
    6'000'000,  9'000'000,  12'000'000, 18'000'000,
    24'000'000, 36'000'000, 48'000'000, 54'000'000};

bool IsOfdmRate(int64_t rate_bps);

// preamble + ceil((service + 8 * psdu + tail) / bits_per_symbol) * symbol.
// Throws std::invalid_argument for rates outside the OFDM set or empty PSDUs.
TimeUs PpduAirtime(int64_t psdu_bytes, int64_t rate_bps,
                   const MacTimingParams& timing);
// Data MPDU carrying |msdu_bytes| (MAC header added).
TimeUs DataFrameAirtime(int64_t msdu_bytes, int64_t rate_bps,
                        const MacTimingParams& timing);
TimeUs AckAirtime(const MacTimingParams& timing);
// DIFS + [RTS + SIFS + CTS + SIFS] + data + SIFS + ACK.
TimeUs ExchangeAirtime(int64_t msdu_bytes, int64_t rate_bps,
                       const MacTimingParams& timing);

struct LinkConditions {
  double loss_prob = 0.0;
  int64_t phy_rate_bps = 54'000'000;
};

// A piecewise-constant change of link conditions starting at |start_us|.
struct LinkSegment {
  TimeUs start_us = 0;
  LinkConditions conditions;
};

struct WirelessLink {
  int link_id = -1;
  Band band = Band::k11g;
  int channel = 1;
  int tx_node = -1;
  int rx_node = -1;
  LinkConditions base;
  // Sorted by start_us; overrides |base| from each start onwards.
  std::vector<LinkSegment> schedule;

  LinkConditions ConditionsAt(TimeUs t_us) const;
};

class NodeTimeline {
 public:
  struct Transition {
    TimeUs at_us;
    TimeCategory category;
  };

  NodeTimeline(int node_id, TimeUs start_us, bool keep_log = false);

  // Extends the timeline by [from_us, to_us). Throws AccountingError if
  // |from_us| is not where the timeline currently ends.
  void Classify(TimeUs from_us, TimeUs to_us, TimeCategory category);

  void set_ledger(StatsLedger* ledger) { ledger_ = ledger; }

  int node_id() const { return node_id_; }
  TimeUs classified_until() const { return until_us_; }
  std::optional<TimeCategory> current() const { return current_; }
  TimeUs total(TimeCategory category) const {
    return totals_[static_cast<size_t>(category)];
  }
  const std::vector<Transition>& log() const { return log_; }

 private:
  int node_id_;
  TimeUs until_us_;
  std::optional<TimeCategory> current_;
  std::array<TimeUs, 4> totals_{};
  bool keep_log_;
  std::vector<Transition> log_;
  StatsLedger* ledger_ = nullptr;
};

struct MacFrame {
  int link_id = -1;
  int64_t msdu_bytes = 0;
  uint64_t tag = 0;  // opaque to the medium
};

struct TxOutcome {
  bool delivered = false;
  int attempts = 0;
  TimeUs airtime_us = 0;  // sum over attempts
  double phy_rate_bps = 0.0;  // airtime-weighted over attempts
  TimeUs completed_us = 0;
};

class Medium {
 public:
  using CompletionHandler =
      std::function<void(int station, const MacFrame&, const TxOutcome&)>;

  struct Options {
    MacTimingParams timing;
    TimeUs window_us = StatsLedger::kDefaultWindowUs;
    size_t queue_limit = 256;
    bool keep_timeline_log = false;
  };

  Medium(Simulator& sim, int channel, Options options, uint64_t seed);
  Medium(const Medium&) = delete;
  Medium& operator=(const Medium&) = delete;

  // Returns the station index. A node has at most one station per medium.
  int AddStation(int node_id);
  std::optional<int> StationOf(int node_id) const;
  // The link's transmitter must already be a station here.
  void AddLink(const WirelessLink* link);

  void SetCompletionHandler(CompletionHandler handler) {
    on_complete_ = std::move(handler);
  }

  // Queues a frame for the link's transmitter. Returns false (frame dropped)
  // when that station's queue is full.
  bool Enqueue(MacFrame frame);

  // Classifies all stations up to the current simulation time.
  void Sync();
  // Sync, record queue depth, and close the station's window.
  WindowStats SnapshotWindow(int station);

  int channel() const { return channel_; }
  const MacTimingParams& timing() const { return options_.timing; }
  size_t station_count() const { return stations_.size(); }
  size_t queue_frames(int station) const;
  int64_t queue_bits(int station) const;
  const NodeTimeline& timeline(int station) const;
  StatsLedger& ledger(int station);
  bool busy() const { return busy_; }
  uint64_t collisions() const { return collisions_; }

 private:
  struct Station {
    int node_id;
    std::deque<MacFrame> queue;
    int64_t queue_bits = 0;
    int cw;
    int head_attempts = 0;
    TimeUs head_airtime_us = 0;
    double head_rate_airtime = 0.0;
    int64_t backoff_slots = -1;  // -1: none drawn
    TimeUs countdown_start_us = 0;
    RngStream backoff_rng;
    NodeTimeline timeline;
    std::unique_ptr<StatsLedger> ledger;
  };
  struct Attempt {
    int station;
    TimeUs airtime_us;
    double phy_rate_bps;
    bool success;
  };
  struct LinkEntry {
    const WirelessLink* link;
    int tx_station;
    RngStream loss_rng;
  };

  bool IsTransmitting(int station) const;
  TimeCategory CategoryOf(int station) const;
  TimeUs AlignToSlot(TimeUs t_us) const;
  void StartCountdown(Station& station, TimeUs now_us);
  void ScheduleContention();
  void OnContentionEnd();
  void OnExchangeEnd();

  Simulator& sim_;
  int channel_;
  Options options_;
  uint64_t seed_;
  std::vector<Station> stations_;
  std::unordered_map<int, LinkEntry> links_;
  CompletionHandler on_complete_;

  TimeUs last_sync_us_ = 0;
  bool busy_ = false;
  TimeUs idle_since_us_ = 0;
  std::vector<Attempt> exchange_;
  EventHandle contention_event_;
  uint64_t collisions_ = 0;
};

}  // namespace airtime

#endif  // AIRTIME_WLAN_MEDIUM_H_
