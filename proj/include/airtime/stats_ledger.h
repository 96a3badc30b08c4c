// Per-node, per-window channel statistics, as a driver-resident agent would
// collect them: where the node's time went (transmitting, backing off,
// hearing other stations, idle), how many bits it moved, how many attempts
// that took, and how deep its transmit queue is.

#ifndef AIRTIME_STATS_LEDGER_H_
#define AIRTIME_STATS_LEDGER_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "airtime/sim_engine.h"

namespace airtime {

// Raised when time accounting stops adding up. Always a simulator bug.
class AccountingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct TimeLedger {
  TimeUs tx_us = 0;
  TimeUs backoff_us = 0;
  TimeUs other_us = 0;
  TimeUs idle_us = 0;

  TimeUs Total() const { return tx_us + backoff_us + other_us + idle_us; }
  bool operator==(const TimeLedger&) const = default;
};

struct LinkQuality {
  int link_id = -1;
  double avg_phy_rate_bps = 0.0;
  // attempts / intended packets; absent when nothing completed on the link.
  std::optional<double> retry_rate;
  int64_t sample_count = 0;
};

struct WindowStats {
  int64_t window_index = 0;
  TimeUs t_start_us = 0;
  TimeUs meas_time_us = 0;
  TimeLedger ledger;
  int64_t tx_bits = 0;
  int64_t attempts = 0;
  int64_t intended_packets = 0;
  int64_t tx_queue_depth_bits = 0;
  std::vector<LinkQuality> links;
};

namespace ledger_event {
// A packet finished (delivered or dropped). |bits| is zero for drops.
// |airtime_us| is added to tx time; callers that report airtime through
// TxTime intervals pass zero here.
struct TxDone {
  int64_t bits = 0;
  TimeUs airtime_us = 0;
  int64_t attempts = 0;
};
struct TxTime { TimeUs us = 0; };
struct Backoff { TimeUs us = 0; };
struct Other { TimeUs us = 0; };
struct Idle { TimeUs us = 0; };
struct QueueDepth { int64_t bits = 0; };
}  // namespace ledger_event

using LedgerEvent =
    std::variant<ledger_event::TxDone, ledger_event::TxTime,
                 ledger_event::Backoff, ledger_event::Other,
                 ledger_event::Idle, ledger_event::QueueDepth>;

class StatsLedger {
 public:
  static constexpr TimeUs kDefaultWindowUs = 200 * kMicrosPerMilli;

  explicit StatsLedger(TimeUs window_us = kDefaultWindowUs,
                       TimeUs start_us = 0);

  void Record(const LedgerEvent& event);

  // Closes the current window. |now_us| must be exactly one window past the
  // window start, and the four time components must sum to the window
  // length; otherwise AccountingError.
  WindowStats SnapshotAndReset(TimeUs now_us);

  TimeUs window_us() const { return window_us_; }
  TimeUs window_start_us() const { return window_start_us_; }
  int64_t window_index() const { return window_index_; }
  const TimeLedger& current() const { return current_.ledger; }

 private:
  TimeUs window_us_;
  TimeUs window_start_us_;
  int64_t window_index_ = 0;
  WindowStats current_;
};

// TxBits / measTime, in bits per second.
double Throughput(const WindowStats& stats);

// attempts / intended; nullopt when nothing was intended.
std::optional<double> RetryRate(int64_t attempts, int64_t intended);

// Per-link quality tap used by the source sniffer. Collects attempt counts
// and airtime-weighted phy rate of packets completing on one link within a
// window. With |observation_loss| > 0 a completion is missed with that
// probability, emulating an imperfect sniffer.
class LinkMonitor {
 public:
  LinkMonitor(int link_id, double observation_loss, uint64_t seed);

  void OnCompletion(int64_t attempts, TimeUs airtime_us, double phy_rate_bps);
  LinkQuality SnapshotAndReset();

  int link_id() const { return link_id_; }

 private:
  int link_id_;
  double observation_loss_;
  RngStream rng_;
  int64_t attempts_ = 0;
  int64_t intended_ = 0;
  double airtime_ = 0.0;
  double rate_airtime_ = 0.0;
};

}  // namespace airtime

#endif  // AIRTIME_STATS_LEDGER_H_
