#include "airtime/stats_ledger.h"

#include <string>

namespace airtime {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void RequireNonNegative(TimeUs us) {
  if (us < 0) throw AccountingError("negative duration recorded");
}

}  // namespace

StatsLedger::StatsLedger(TimeUs window_us, TimeUs start_us)
    : window_us_(window_us), window_start_us_(start_us) {
  if (window_us <= 0) throw std::invalid_argument("window must be positive");
  current_.t_start_us = start_us;
  current_.meas_time_us = window_us;
}

void StatsLedger::Record(const LedgerEvent& event) {
  std::visit(
      Overloaded{
          [this](const ledger_event::TxDone& e) {
            RequireNonNegative(e.airtime_us);
            current_.tx_bits += e.bits;
            current_.ledger.tx_us += e.airtime_us;
            current_.attempts += e.attempts;
            current_.intended_packets += 1;
          },
          [this](const ledger_event::TxTime& e) {
            RequireNonNegative(e.us);
            current_.ledger.tx_us += e.us;
          },
          [this](const ledger_event::Backoff& e) {
            RequireNonNegative(e.us);
            current_.ledger.backoff_us += e.us;
          },
          [this](const ledger_event::Other& e) {
            RequireNonNegative(e.us);
            current_.ledger.other_us += e.us;
          },
          [this](const ledger_event::Idle& e) {
            RequireNonNegative(e.us);
            current_.ledger.idle_us += e.us;
          },
          [this](const ledger_event::QueueDepth& e) {
            current_.tx_queue_depth_bits = e.bits;
          },
      },
      event);
}

WindowStats StatsLedger::SnapshotAndReset(TimeUs now_us) {
  if (now_us - window_start_us_ != window_us_) {
    throw AccountingError("snapshot at " + std::to_string(now_us) +
                          " us does not close the window starting at " +
                          std::to_string(window_start_us_) + " us");
  }
  if (current_.ledger.Total() != window_us_) {
    throw AccountingError(
        "window " + std::to_string(window_index_) + " accounts for " +
        std::to_string(current_.ledger.Total()) + " of " +
        std::to_string(window_us_) + " us");
  }
  WindowStats done = std::move(current_);
  done.window_index = window_index_;

  ++window_index_;
  window_start_us_ = now_us;
  current_ = WindowStats{};
  current_.t_start_us = now_us;
  current_.meas_time_us = window_us_;
  // Queue depth is a level, not a counter; it carries over.
  current_.tx_queue_depth_bits = done.tx_queue_depth_bits;
  return done;
}

double Throughput(const WindowStats& stats) {
  return static_cast<double>(stats.tx_bits) * 1e6 /
         static_cast<double>(stats.meas_time_us);
}

std::optional<double> RetryRate(int64_t attempts, int64_t intended) {
  if (intended <= 0) return std::nullopt;
  return static_cast<double>(attempts) / static_cast<double>(intended);
}

LinkMonitor::LinkMonitor(int link_id, double observation_loss, uint64_t seed)
    : link_id_(link_id),
      observation_loss_(observation_loss),
      rng_(seed, "sniffer/" + std::to_string(link_id)) {}

void LinkMonitor::OnCompletion(int64_t attempts, TimeUs airtime_us,
                               double phy_rate_bps) {
  if (observation_loss_ > 0.0 && rng_.Bernoulli(observation_loss_)) return;
  attempts_ += attempts;
  intended_ += 1;
  airtime_ += static_cast<double>(airtime_us);
  rate_airtime_ += static_cast<double>(airtime_us) * phy_rate_bps;
}

LinkQuality LinkMonitor::SnapshotAndReset() {
  LinkQuality q;
  q.link_id = link_id_;
  q.retry_rate = RetryRate(attempts_, intended_);
  q.avg_phy_rate_bps = airtime_ > 0.0 ? rate_airtime_ / airtime_ : 0.0;
  q.sample_count = intended_;
  attempts_ = intended_ = 0;
  airtime_ = rate_airtime_ = 0.0;
  return q;
}

}  // namespace airtime
