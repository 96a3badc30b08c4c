#include "airtime/wlan_medium.h"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace airtime {

std::string_view ToString(TimeCategory category) {
  switch (category) {
    case TimeCategory::kTransmitting:
      return "transmitting";
    case TimeCategory::kBackingOff:
      return "backing_off";
    case TimeCategory::kHearingOther:
      return "hearing_other";
    case TimeCategory::kIdle:
      return "idle";
  }
  return "?";
}

void MacTimingParams::Validate() const {
  if (slot_us <= 0 || sifs_us <= 0 || difs_us <= 0 || preamble_us <= 0 ||
      symbol_us <= 0) {
    throw std::invalid_argument("MAC durations must be positive");
  }
  if (cw_min < 0 || cw_min > cw_max) {
    throw std::invalid_argument("need 0 <= cw_min <= cw_max");
  }
  if (retry_limit < 1) throw std::invalid_argument("retry_limit must be >= 1");
  if (!IsOfdmRate(control_rate_bps)) {
    throw std::invalid_argument("control rate is not an OFDM rate");
  }
}

bool IsOfdmRate(int64_t rate_bps) {
  return std::find(kOfdmRatesBps.begin(), kOfdmRatesBps.end(), rate_bps) !=
         kOfdmRatesBps.end();
}

TimeUs PpduAirtime(int64_t psdu_bytes, int64_t rate_bps,
                   const MacTimingParams& timing) {
  if (!IsOfdmRate(rate_bps)) {
    throw std::invalid_argument("unsupported phy rate " +
                                std::to_string(rate_bps));
  }
  if (psdu_bytes <= 0) throw std::invalid_argument("empty PSDU");
  // 54 Mbps * 4 us = 216 bits per symbol; exact for every OFDM rate.
  const int64_t bits_per_symbol = rate_bps * timing.symbol_us / kMicrosPerSecond;
  const int64_t bits = timing.service_bits + 8 * psdu_bytes + timing.tail_bits;
  const int64_t symbols = (bits + bits_per_symbol - 1) / bits_per_symbol;
  return timing.preamble_us + symbols * timing.symbol_us;
}

TimeUs DataFrameAirtime(int64_t msdu_bytes, int64_t rate_bps,
                        const MacTimingParams& timing) {
  if (msdu_bytes <= 0) throw std::invalid_argument("empty MSDU");
  return PpduAirtime(msdu_bytes + timing.mac_header_bytes, rate_bps, timing);
}

TimeUs AckAirtime(const MacTimingParams& timing) {
  return PpduAirtime(timing.ack_bytes, timing.control_rate_bps, timing);
}

TimeUs ExchangeAirtime(int64_t msdu_bytes, int64_t rate_bps,
                       const MacTimingParams& timing) {
  TimeUs total = timing.difs_us + DataFrameAirtime(msdu_bytes, rate_bps, timing) +
                 timing.sifs_us + AckAirtime(timing);
  if (timing.rts_cts) {
    total += PpduAirtime(timing.rts_bytes, timing.control_rate_bps, timing) +
             timing.sifs_us +
             PpduAirtime(timing.cts_bytes, timing.control_rate_bps, timing) +
             timing.sifs_us;
  }
  return total;
}

LinkConditions WirelessLink::ConditionsAt(TimeUs t_us) const {
  LinkConditions current = base;
  for (const LinkSegment& segment : schedule) {
    if (segment.start_us > t_us) break;
    current = segment.conditions;
  }
  return current;
}

NodeTimeline::NodeTimeline(int node_id, TimeUs start_us, bool keep_log)
    : node_id_(node_id), until_us_(start_us), keep_log_(keep_log) {}

void NodeTimeline::Classify(TimeUs from_us, TimeUs to_us,
                            TimeCategory category) {
  if (from_us != until_us_) {
    throw AccountingError(
        "node " + std::to_string(node_id_) + ": interval starts at " +
        std::to_string(from_us) + " us but timeline ends at " +
        std::to_string(until_us_) + " us");
  }
  if (to_us < from_us) {
    throw AccountingError("node " + std::to_string(node_id_) +
                          ": interval ends before it starts");
  }
  if (to_us == from_us) return;
  const TimeUs span = to_us - from_us;
  totals_[static_cast<size_t>(category)] += span;
  if (keep_log_ && current_ != category) log_.push_back({from_us, category});
  current_ = category;
  until_us_ = to_us;
  if (ledger_ == nullptr) return;
  switch (category) {
    case TimeCategory::kTransmitting:
      ledger_->Record(ledger_event::TxTime{span});
      break;
    case TimeCategory::kBackingOff:
      ledger_->Record(ledger_event::Backoff{span});
      break;
    case TimeCategory::kHearingOther:
      ledger_->Record(ledger_event::Other{span});
      break;
    case TimeCategory::kIdle:
      ledger_->Record(ledger_event::Idle{span});
      break;
  }
}

Medium::Medium(Simulator& sim, int channel, Options options, uint64_t seed)
    : sim_(sim),
      channel_(channel),
      options_(options),
      seed_(seed),
      last_sync_us_(sim.Now()),
      idle_since_us_(sim.Now()) {
  options_.timing.Validate();
}

int Medium::AddStation(int node_id) {
  if (StationOf(node_id)) {
    throw std::invalid_argument("node " + std::to_string(node_id) +
                                " already has a station on channel " +
                                std::to_string(channel_));
  }
  Sync();
  const TimeUs now = sim_.Now();
  Station station{
      .node_id = node_id,
      .queue = {},
      .cw = options_.timing.cw_min,
      .backoff_rng = RngStream(seed_, "backoff/ch" + std::to_string(channel_) +
                                          "/node" + std::to_string(node_id)),
      .timeline = NodeTimeline(node_id, now, options_.keep_timeline_log),
      .ledger = std::make_unique<StatsLedger>(options_.window_us, now),
  };
  station.timeline.set_ledger(station.ledger.get());
  stations_.push_back(std::move(station));
  return static_cast<int>(stations_.size()) - 1;
}

std::optional<int> Medium::StationOf(int node_id) const {
  for (size_t i = 0; i < stations_.size(); ++i) {
    if (stations_[i].node_id == node_id) return static_cast<int>(i);
  }
  return std::nullopt;
}

void Medium::AddLink(const WirelessLink* link) {
  if (link->channel != channel_) {
    throw std::invalid_argument("link channel does not match the medium");
  }
  const std::optional<int> tx = StationOf(link->tx_node);
  if (!tx) throw std::invalid_argument("link transmitter has no station");
  if (!IsOfdmRate(link->base.phy_rate_bps)) {
    throw std::invalid_argument("link phy rate is not an OFDM rate");
  }
  links_.emplace(link->link_id,
                 LinkEntry{link, *tx,
                           RngStream(seed_, "loss/link" +
                                                std::to_string(link->link_id))});
}

bool Medium::Enqueue(MacFrame frame) {
  auto it = links_.find(frame.link_id);
  if (it == links_.end()) {
    throw std::invalid_argument("frame for unknown link " +
                                std::to_string(frame.link_id));
  }
  if (frame.msdu_bytes <= 0) throw std::invalid_argument("empty frame");
  const int index = it->second.tx_station;
  Station& station = stations_[index];
  if (station.queue.size() >= options_.queue_limit) return false;
  Sync();
  const bool was_empty = station.queue.empty();
  station.queue_bits += frame.msdu_bytes * 8;
  station.queue.push_back(frame);
  if (was_empty && !busy_) {
    bool others_contending = false;
    for (size_t i = 0; i < stations_.size(); ++i) {
      if (static_cast<int>(i) != index && !stations_[i].queue.empty()) {
        others_contending = true;
      }
    }
    // A fresh contention period gets its own slot grid.
    if (!others_contending) idle_since_us_ = sim_.Now();
    StartCountdown(station, sim_.Now());
    ScheduleContention();
  }
  // While the medium is busy the countdown starts when it frees up.
  return true;
}

void Medium::Sync() {
  const TimeUs now = sim_.Now();
  if (now == last_sync_us_) return;
  for (size_t i = 0; i < stations_.size(); ++i) {
    stations_[i].timeline.Classify(last_sync_us_, now,
                                   CategoryOf(static_cast<int>(i)));
  }
  last_sync_us_ = now;
}

WindowStats Medium::SnapshotWindow(int station) {
  Sync();
  Station& s = stations_.at(station);
  s.ledger->Record(ledger_event::QueueDepth{s.queue_bits});
  return s.ledger->SnapshotAndReset(sim_.Now());
}

size_t Medium::queue_frames(int station) const {
  return stations_.at(station).queue.size();
}

int64_t Medium::queue_bits(int station) const {
  return stations_.at(station).queue_bits;
}

const NodeTimeline& Medium::timeline(int station) const {
  return stations_.at(station).timeline;
}

StatsLedger& Medium::ledger(int station) { return *stations_.at(station).ledger; }

bool Medium::IsTransmitting(int station) const {
  if (!busy_) return false;
  for (const Attempt& a : exchange_) {
    if (a.station == station) return true;
  }
  return false;
}

TimeCategory Medium::CategoryOf(int station) const {
  if (busy_) {
    return IsTransmitting(station) ? TimeCategory::kTransmitting
                                   : TimeCategory::kHearingOther;
  }
  return stations_[station].queue.empty() ? TimeCategory::kIdle
                                          : TimeCategory::kBackingOff;
}

TimeUs Medium::AlignToSlot(TimeUs t_us) const {
  const TimeUs slot = options_.timing.slot_us;
  const TimeUs offset = t_us - idle_since_us_;
  return idle_since_us_ + (offset + slot - 1) / slot * slot;
}

void Medium::StartCountdown(Station& station, TimeUs now_us) {
  if (station.backoff_slots < 0) {
    station.backoff_slots = station.backoff_rng.UniformInt(0, station.cw);
  }
  station.countdown_start_us = AlignToSlot(now_us);
}

void Medium::ScheduleContention() {
  if (contention_event_.valid()) sim_.Cancel(contention_event_);
  contention_event_ = {};
  if (busy_) return;
  TimeUs earliest = std::numeric_limits<TimeUs>::max();
  for (const Station& s : stations_) {
    if (s.queue.empty()) continue;
    earliest = std::min(earliest, s.countdown_start_us +
                                      s.backoff_slots * options_.timing.slot_us);
  }
  if (earliest == std::numeric_limits<TimeUs>::max()) return;
  contention_event_ =
      sim_.Schedule(earliest, [this] { OnContentionEnd(); }, "contention");
}

void Medium::OnContentionEnd() {
  contention_event_ = {};
  Sync();
  const TimeUs now = sim_.Now();
  const TimeUs slot = options_.timing.slot_us;
  exchange_.clear();
  for (size_t i = 0; i < stations_.size(); ++i) {
    Station& s = stations_[i];
    if (s.queue.empty()) continue;
    const TimeUs expiry = s.countdown_start_us + s.backoff_slots * slot;
    if (expiry == now) {
      s.backoff_slots = -1;
      const MacFrame& frame = s.queue.front();
      const WirelessLink* link = links_.at(frame.link_id).link;
      const LinkConditions cond = link->ConditionsAt(now);
      exchange_.push_back(
          {static_cast<int>(i),
           ExchangeAirtime(frame.msdu_bytes, cond.phy_rate_bps,
                           options_.timing),
           static_cast<double>(cond.phy_rate_bps), false});
    } else if (now > s.countdown_start_us) {
      // Freeze: keep the slots not yet counted.
      s.backoff_slots -= (now - s.countdown_start_us) / slot;
    }
  }
  if (exchange_.empty()) {
    throw std::logic_error("contention ended with no expiring station");
  }
  TimeUs duration = 0;
  for (const Attempt& a : exchange_) duration = std::max(duration, a.airtime_us);
  if (exchange_.size() == 1) {
    Attempt& a = exchange_.front();
    const MacFrame& frame = stations_[a.station].queue.front();
    LinkEntry& entry = links_.at(frame.link_id);
    a.success = !entry.loss_rng.Bernoulli(
        entry.link->ConditionsAt(now).loss_prob);
  } else {
    ++collisions_;
  }
  busy_ = true;
  sim_.Schedule(now + duration, [this] { OnExchangeEnd(); }, "exchange");
}

void Medium::OnExchangeEnd() {
  Sync();
  const TimeUs now = sim_.Now();
  busy_ = false;
  struct Completion {
    int station;
    MacFrame frame;
    TxOutcome outcome;
  };
  std::vector<Completion> completions;
  for (const Attempt& a : exchange_) {
    Station& s = stations_[a.station];
    s.head_attempts += 1;
    s.head_airtime_us += a.airtime_us;
    s.head_rate_airtime += a.phy_rate_bps * static_cast<double>(a.airtime_us);
    const bool exhausted = s.head_attempts >= options_.timing.retry_limit;
    if (!a.success && !exhausted) {
      s.cw = std::min(2 * s.cw + 1, options_.timing.cw_max);
      continue;
    }
    const MacFrame frame = s.queue.front();
    s.queue.pop_front();
    s.queue_bits -= frame.msdu_bytes * 8;
    TxOutcome outcome{
        .delivered = a.success,
        .attempts = s.head_attempts,
        .airtime_us = s.head_airtime_us,
        .phy_rate_bps =
            s.head_rate_airtime / static_cast<double>(s.head_airtime_us),
        .completed_us = now,
    };
    s.ledger->Record(ledger_event::TxDone{
        a.success ? frame.msdu_bytes * 8 : 0, 0, s.head_attempts});
    s.cw = options_.timing.cw_min;
    s.head_attempts = 0;
    s.head_airtime_us = 0;
    s.head_rate_airtime = 0.0;
    completions.push_back({a.station, frame, outcome});
  }
  exchange_.clear();

  idle_since_us_ = now;
  for (Station& s : stations_) {
    if (!s.queue.empty()) StartCountdown(s, now);
  }
  ScheduleContention();

  if (on_complete_) {
    for (const Completion& c : completions) {
      on_complete_(c.station, c.frame, c.outcome);
    }
  }
}

}  // namespace airtime
