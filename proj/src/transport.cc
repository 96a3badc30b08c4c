#include "airtime/transport.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace airtime {

void ReliableParams::Validate() const {
  if (window < 1 || ack_every < 1 || ack_payload_bytes <= 0) {
    throw std::invalid_argument("bad reliable transport window/ack settings");
  }
  if (!(rto_multiplier > 0.0) || min_rto_us <= 0 || initial_rto_us <= 0 ||
      delayed_ack_us <= 0) {
    throw std::invalid_argument("bad reliable transport timers");
  }
}

ReliableSender::ReliableSender(ReliableParams params) : params_(params) {
  params_.Validate();
}

void ReliableSender::Offer(int64_t payload_bytes) {
  app_buffer_.push_back(payload_bytes);
}

TimeUs ReliableSender::rto_us() const {
  if (!srtt_us_) return params_.initial_rto_us;
  return std::max(params_.min_rto_us,
                  static_cast<TimeUs>(std::ceil(params_.rto_multiplier *
                                                *srtt_us_)));
}

std::optional<Segment> ReliableSender::NextToSend(
    TimeUs now_us, bool unlimited_data, int64_t payload_bytes_if_unlimited) {
  for (auto& [seq, entry] : unacked_) {
    if (entry.needs_resend) {
      entry.needs_resend = false;
      entry.resent = true;
      entry.sent_us = now_us;
      ++retransmissions_;
      return Segment{seq, entry.payload_bytes, true};
    }
  }
  if (static_cast<int>(unacked_.size()) >= params_.window) return std::nullopt;
  int64_t payload = 0;
  if (!app_buffer_.empty()) {
    payload = app_buffer_.front();
    app_buffer_.pop_front();
  } else if (unlimited_data) {
    payload = payload_bytes_if_unlimited;
  } else {
    return std::nullopt;
  }
  const uint64_t seq = next_seq_++;
  unacked_.emplace(seq, Unacked{payload, now_us});
  return Segment{seq, payload, false};
}

void ReliableSender::OnAck(std::span<const uint64_t> seqs, TimeUs now_us) {
  for (uint64_t seq : seqs) {
    auto it = unacked_.find(seq);
    if (it == unacked_.end()) continue;
    // Delay samples from retransmitted segments are ambiguous; skip them.
    if (!it->second.resent) {
      const double sample = static_cast<double>(now_us - it->second.sent_us);
      srtt_us_ = srtt_us_ ? 0.875 * *srtt_us_ + 0.125 * sample : sample;
    }
    unacked_.erase(it);
  }
}

int ReliableSender::ExpireTimeouts(TimeUs now_us) {
  const TimeUs rto = rto_us();
  int expired = 0;
  for (auto& [seq, entry] : unacked_) {
    if (!entry.needs_resend && now_us - entry.sent_us >= rto) {
      entry.needs_resend = true;
      ++expired;
    }
  }
  return expired;
}

std::optional<TimeUs> ReliableSender::NextDeadline() const {
  std::optional<TimeUs> earliest;
  const TimeUs rto = rto_us();
  for (const auto& [seq, entry] : unacked_) {
    if (entry.needs_resend) continue;
    const TimeUs deadline = entry.sent_us + rto;
    if (!earliest || deadline < *earliest) earliest = deadline;
  }
  return earliest;
}

ReliableReceiver::ReliableReceiver(ReliableParams params) : params_(params) {
  params_.Validate();
}

bool ReliableReceiver::OnData(uint64_t seq, TimeUs now_us) {
  const bool fresh = delivered_.insert(seq).second;
  pending_.push_back(seq);
  if (!pending_since_) pending_since_ = now_us;
  return fresh;
}

std::optional<std::vector<uint64_t>> ReliableReceiver::TakeAckIfDue() {
  if (static_cast<int>(pending_.size()) < params_.ack_every) {
    return std::nullopt;
  }
  return TakePendingAck();
}

std::optional<std::vector<uint64_t>> ReliableReceiver::TakePendingAck() {
  if (pending_.empty()) return std::nullopt;
  std::vector<uint64_t> ack;
  ack.swap(pending_);
  pending_since_.reset();
  return ack;
}

}  // namespace airtime
