// Windowed ARQ standing in for a reliable transport. At most |window|
// datagrams are unacknowledged; the receiver returns one ACK datagram per
// |ack_every| data datagrams (or after |delayed_ack_us|); a datagram not
// acknowledged within rto_multiplier x the smoothed delivery delay is sent
// again. There is no congestion control.

#ifndef AIRTIME_TRANSPORT_H_
#define AIRTIME_TRANSPORT_H_

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "airtime/sim_engine.h"

namespace airtime {

struct ReliableParams {
  int window = 32;
  int ack_every = 2;
  int64_t ack_payload_bytes = 64;
  double rto_multiplier = 4.0;
  TimeUs initial_rto_us = 200 * kMicrosPerMilli;
  TimeUs min_rto_us = 10 * kMicrosPerMilli;
  TimeUs delayed_ack_us = 20 * kMicrosPerMilli;

  void Validate() const;
};

struct Segment {
  uint64_t seq = 0;
  int64_t payload_bytes = 0;
  bool retransmission = false;
};

class ReliableSender {
 public:
  explicit ReliableSender(ReliableParams params);

  // Hands one application datagram to the transport.
  void Offer(int64_t payload_bytes);
  // Next segment allowed out now (retransmissions first), or nullopt when
  // the window is full or nothing is pending. |unlimited_data| makes the
  // application buffer bottomless (saturating source).
  std::optional<Segment> NextToSend(TimeUs now_us, bool unlimited_data,
                                    int64_t payload_bytes_if_unlimited);
  // Cumulative-free selective ACK of the listed sequence numbers.
  void OnAck(std::span<const uint64_t> seqs, TimeUs now_us);
  // Marks timed-out segments for retransmission; returns how many.
  int ExpireTimeouts(TimeUs now_us);
  // Earliest retransmission deadline among unacknowledged segments.
  std::optional<TimeUs> NextDeadline() const;

  int in_flight() const { return static_cast<int>(unacked_.size()); }
  size_t buffered() const { return app_buffer_.size(); }
  TimeUs rto_us() const;
  uint64_t retransmissions() const { return retransmissions_; }
  std::optional<double> smoothed_delay_us() const { return srtt_us_; }

 private:
  struct Unacked {
    int64_t payload_bytes;
    TimeUs sent_us;
    bool needs_resend = false;
    bool resent = false;
  };

  ReliableParams params_;
  std::deque<int64_t> app_buffer_;
  std::map<uint64_t, Unacked> unacked_;
  uint64_t next_seq_ = 0;
  std::optional<double> srtt_us_;
  uint64_t retransmissions_ = 0;
};

class ReliableReceiver {
 public:
  explicit ReliableReceiver(ReliableParams params);

  // Returns true if |seq| was new.
  bool OnData(uint64_t seq, TimeUs now_us);
  // Sequence numbers to acknowledge now, if an ACK is due by count.
  std::optional<std::vector<uint64_t>> TakeAckIfDue();
  // Flushes whatever is pending (delayed-ACK timer).
  std::optional<std::vector<uint64_t>> TakePendingAck();
  std::optional<TimeUs> pending_since() const { return pending_since_; }

  uint64_t unique_received() const { return delivered_.size(); }

 private:
  ReliableParams params_;
  std::set<uint64_t> delivered_;
  std::vector<uint64_t> pending_;
  std::optional<TimeUs> pending_since_;
};

}  // namespace airtime

#endif  // AIRTIME_TRANSPORT_H_
