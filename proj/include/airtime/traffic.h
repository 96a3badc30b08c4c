// Application traffic sources standing in for trans-rated video streams.

#ifndef AIRTIME_TRAFFIC_H_
#define AIRTIME_TRAFFIC_H_

#include <cstdint>
#include <deque>
#include <string_view>

#include "airtime/sim_engine.h"

namespace airtime {

enum class Transport { kUnreliable, kReliableSimplified };
enum class ProfileKind { kCbr, kVbr, kSaturating };

std::string_view ToString(Transport transport);
std::string_view ToString(ProfileKind kind);

struct FlowSpec {
  // Seven 188-byte MPEG2-TS packets.
  static constexpr int64_t kDefaultPayloadBytes = 7 * 188;

  Transport transport = Transport::kUnreliable;
  ProfileKind profile = ProfileKind::kCbr;
  double rate_bps = 4'000'000.0;  // CBR rate or VBR mean
  double burstiness = 2.0;        // VBR peak / mean
  int64_t datagram_payload_bytes = kDefaultPayloadBytes;
  double duration_s = 30.0;

  void Validate() const;
};

struct Datagram {
  TimeUs emit_us = 0;
  int64_t payload_bytes = 0;
};

// Emission schedule of one flow.
//   cbr: evenly spaced datagrams at the current rate.
//   vbr: a video frame every 33 ms whose size is log-normal around the mean,
//        with sigma chosen so the 99th percentile is |burstiness| x mean;
//        each frame leaves as a burst of datagrams.
//   saturating: always ready; the caller pulls whenever it has room.
class TrafficSource {
 public:
  static constexpr TimeUs kVbrFrameIntervalUs = 33'000;

  TrafficSource(const FlowSpec& spec, uint64_t seed, std::string_view name,
                TimeUs start_us = 0);

  // The next datagram; for saturating flows its time is |now_us|.
  Datagram Peek(TimeUs now_us);
  void Pop(TimeUs now_us);
  // Rate override from the adaptation loop. The next CBR datagram moves to
  // max(now, last emission + new gap).
  void SetRate(double rate_bps, TimeUs now_us);

  double rate_bps() const { return rate_bps_; }
  bool saturating() const { return spec_.profile == ProfileKind::kSaturating; }
  int64_t emitted() const { return emitted_; }

  static double VbrSigma(double burstiness);

 private:
  void FillVbrBurst();

  FlowSpec spec_;
  RngStream rng_;
  double rate_bps_;
  // CBR: datagram k of the current rate leaves at origin + k * gap.
  TimeUs origin_us_;
  int64_t since_origin_ = 0;
  TimeUs last_emit_us_ = -1;
  // VBR.
  TimeUs next_frame_us_;
  double carry_bytes_ = 0.0;
  std::deque<Datagram> burst_;
  int64_t emitted_ = 0;
};

}  // namespace airtime

#endif  // AIRTIME_TRAFFIC_H_
