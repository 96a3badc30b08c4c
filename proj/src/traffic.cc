#include "airtime/traffic.h"

#include <cmath>
#include <stdexcept>

namespace airtime {

std::string_view ToString(Transport transport) {
  return transport == Transport::kUnreliable ? "unreliable"
                                             : "reliable_simplified";
}

std::string_view ToString(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::kCbr:
      return "cbr";
    case ProfileKind::kVbr:
      return "vbr";
    case ProfileKind::kSaturating:
      return "saturating";
  }
  return "?";
}

void FlowSpec::Validate() const {
  if (profile != ProfileKind::kSaturating && !(rate_bps > 0.0)) {
    throw std::invalid_argument("flow rate must be > 0");
  }
  if (!(duration_s > 0.0)) throw std::invalid_argument("duration must be > 0");
  if (datagram_payload_bytes <= 0) {
    throw std::invalid_argument("datagram payload must be > 0");
  }
  if (profile == ProfileKind::kVbr && !(burstiness >= 1.0)) {
    throw std::invalid_argument("burstiness must be >= 1");
  }
}

double TrafficSource::VbrSigma(double burstiness) {
  // Solve exp(sigma * z99 - sigma^2 / 2) = burstiness for the smaller root.
  constexpr double kZ99 = 2.3263478740408408;
  if (burstiness <= 1.0) return 0.0;
  const double discriminant = kZ99 * kZ99 - 2.0 * std::log(burstiness);
  if (discriminant <= 0.0) return kZ99;
  return kZ99 - std::sqrt(discriminant);
}

TrafficSource::TrafficSource(const FlowSpec& spec, uint64_t seed,
                             std::string_view name, TimeUs start_us)
    : spec_(spec),
      rng_(seed, name),
      rate_bps_(spec.rate_bps),
      origin_us_(start_us),
      next_frame_us_(start_us) {
  spec_.Validate();
}

void TrafficSource::FillVbrBurst() {
  const double sigma = VbrSigma(spec_.burstiness);
  const double mean_bytes = rate_bps_ / 8.0 *
                            static_cast<double>(kVbrFrameIntervalUs) / 1e6;
  const double scale = std::exp(sigma * rng_.StandardNormal() -
                                sigma * sigma / 2.0);
  carry_bytes_ += mean_bytes * scale;
  const auto payload = static_cast<double>(spec_.datagram_payload_bytes);
  while (carry_bytes_ >= payload) {
    burst_.push_back({next_frame_us_, spec_.datagram_payload_bytes});
    carry_bytes_ -= payload;
  }
  next_frame_us_ += kVbrFrameIntervalUs;
}

Datagram TrafficSource::Peek(TimeUs now_us) {
  switch (spec_.profile) {
    case ProfileKind::kSaturating:
      return {now_us, spec_.datagram_payload_bytes};
    case ProfileKind::kCbr: {
      const double gap_us =
          static_cast<double>(spec_.datagram_payload_bytes) * 8e6 / rate_bps_;
      const auto offset = static_cast<TimeUs>(
          std::ceil(static_cast<double>(since_origin_) * gap_us));
      return {origin_us_ + offset, spec_.datagram_payload_bytes};
    }
    case ProfileKind::kVbr:
      while (burst_.empty()) FillVbrBurst();
      return burst_.front();
  }
  return {};
}

void TrafficSource::Pop(TimeUs now_us) {
  const Datagram d = Peek(now_us);
  last_emit_us_ = d.emit_us;
  ++emitted_;
  switch (spec_.profile) {
    case ProfileKind::kSaturating:
      break;
    case ProfileKind::kCbr:
      ++since_origin_;
      break;
    case ProfileKind::kVbr:
      burst_.pop_front();
      break;
  }
}

void TrafficSource::SetRate(double rate_bps, TimeUs now_us) {
  if (!(rate_bps > 0.0)) throw std::invalid_argument("rate must be > 0");
  if (spec_.profile == ProfileKind::kCbr) {
    if (last_emit_us_ < 0) {
      origin_us_ = std::max(origin_us_, now_us);
      since_origin_ = 0;
    } else {
      // Datagram 1 of the new schedule is one new gap after the last one.
      origin_us_ = last_emit_us_;
      since_origin_ = 1;
      rate_bps_ = rate_bps;
      if (Peek(now_us).emit_us < now_us) {
        origin_us_ = now_us;
        since_origin_ = 0;
      }
      return;
    }
  }
  rate_bps_ = rate_bps;
}

}  // namespace airtime
