#include "airtime/estimators.h"

#include <stdexcept>

namespace airtime {

std::string_view ToString(Method method) {
  return method == Method::kSp ? "sp" : "ss";
}

void SpParams::Validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in (0, 1]");
}

void SsParams::Validate() const {
  if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("f must be in (0, 1]");
}

// The arithmetic below mirrors the scalar column kernels operation for
// operation so both routes produce identical doubles.
std::optional<double> SpEstimate(const WindowStats& stats,
                                 const SpParams& params) {
  params.Validate();
  if (stats.meas_time_us <= 0) {
    throw std::invalid_argument("measurement time must be positive");
  }
  const TimeUs busy_us = stats.ledger.tx_us + stats.ledger.backoff_us;
  if (busy_us <= 0) return std::nullopt;
  const double idle_fraction = static_cast<double>(stats.ledger.idle_us) /
                               static_cast<double>(stats.meas_time_us);
  const double busy_rate = static_cast<double>(stats.tx_bits) * 1e6 /
                           static_cast<double>(busy_us);
  return idle_fraction * busy_rate * params.p;
}

std::optional<double> SsEstimate(TimeUs idle_us, TimeUs meas_time_us,
                                 std::span<const LinkQuality> links,
                                 const SsParams& params) {
  params.Validate();
  if (meas_time_us <= 0) {
    throw std::invalid_argument("measurement time must be positive");
  }
  if (links.empty()) throw std::invalid_argument("SS needs at least one link");
  double cost = 0.0;
  for (const LinkQuality& link : links) {
    if (!link.retry_rate) return std::nullopt;
    if (!(link.avg_phy_rate_bps > 0.0)) {
      throw std::invalid_argument("link phy rate must be positive");
    }
    if (*link.retry_rate < 1.0) {
      throw std::invalid_argument("retry rate below 1");
    }
    cost = cost + *link.retry_rate / link.avg_phy_rate_bps;
  }
  // A single link's capacity is q / r, so r == 1 gives back q exactly.
  const double capacity_bps =
      links.size() == 1 ? links.front().avg_phy_rate_bps / *links.front().retry_rate
                        : 1.0 / cost;
  const double idle_fraction =
      static_cast<double>(idle_us) / static_cast<double>(meas_time_us);
  return idle_fraction * capacity_bps * params.f;
}

BandwidthEstimate TotalEstimate(const WindowStats& stats,
                                double additional_bps, Method method) {
  if (!(additional_bps >= 0.0)) {
    throw std::invalid_argument("additional bandwidth must be >= 0");
  }
  BandwidthEstimate estimate;
  estimate.additional_bps = additional_bps;
  estimate.measured_bps = Throughput(stats);
  estimate.total_bps = estimate.measured_bps + additional_bps;
  estimate.method = method;
  estimate.window_index = stats.window_index;
  return estimate;
}

double DefaultSpFactor(int contending_hops) {
  if (contending_hops < 1) {
    throw std::invalid_argument("need at least one wireless hop");
  }
  return 0.8 / contending_hops;
}

}  // namespace airtime
