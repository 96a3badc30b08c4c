// Available-bandwidth estimators driven by one window of channel statistics.
//
// Source predictor (SP) uses only the source's own first-hop ledger:
//   additional = (idle / M) * (TxBits / (Tx + Bo)) * p
// Source sniffer (SS) uses the retry rate r_i and phy rate q_i sniffed on
// every wireless link of the path:
//   additional = (idle / M) * (1 / sum(r_i / q_i)) * f
// Both return bits per second given bits and microseconds.

#ifndef AIRTIME_ESTIMATORS_H_
#define AIRTIME_ESTIMATORS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "airtime/stats_ledger.h"

namespace airtime {

enum class Method { kSp, kSs };

std::string_view ToString(Method method);

struct SpParams {
  // Opportunism factor in (0, 1]. 0.8 for one hop, 0.4 for two.
  double p = 0.8;
  void Validate() const;
};

struct SsParams {
  // MAC-efficiency factor in (0, 1]; 24/54 for a 54 Mbps link.
  double f = 24.0 / 54.0;
  void Validate() const;
};

struct BandwidthEstimate {
  double additional_bps = 0.0;
  double measured_bps = 0.0;
  double total_bps = 0.0;
  Method method = Method::kSp;
  int64_t window_index = 0;
};

// nullopt when the node neither transmitted nor backed off this window.
std::optional<double> SpEstimate(const WindowStats& stats,
                                 const SpParams& params);

// nullopt when any link lacks a retry rate this window. Throws
// std::invalid_argument for an empty link list, q <= 0, or r < 1.
std::optional<double> SsEstimate(TimeUs idle_us, TimeUs meas_time_us,
                                 std::span<const LinkQuality> links,
                                 const SsParams& params);

// Throws std::invalid_argument if |additional_bps| < 0.
BandwidthEstimate TotalEstimate(const WindowStats& stats,
                                double additional_bps, Method method);

// 0.8 / h for h contending wireless hops.
double DefaultSpFactor(int contending_hops);

}  // namespace airtime

#endif  // AIRTIME_ESTIMATORS_H_
