// Incremental rate-adaptation controller.
//
// Once per measurement window the controller turns the source's ledger into
// four numbers for the application: the rate it actually achieved, the rate
// it may try next, the queueing delay, and the change of that delay. Rate
// increases are a fraction (rho) of what the idle time would carry at the
// current tx/backoff efficiency; decreases track an observed rate drop
// scaled by beta.

#ifndef AIRTIME_ADAPTATION_H_
#define AIRTIME_ADAPTATION_H_

#include <cstdint>
#include <string_view>
#include <utility>

#include "airtime/stats_ledger.h"

namespace airtime {

struct AdaptationParams {
  double rho = 0.8;
  double beta = 1.0;
  TimeUs idle_min_threshold_us = 10 * kMicrosPerMilli;
  double min_rate_diff_threshold_bps = 100'000.0;
  TimeUs packet_proc_delay_us = 0;
  // Bits on the wire per application bit. 1396/1316: seven 188-byte TS
  // packets per datagram plus 80 bytes of headers.
  double app_overhead_factor = 1396.0 / 1316.0;
  double min_source_rate_bps = 100'000.0;
  double max_source_rate_bps = 100'000'000.0;

  // Idle threshold at 5% of the window.
  static AdaptationParams ForWindow(TimeUs meas_time_us);
  void Validate() const;
};

struct AdaptationState {
  double tx_rate_previous_bps = 0.0;
  double tx_delay_previous_us = 0.0;
};

enum class AdaptationBranch { kIncrease, kDecrease, kHold };

std::string_view ToString(AdaptationBranch branch);

struct AdaptationOutput {
  double tx_rate_bps = 0.0;
  double avail_tx_rate_bps = 0.0;
  double tx_delay_us = 0.0;
  double tx_jitter_us = 0.0;
  AdaptationBranch branch = AdaptationBranch::kHold;
  double delta_tx_bits = 0.0;
};

// Reported delay when the queue holds data but nothing was sent.
inline constexpr double kSaturatedDelayUs = 2147483648.0;  // 2^31

std::pair<double, double> DelayJitter(int64_t queue_depth_bits,
                                      double tx_rate_bps,
                                      double previous_delay_us);

// One controller step. Throws std::invalid_argument if the window length is
// not positive.
std::pair<AdaptationOutput, AdaptationState> Step(
    const WindowStats& stats, const AdaptationParams& params,
    const AdaptationState& state);

// Application send rate for the next window:
// clamp(avail / app_overhead_factor, min_source_rate, max_source_rate).
double ApplyToSource(const AdaptationOutput& output,
                     const AdaptationParams& params);

}  // namespace airtime

#endif  // AIRTIME_ADAPTATION_H_
