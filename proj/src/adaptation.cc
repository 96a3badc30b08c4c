#include "airtime/adaptation.h"

#include <algorithm>
#include <stdexcept>

namespace airtime {

AdaptationParams AdaptationParams::ForWindow(TimeUs meas_time_us) {
  AdaptationParams params;
  params.idle_min_threshold_us = meas_time_us / 20;
  return params;
}

void AdaptationParams::Validate() const {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho in (0, 1]");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (idle_min_threshold_us < 0 || min_rate_diff_threshold_bps < 0.0 ||
      packet_proc_delay_us < 0) {
    throw std::invalid_argument("thresholds must be >= 0");
  }
  if (!(app_overhead_factor >= 1.0)) {
    throw std::invalid_argument("app overhead factor must be >= 1");
  }
  if (!(min_source_rate_bps > 0.0 &&
        min_source_rate_bps <= max_source_rate_bps)) {
    throw std::invalid_argument("need 0 < min source rate <= max source rate");
  }
}

std::string_view ToString(AdaptationBranch branch) {
  switch (branch) {
    case AdaptationBranch::kIncrease:
      return "increase";
    case AdaptationBranch::kDecrease:
      return "decrease";
    case AdaptationBranch::kHold:
      return "hold";
  }
  return "?";
}

std::pair<double, double> DelayJitter(int64_t queue_depth_bits,
                                      double tx_rate_bps,
                                      double previous_delay_us) {
  if (tx_rate_bps < 0.0) throw std::invalid_argument("negative tx rate");
  double delay_us = 0.0;
  if (queue_depth_bits > 0) {
    delay_us = tx_rate_bps > 0.0
                   ? static_cast<double>(queue_depth_bits) * 1e6 / tx_rate_bps
                   : kSaturatedDelayUs;
  }
  return {delay_us, delay_us - previous_delay_us};
}

std::pair<AdaptationOutput, AdaptationState> Step(
    const WindowStats& stats, const AdaptationParams& params,
    const AdaptationState& state) {
  if (stats.meas_time_us <= 0) {
    throw std::invalid_argument("measurement time must be positive");
  }
  const double meas_s = static_cast<double>(stats.meas_time_us) / 1e6;
  const double tx_bits = static_cast<double>(stats.tx_bits);

  AdaptationOutput out;
  out.tx_rate_bps = tx_bits / meas_s;
  double delta_bits = 0.0;
  if (stats.ledger.idle_us > params.idle_min_threshold_us) {
    out.branch = AdaptationBranch::kIncrease;
    const TimeUs spent = stats.ledger.tx_us + stats.ledger.backoff_us +
                         params.packet_proc_delay_us;
    if (spent > 0) {
      delta_bits = params.rho * tx_bits *
                   (static_cast<double>(stats.ledger.idle_us) /
                    static_cast<double>(spent));
    }
  } else if (out.tx_rate_bps > 0.0) {
    const double diff = state.tx_rate_previous_bps - out.tx_rate_bps;
    if (diff > params.min_rate_diff_threshold_bps) {
      out.branch = AdaptationBranch::kDecrease;
      delta_bits = -params.beta * meas_s * diff;
    }
  }
  out.delta_tx_bits = delta_bits;
  out.avail_tx_rate_bps = std::max(0.0, out.tx_rate_bps + delta_bits / meas_s);

  AdaptationState next;
  next.tx_rate_previous_bps = out.tx_rate_bps;
  const auto [delay_us, jitter_us] = DelayJitter(
      stats.tx_queue_depth_bits, out.tx_rate_bps, state.tx_delay_previous_us);
  out.tx_delay_us = delay_us;
  out.tx_jitter_us = jitter_us;
  next.tx_delay_previous_us = delay_us;
  return {out, next};
}

double ApplyToSource(const AdaptationOutput& output,
                     const AdaptationParams& params) {
  const double rate = output.avail_tx_rate_bps / params.app_overhead_factor;
  return std::clamp(rate, params.min_source_rate_bps,
                    params.max_source_rate_bps);
}

}  // namespace airtime
