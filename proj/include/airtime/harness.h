// Experiment runner: capacity probe, fixed-rate or adaptive cells, per-window
// SP/SS estimates and controller outputs, and summary statistics.

#ifndef AIRTIME_HARNESS_H_
#define AIRTIME_HARNESS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airtime/adaptation.h"
#include "airtime/estimators.h"
#include "airtime/network.h"

namespace airtime {

enum class RunMode { kFixed, kAdaptive };
enum class MethodSelection { kSp, kSs, kBoth };

std::string_view ToString(RunMode mode);
std::string_view ToString(MethodSelection selection);
RunMode ParseRunMode(std::string_view text);
MethodSelection ParseMethodSelection(std::string_view text);
std::vector<Method> MethodsOf(MethodSelection selection);

struct ExperimentConfig {
  std::string scenario;  // normalized topology spec, used as the label
  NetworkConfig network;
  RunMode mode = RunMode::kFixed;
  // Fixed mode: one cell per rate. Adaptive mode: the first entry is the
  // starting rate (1 Mbps when empty).
  std::vector<double> rates_bps;
  MethodSelection methods = MethodSelection::kBoth;
  std::optional<double> sp_p;  // default: 0.8 / contending wireless hops
  std::optional<double> ss_f;  // default: calibrated to the phy rate
  std::optional<AdaptationParams> adaptation;  // default: ForWindow(M)
  double duration_s = 30.0;
  double capacity_duration_s = 30.0;
  std::optional<double> capacity_bps;  // skips the probe when set
  int warmup_windows = 5;
  double band = 0.2;
  int threads = 1;

  // Throws std::invalid_argument.
  void Validate() const;
  int64_t window_count() const;
  double EffectiveP() const;
  double EffectiveF() const;
  AdaptationParams EffectiveAdaptation() const;
};

// f for a path whose slowest link runs at |phy_rate_bps|: 24/54 at 54 Mbps,
// scaled elsewhere by the ratio of single-station saturated MAC efficiency.
double CalibratedSsFactor(int64_t phy_rate_bps, const MacTimingParams& mac,
                          int64_t msdu_bytes);

// One per-window row; absent estimates are NaN.
struct WindowRow {
  int64_t window_index = 0;
  TimeUs t_start_us = 0;
  int64_t tx_bits = 0;
  TimeUs tx_us = 0;
  TimeUs backoff_us = 0;
  TimeUs other_us = 0;
  TimeUs idle_us = 0;
  int64_t attempts = 0;
  int64_t intended = 0;
  int64_t queue_bits = 0;
  double measured_bps = 0.0;
  double sp_add_bps = 0.0;
  double ss_add_bps = 0.0;
  double total_sp_bps = 0.0;
  double total_ss_bps = 0.0;
  double avail_tx_rate_bps = 0.0;
  double tx_delay_us = 0.0;
  double tx_jitter_us = 0.0;
};

struct SummaryRow {
  std::string scenario;
  std::string rate;  // bits/s, or "adaptive"
  Method method = Method::kSp;
  uint64_t seed = 0;
  double capacity_bps = 0.0;
  int64_t windows = 0;  // rows after warm-up
  double mean_measured_bps = 0.0;
  double mean_additional_bps = 0.0;  // NaN when no window had an estimate
  double mean_total_bps = 0.0;
  double in_band_fraction = 0.0;  // NaN when no window carried traffic
};

struct CellReport {
  std::string name;  // output subdirectory
  std::string rate;
  std::vector<WindowRow> rows;
  std::vector<double> source_rate_bps;  // media rate during each window
  std::vector<AdaptationBranch> branches;
  std::vector<SummaryRow> summary;
  int64_t sink_payload_bits = 0;
};

struct RunReport {
  std::string scenario;
  uint64_t seed = 0;
  double capacity_bps = 0.0;
  std::vector<CellReport> cells;
};

RunReport Run(const ExperimentConfig& config);

// Fraction of totals within band * capacity of capacity; NaN totals are not
// counted. nullopt when nothing is counted.
std::optional<double> InBandFraction(std::span<const double> totals,
                                     double capacity_bps, double band);
// Per-method fraction over rows with traffic (tx_bits > 0).
std::optional<double> InBandFraction(std::span<const WindowRow> rows,
                                     Method method, double capacity_bps,
                                     double band);

// Summary statistics over rows[warmup:].
SummaryRow Summarize(std::span<const WindowRow> rows, Method method,
                     int warmup_windows, double capacity_bps, double band);

struct ComparisonRow {
  std::string rate;
  Method method = Method::kSp;
  SummaryRow left;
  SummaryRow right;
};

// Side by side per (rate, method). Throws std::invalid_argument when the two
// sides come from different scenarios or seeds, or their keys differ.
std::vector<ComparisonRow> CompareMethods(std::span<const SummaryRow> left,
                                          std::span<const SummaryRow> right);

}  // namespace airtime

#endif  // AIRTIME_HARNESS_H_
