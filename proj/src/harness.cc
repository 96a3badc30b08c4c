#include "airtime/harness.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "airtime/kernels.h"

namespace airtime {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int64_t kReferencePhyRateBps = 54'000'000;

double MeanOfFinite(std::span<const double> values, int64_t* count) {
  double sum = 0.0;
  int64_t n = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  if (count) *count = n;
  return n == 0 ? kNaN : sum / static_cast<double>(n);
}

WindowRow RowFromStats(const WindowStats& stats) {
  WindowRow row;
  row.window_index = stats.window_index;
  row.t_start_us = stats.t_start_us;
  row.tx_bits = stats.tx_bits;
  row.tx_us = stats.ledger.tx_us;
  row.backoff_us = stats.ledger.backoff_us;
  row.other_us = stats.ledger.other_us;
  row.idle_us = stats.ledger.idle_us;
  row.attempts = stats.attempts;
  row.intended = stats.intended_packets;
  row.queue_bits = stats.tx_queue_depth_bits;
  row.measured_bps = Throughput(stats);
  return row;
}

// Fills the estimate columns of |rows| from the per-window link qualities.
void EstimateBatch(std::vector<WindowRow>& rows,
                   const std::vector<std::vector<LinkQuality>>& links,
                   MethodSelection methods, double p, double f) {
  const size_t n = rows.size();
  std::vector<double> idle(n), meas(n), bits(n), busy(n), measured(n);
  for (size_t i = 0; i < n; ++i) {
    idle[i] = static_cast<double>(rows[i].idle_us);
    meas[i] = static_cast<double>(rows[i].tx_us + rows[i].backoff_us +
                                  rows[i].other_us + rows[i].idle_us);
    bits[i] = static_cast<double>(rows[i].tx_bits);
    busy[i] = static_cast<double>(rows[i].tx_us + rows[i].backoff_us);
    measured[i] = rows[i].measured_bps;
  }
  std::vector<double> sp(n, kNaN), ss(n, kNaN);
  std::vector<double> total_sp(n, kNaN), total_ss(n, kNaN);
  if (methods != MethodSelection::kSs) {
    kernels::SpAdditional(idle, meas, bits, busy, p, sp);
    kernels::Add(measured, sp, total_sp);
  }
  if (methods != MethodSelection::kSp && n > 0) {
    const size_t link_count = links.front().size();
    std::vector<double> cost(n, 0.0), retry(n), rate(n), capacity(n);
    for (size_t k = 0; k < link_count; ++k) {
      for (size_t i = 0; i < n; ++i) {
        const LinkQuality& q = links[i].at(k);
        retry[i] = q.retry_rate.value_or(kNaN);
        rate[i] = q.avg_phy_rate_bps;
      }
      kernels::AccumulateLinkCost(retry, rate, cost);
    }
    if (link_count == 1) {
      kernels::Divide(rate, retry, capacity);
    } else {
      const std::vector<double> ones(n, 1.0);
      kernels::Divide(ones, cost, capacity);
    }
    kernels::SsAdditional(idle, meas, capacity, f, ss);
    kernels::Add(measured, ss, total_ss);
  }
  for (size_t i = 0; i < n; ++i) {
    rows[i].sp_add_bps = sp[i];
    rows[i].ss_add_bps = ss[i];
    rows[i].total_sp_bps = total_sp[i];
    rows[i].total_ss_bps = total_ss[i];
  }
}

CellReport RunCell(const ExperimentConfig& config, double rate_bps,
                   bool adaptive, double capacity_bps) {
  NetworkConfig network_config = config.network;
  network_config.media.rate_bps = rate_bps;
  network_config.media.duration_s = config.duration_s;
  Network network(std::move(network_config));
  const AdaptationParams params = config.EffectiveAdaptation();
  AdaptationState state;

  CellReport cell;
  cell.rate = adaptive ? "adaptive" : FormatNumber(rate_bps);
  cell.name = adaptive ? "adaptive" : "rate_" + cell.rate;
  const int64_t windows = config.window_count();
  std::vector<std::vector<LinkQuality>> links;
  links.reserve(windows);
  for (int64_t w = 0; w < windows; ++w) {
    const WindowSample sample = network.RunWindow();
    WindowRow row = RowFromStats(sample.observer);
    auto [output, next_state] = Step(sample.observer, params, state);
    state = next_state;
    row.avail_tx_rate_bps = output.avail_tx_rate_bps;
    row.tx_delay_us = output.tx_delay_us;
    row.tx_jitter_us = output.tx_jitter_us;
    cell.rows.push_back(row);
    cell.source_rate_bps.push_back(sample.media_rate_bps);
    cell.branches.push_back(output.branch);
    links.push_back(sample.observer.links);
    if (adaptive) network.SetMediaRate(ApplyToSource(output, params));
  }
  cell.sink_payload_bits = network.sink_payload_bits_total();

  EstimateBatch(cell.rows, links, config.methods, config.EffectiveP(),
                config.EffectiveF());
  for (Method method : MethodsOf(config.methods)) {
    SummaryRow summary = Summarize(cell.rows, method, config.warmup_windows,
                                   capacity_bps, config.band);
    summary.scenario = config.scenario;
    summary.rate = cell.rate;
    summary.seed = config.network.seed;
    cell.summary.push_back(std::move(summary));
  }
  return cell;
}

}  // namespace

std::string_view ToString(RunMode mode) {
  return mode == RunMode::kFixed ? "fixed" : "adaptive";
}

std::string_view ToString(MethodSelection selection) {
  switch (selection) {
    case MethodSelection::kSp:
      return "sp";
    case MethodSelection::kSs:
      return "ss";
    case MethodSelection::kBoth:
      return "both";
  }
  return "?";
}

RunMode ParseRunMode(std::string_view text) {
  if (text == "fixed") return RunMode::kFixed;
  if (text == "adaptive") return RunMode::kAdaptive;
  throw std::invalid_argument("mode must be fixed or adaptive");
}

MethodSelection ParseMethodSelection(std::string_view text) {
  if (text == "sp") return MethodSelection::kSp;
  if (text == "ss") return MethodSelection::kSs;
  if (text == "both") return MethodSelection::kBoth;
  throw std::invalid_argument("method must be sp, ss or both");
}

std::vector<Method> MethodsOf(MethodSelection selection) {
  switch (selection) {
    case MethodSelection::kSp:
      return {Method::kSp};
    case MethodSelection::kSs:
      return {Method::kSs};
    case MethodSelection::kBoth:
      return {Method::kSp, Method::kSs};
  }
  return {};
}

void ExperimentConfig::Validate() const {
  network.Validate();
  if (!(duration_s > 0.0) || !(capacity_duration_s > 0.0)) {
    throw std::invalid_argument("durations must be positive");
  }
  if (duration_s * 1e6 < 10.0 * static_cast<double>(network.window_us)) {
    throw std::invalid_argument(
        "duration must cover at least 10 measurement windows");
  }
  if (mode == RunMode::kFixed && rates_bps.empty()) {
    throw std::invalid_argument("fixed mode needs at least one rate");
  }
  for (double rate : rates_bps) {
    if (!(rate > 0.0)) throw std::invalid_argument("rates must be positive");
  }
  if (!(band > 0.0)) throw std::invalid_argument("band must be positive");
  if (warmup_windows < 0 || threads < 1) {
    throw std::invalid_argument("bad warm-up or thread count");
  }
  if (capacity_bps && !(*capacity_bps > 0.0)) {
    throw std::invalid_argument("capacity must be positive");
  }
  SpParams{EffectiveP()}.Validate();
  SsParams{EffectiveF()}.Validate();
  EffectiveAdaptation().Validate();
}

int64_t ExperimentConfig::window_count() const {
  return static_cast<int64_t>(std::llround(duration_s * 1e6)) /
         network.window_us;
}

double ExperimentConfig::EffectiveP() const {
  return sp_p.value_or(DefaultSpFactor(network.topology.ContendingHops()));
}

double ExperimentConfig::EffectiveF() const {
  if (ss_f) return *ss_f;
  int64_t slowest = network.wireless.phy_rate_bps;
  for (const auto& [index, segments] : network.schedules) {
    for (const LinkSegment& segment : segments) {
      slowest = std::min(slowest, segment.conditions.phy_rate_bps);
    }
  }
  return CalibratedSsFactor(
      slowest, network.mac,
      network.media.datagram_payload_bytes + network.header_overhead_bytes);
}

AdaptationParams ExperimentConfig::EffectiveAdaptation() const {
  return adaptation.value_or(AdaptationParams::ForWindow(network.window_us));
}

double CalibratedSsFactor(int64_t phy_rate_bps, const MacTimingParams& mac,
                          int64_t msdu_bytes) {
  constexpr double kReferenceFactor = 24.0 / 54.0;
  if (phy_rate_bps == kReferencePhyRateBps) return kReferenceFactor;
  auto efficiency = [&](int64_t rate) {
    const double cycle_us =
        static_cast<double>(ExchangeAirtime(msdu_bytes, rate, mac)) +
        static_cast<double>(mac.cw_min) / 2.0 *
            static_cast<double>(mac.slot_us);
    return static_cast<double>(msdu_bytes) * 8.0 / cycle_us /
           (static_cast<double>(rate) / 1e6);
  };
  return std::min(1.0, kReferenceFactor * efficiency(phy_rate_bps) /
                           efficiency(kReferencePhyRateBps));
}

std::optional<double> InBandFraction(std::span<const double> totals,
                                     double capacity_bps, double band) {
  if (!(band > 0.0)) throw std::invalid_argument("band must be positive");
  const kernels::BandCount count =
      kernels::CountInBand(totals, capacity_bps, band);
  if (count.counted == 0) return std::nullopt;
  return static_cast<double>(count.in_band) /
         static_cast<double>(count.counted);
}

std::optional<double> InBandFraction(std::span<const WindowRow> rows,
                                     Method method, double capacity_bps,
                                     double band) {
  std::vector<double> totals;
  totals.reserve(rows.size());
  for (const WindowRow& row : rows) {
    // Windows without traffic say nothing about tracking.
    if (row.tx_bits == 0) continue;
    totals.push_back(method == Method::kSp ? row.total_sp_bps
                                           : row.total_ss_bps);
  }
  return InBandFraction(totals, capacity_bps, band);
}

SummaryRow Summarize(std::span<const WindowRow> rows, Method method,
                     int warmup_windows, double capacity_bps, double band) {
  const size_t skip =
      std::min(rows.size(), static_cast<size_t>(std::max(0, warmup_windows)));
  const std::span<const WindowRow> kept = rows.subspan(skip);
  std::vector<double> measured, additional, total;
  for (const WindowRow& row : kept) {
    measured.push_back(row.measured_bps);
    additional.push_back(method == Method::kSp ? row.sp_add_bps
                                               : row.ss_add_bps);
    total.push_back(method == Method::kSp ? row.total_sp_bps
                                          : row.total_ss_bps);
  }
  SummaryRow summary;
  summary.method = method;
  summary.capacity_bps = capacity_bps;
  summary.windows = static_cast<int64_t>(kept.size());
  summary.mean_measured_bps = MeanOfFinite(measured, nullptr);
  summary.mean_additional_bps = MeanOfFinite(additional, nullptr);
  summary.mean_total_bps = MeanOfFinite(total, nullptr);
  summary.in_band_fraction =
      InBandFraction(kept, method, capacity_bps, band).value_or(kNaN);
  return summary;
}

RunReport Run(const ExperimentConfig& config) {
  config.Validate();
  RunReport report;
  report.scenario = config.scenario;
  report.seed = config.network.seed;
  report.capacity_bps = config.capacity_bps.value_or(0.0);
  if (!config.capacity_bps) {
    report.capacity_bps = MeasureCapacity(
        config.network,
        static_cast<TimeUs>(std::llround(config.capacity_duration_s * 1e6)));
  }

  std::vector<std::pair<double, bool>> cells;
  if (config.mode == RunMode::kFixed) {
    for (double rate : config.rates_bps) cells.emplace_back(rate, false);
  } else {
    cells.emplace_back(
        config.rates_bps.empty() ? 1'000'000.0 : config.rates_bps.front(),
        true);
  }
  report.cells.resize(cells.size());
  // Cells share nothing; results land in fixed slots so order is stable.
  const size_t workers =
      std::min(cells.size(), static_cast<size_t>(config.threads));
  if (workers <= 1) {
    for (size_t i = 0; i < cells.size(); ++i) {
      report.cells[i] = RunCell(config, cells[i].first, cells[i].second,
                                report.capacity_bps);
    }
    return report;
  }
  std::vector<std::exception_ptr> errors(cells.size());
  std::vector<std::thread> pool;
  for (size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (size_t i = t; i < cells.size(); i += workers) {
        try {
          report.cells[i] = RunCell(config, cells[i].first, cells[i].second,
                                    report.capacity_bps);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& thread : pool) thread.join();
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return report;
}

std::vector<ComparisonRow> CompareMethods(std::span<const SummaryRow> left,
                                          std::span<const SummaryRow> right) {
  using Key = std::tuple<std::string, int>;
  auto index = [](std::span<const SummaryRow> rows) {
    std::map<Key, const SummaryRow*> out;
    for (const SummaryRow& row : rows) {
      out[{row.rate, static_cast<int>(row.method)}] = &row;
    }
    return out;
  };
  if (left.empty() || right.empty()) {
    throw std::invalid_argument("nothing to compare");
  }
  for (const SummaryRow& row : right) {
    if (row.scenario != left.front().scenario ||
        row.seed != left.front().seed) {
      throw std::invalid_argument("reports come from different scenarios");
    }
  }
  for (const SummaryRow& row : left) {
    if (row.scenario != left.front().scenario ||
        row.seed != left.front().seed) {
      throw std::invalid_argument("report mixes scenarios");
    }
  }
  const auto b = index(right);
  std::vector<ComparisonRow> out;
  for (const SummaryRow& row : left) {
    auto it = b.find({row.rate, static_cast<int>(row.method)});
    if (it == b.end()) continue;
    out.push_back({row.rate, row.method, row, *it->second});
  }
  if (out.empty()) {
    throw std::invalid_argument("reports share no (rate, method) cells");
  }
  return out;
}

}  // namespace airtime
