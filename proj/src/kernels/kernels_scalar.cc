#include <cmath>
#include <limits>

#include "airtime/kernels.h"

namespace airtime::kernels {
namespace {

void SpAdditionalScalar(const double* idle_us, const double* meas_us,
                        const double* tx_bits, const double* busy_us, double p,
                        double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    if (!(busy_us[i] > 0.0)) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double idle_fraction = idle_us[i] / meas_us[i];
    const double busy_rate = tx_bits[i] * 1e6 / busy_us[i];
    out[i] = idle_fraction * busy_rate * p;
  }
}

void AccumulateLinkCostScalar(const double* retry, const double* rate_bps,
                              double* cost, int64_t n) {
  for (int64_t i = 0; i < n; ++i) cost[i] = cost[i] + retry[i] / rate_bps[i];
}

void SsAdditionalScalar(const double* idle_us, const double* meas_us,
                        const double* capacity_bps, double f, double* out,
                        int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    const double idle_fraction = idle_us[i] / meas_us[i];
    out[i] = idle_fraction * capacity_bps[i] * f;
  }
}

void AddScalar(const double* a, const double* b, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void DivideScalar(const double* a, const double* b, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}

BandCount CountInBandScalar(const double* totals, double capacity,
                            double band, int64_t n) {
  BandCount count;
  const double limit = band * capacity;
  for (int64_t i = 0; i < n; ++i) {
    if (std::isnan(totals[i])) continue;
    ++count.counted;
    if (std::fabs(totals[i] - capacity) <= limit) ++count.in_band;
  }
  return count;
}

int64_t FindConservationViolationScalar(const int64_t* tx,
                                        const int64_t* backoff,
                                        const int64_t* other,
                                        const int64_t* idle,
                                        const int64_t* window_us, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    if (tx[i] + backoff[i] + other[i] + idle[i] != window_us[i]) return i;
  }
  return -1;
}

}  // namespace

const KernelTable& ScalarKernels() {
  static const KernelTable table{
      Isa::kScalar,          SpAdditionalScalar,
      AccumulateLinkCostScalar, SsAdditionalScalar,
      AddScalar,             DivideScalar,
      CountInBandScalar,
      FindConservationViolationScalar,
  };
  return table;
}

}  // namespace airtime::kernels
