// NEON (AArch64 Advanced SIMD) variants, two doubles per vector.

#include "airtime/kernels.h"

#if defined(__aarch64__)
#include <arm_neon.h>

#include <limits>

namespace airtime::kernels {
namespace {

constexpr int64_t kLanes = 2;

void SpAdditionalNeon(const double* idle_us, const double* meas_us,
                      const double* tx_bits, const double* busy_us, double p,
                      double* out, int64_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t nan = vdupq_n_f64(std::numeric_limits<double>::quiet_NaN());
  const float64x2_t mega = vdupq_n_f64(1e6);
  const float64x2_t vp = vdupq_n_f64(p);
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t busy = vld1q_f64(busy_us + i);
    const float64x2_t idle_fraction =
        vdivq_f64(vld1q_f64(idle_us + i), vld1q_f64(meas_us + i));
    const float64x2_t busy_rate =
        vdivq_f64(vmulq_f64(vld1q_f64(tx_bits + i), mega), busy);
    const float64x2_t value =
        vmulq_f64(vmulq_f64(idle_fraction, busy_rate), vp);
    const uint64x2_t valid = vcgtq_f64(busy, zero);
    vst1q_f64(out + i, vbslq_f64(valid, value, nan));
  }
  ScalarKernels().sp_additional(idle_us + i, meas_us + i, tx_bits + i,
                                busy_us + i, p, out + i, n - i);
}

void AccumulateLinkCostNeon(const double* retry, const double* rate_bps,
                            double* cost, int64_t n) {
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t term =
        vdivq_f64(vld1q_f64(retry + i), vld1q_f64(rate_bps + i));
    vst1q_f64(cost + i, vaddq_f64(vld1q_f64(cost + i), term));
  }
  ScalarKernels().accumulate_link_cost(retry + i, rate_bps + i, cost + i,
                                       n - i);
}

void SsAdditionalNeon(const double* idle_us, const double* meas_us,
                      const double* capacity_bps, double f, double* out,
                      int64_t n) {
  const float64x2_t vf = vdupq_n_f64(f);
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t idle_fraction =
        vdivq_f64(vld1q_f64(idle_us + i), vld1q_f64(meas_us + i));
    vst1q_f64(out + i,
              vmulq_f64(vmulq_f64(idle_fraction, vld1q_f64(capacity_bps + i)),
                        vf));
  }
  ScalarKernels().ss_additional(idle_us + i, meas_us + i, capacity_bps + i, f,
                                out + i, n - i);
}

void DivideNeon(const double* a, const double* b, double* out, int64_t n) {
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f64(out + i, vdivq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  ScalarKernels().divide(a + i, b + i, out + i, n - i);
}

void AddNeon(const double* a, const double* b, double* out, int64_t n) {
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  ScalarKernels().add(a + i, b + i, out + i, n - i);
}

BandCount CountInBandNeon(const double* totals, double capacity, double band,
                          int64_t n) {
  const float64x2_t cap = vdupq_n_f64(capacity);
  const float64x2_t limit = vdupq_n_f64(band * capacity);
  BandCount count;
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t t = vld1q_f64(totals + i);
    const float64x2_t dev = vabsq_f64(vsubq_f64(t, cap));
    // Masks are all-ones per true lane; shifting down leaves 0 or 1.
    const uint64x2_t ordered = vshrq_n_u64(vceqq_f64(t, t), 63);
    const uint64x2_t inside = vshrq_n_u64(vcleq_f64(dev, limit), 63);
    count.counted += static_cast<int64_t>(vaddvq_u64(ordered));
    count.in_band += static_cast<int64_t>(vaddvq_u64(inside));
  }
  const BandCount tail =
      ScalarKernels().count_in_band(totals + i, capacity, band, n - i);
  count.counted += tail.counted;
  count.in_band += tail.in_band;
  return count;
}

int64_t FindConservationViolationNeon(const int64_t* tx, const int64_t* backoff,
                                      const int64_t* other, const int64_t* idle,
                                      const int64_t* window_us, int64_t n) {
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const int64x2_t sum =
        vaddq_s64(vaddq_s64(vld1q_s64(tx + i), vld1q_s64(backoff + i)),
                  vaddq_s64(vld1q_s64(other + i), vld1q_s64(idle + i)));
    const uint64x2_t equal = vceqq_s64(sum, vld1q_s64(window_us + i));
    if (vgetq_lane_u64(equal, 0) == 0) return i;
    if (vgetq_lane_u64(equal, 1) == 0) return i + 1;
  }
  const int64_t tail = ScalarKernels().find_conservation_violation(
      tx + i, backoff + i, other + i, idle + i, window_us + i, n - i);
  return tail < 0 ? -1 : i + tail;
}

}  // namespace

const KernelTable* NeonKernels() {
  static const KernelTable table{
      Isa::kNeon,       SpAdditionalNeon, AccumulateLinkCostNeon,
      SsAdditionalNeon, AddNeon,          DivideNeon,
      CountInBandNeon,
      FindConservationViolationNeon,
  };
  return &table;
}

}  // namespace airtime::kernels

#else

namespace airtime::kernels {
const KernelTable* NeonKernels() { return nullptr; }
}  // namespace airtime::kernels

#endif
