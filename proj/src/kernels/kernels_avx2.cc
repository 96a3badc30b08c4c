// AVX2 variants, compiled with per-function target attributes so the rest
// of the library stays baseline x86-64. Tails fall back to the scalar table.

#include "airtime/kernels.h"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <bit>
#include <cmath>
#include <limits>

#define AIRTIME_AVX2 __attribute__((target("avx2")))

namespace airtime::kernels {
namespace {

constexpr int64_t kLanes = 4;

AIRTIME_AVX2 void SpAdditionalAvx2(const double* idle_us,
                                   const double* meas_us,
                                   const double* tx_bits,
                                   const double* busy_us, double p,
                                   double* out, int64_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d nan = _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN());
  const __m256d mega = _mm256_set1_pd(1e6);
  const __m256d vp = _mm256_set1_pd(p);
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d busy = _mm256_loadu_pd(busy_us + i);
    const __m256d idle_fraction =
        _mm256_div_pd(_mm256_loadu_pd(idle_us + i), _mm256_loadu_pd(meas_us + i));
    const __m256d busy_rate = _mm256_div_pd(
        _mm256_mul_pd(_mm256_loadu_pd(tx_bits + i), mega), busy);
    const __m256d value =
        _mm256_mul_pd(_mm256_mul_pd(idle_fraction, busy_rate), vp);
    const __m256d valid = _mm256_cmp_pd(busy, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(nan, value, valid));
  }
  ScalarKernels().sp_additional(idle_us + i, meas_us + i, tx_bits + i,
                                busy_us + i, p, out + i, n - i);
}

AIRTIME_AVX2 void AccumulateLinkCostAvx2(const double* retry,
                                         const double* rate_bps, double* cost,
                                         int64_t n) {
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d term =
        _mm256_div_pd(_mm256_loadu_pd(retry + i), _mm256_loadu_pd(rate_bps + i));
    _mm256_storeu_pd(cost + i, _mm256_add_pd(_mm256_loadu_pd(cost + i), term));
  }
  ScalarKernels().accumulate_link_cost(retry + i, rate_bps + i, cost + i,
                                       n - i);
}

AIRTIME_AVX2 void SsAdditionalAvx2(const double* idle_us,
                                   const double* meas_us,
                                   const double* capacity_bps, double f,
                                   double* out, int64_t n) {
  const __m256d vf = _mm256_set1_pd(f);
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d idle_fraction =
        _mm256_div_pd(_mm256_loadu_pd(idle_us + i), _mm256_loadu_pd(meas_us + i));
    _mm256_storeu_pd(
        out + i,
        _mm256_mul_pd(
            _mm256_mul_pd(idle_fraction, _mm256_loadu_pd(capacity_bps + i)),
            vf));
  }
  ScalarKernels().ss_additional(idle_us + i, meas_us + i, capacity_bps + i, f,
                                out + i, n - i);
}

AIRTIME_AVX2 void DivideAvx2(const double* a, const double* b, double* out,
                             int64_t n) {
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  ScalarKernels().divide(a + i, b + i, out + i, n - i);
}

AIRTIME_AVX2 void AddAvx2(const double* a, const double* b, double* out,
                          int64_t n) {
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  ScalarKernels().add(a + i, b + i, out + i, n - i);
}

AIRTIME_AVX2 BandCount CountInBandAvx2(const double* totals, double capacity,
                                       double band, int64_t n) {
  const __m256d cap = _mm256_set1_pd(capacity);
  const __m256d limit = _mm256_set1_pd(band * capacity);
  const __m256d sign = _mm256_set1_pd(-0.0);
  BandCount count;
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d t = _mm256_loadu_pd(totals + i);
    const __m256d dev = _mm256_andnot_pd(sign, _mm256_sub_pd(t, cap));
    const int ordered = _mm256_movemask_pd(_mm256_cmp_pd(t, t, _CMP_ORD_Q));
    const int inside =
        _mm256_movemask_pd(_mm256_cmp_pd(dev, limit, _CMP_LE_OQ));
    count.counted += std::popcount(static_cast<unsigned>(ordered));
    count.in_band += std::popcount(static_cast<unsigned>(inside));
  }
  const BandCount tail =
      ScalarKernels().count_in_band(totals + i, capacity, band, n - i);
  count.counted += tail.counted;
  count.in_band += tail.in_band;
  return count;
}

AIRTIME_AVX2 inline __m256i LoadI64(const int64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

AIRTIME_AVX2 int64_t FindConservationViolationAvx2(
    const int64_t* tx, const int64_t* backoff, const int64_t* other,
    const int64_t* idle, const int64_t* window_us, int64_t n) {
  int64_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256i sum = _mm256_add_epi64(
        _mm256_add_epi64(LoadI64(tx + i), LoadI64(backoff + i)),
        _mm256_add_epi64(LoadI64(other + i), LoadI64(idle + i)));
    const int equal = _mm256_movemask_pd(
        _mm256_castsi256_pd(_mm256_cmpeq_epi64(sum, LoadI64(window_us + i))));
    if (equal != 0xF) return i + std::countr_one(static_cast<unsigned>(equal));
  }
  const int64_t tail = ScalarKernels().find_conservation_violation(
      tx + i, backoff + i, other + i, idle + i, window_us + i, n - i);
  return tail < 0 ? -1 : i + tail;
}

}  // namespace

const KernelTable* Avx2Kernels() {
  static const KernelTable table{
      Isa::kAvx2,         SpAdditionalAvx2, AccumulateLinkCostAvx2,
      SsAdditionalAvx2,   AddAvx2,          DivideAvx2,
      CountInBandAvx2,
      FindConservationViolationAvx2,
  };
  return &table;
}

}  // namespace airtime::kernels

#else

namespace airtime::kernels {
const KernelTable* Avx2Kernels() { return nullptr; }
}  // namespace airtime::kernels

#endif
