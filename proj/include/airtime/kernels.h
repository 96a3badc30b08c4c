// Column kernels over a run's per-window series.
//
// Each kernel has a scalar reference and vector variants (AVX2 on x86-64,
// NEON on AArch64). Vector variants perform the same IEEE operations in the
// same order per element as the scalar code, so results are bit-identical;
// the unit tests check that equivalence on every available ISA.

#ifndef AIRTIME_KERNELS_H_
#define AIRTIME_KERNELS_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace airtime::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view ToString(Isa isa);
bool IsaAvailable(Isa isa);
Isa BestIsa();

struct BandCount {
  int64_t in_band = 0;
  int64_t counted = 0;  // non-NaN totals
  bool operator==(const BandCount&) const = default;
};

struct KernelTable {
  Isa isa;
  // out = ((idle / meas) * (tx_bits * 1e6 / busy)) * p, in bits/s.
  // busy <= 0 yields NaN (no estimate).
  void (*sp_additional)(const double* idle_us, const double* meas_us,
                        const double* tx_bits, const double* busy_us,
                        double p, double* out, int64_t n);
  // cost += retry / rate_bps. NaN retries propagate.
  void (*accumulate_link_cost)(const double* retry, const double* rate_bps,
                               double* cost, int64_t n);
  // out = ((idle / meas) * capacity) * f, where capacity is the path's
  // 1 / sum(retry / rate), or rate / retry for a single link.
  void (*ss_additional)(const double* idle_us, const double* meas_us,
                        const double* capacity_bps, double f, double* out,
                        int64_t n);
  // out = a + b.
  void (*add)(const double* a, const double* b, double* out, int64_t n);
  // out = a / b.
  void (*divide)(const double* a, const double* b, double* out, int64_t n);
  // Counts |total - capacity| <= band * capacity over non-NaN totals.
  BandCount (*count_in_band)(const double* totals, double capacity,
                             double band, int64_t n);
  // First i with tx + backoff + other + idle != window, or -1.
  int64_t (*find_conservation_violation)(const int64_t* tx,
                                         const int64_t* backoff,
                                         const int64_t* other,
                                         const int64_t* idle,
                                         const int64_t* window_us, int64_t n);
};

const KernelTable& ScalarKernels();
// Null when the ISA was not compiled in.
const KernelTable* Avx2Kernels();
const KernelTable* NeonKernels();

// The table used by the rest of the library: the best available ISA, or the
// one named by AIRTIME_KERNELS=scalar|avx2|neon when that is available.
const KernelTable& Active();
// Test hook; throws std::invalid_argument if the ISA is unavailable.
void ForceIsa(Isa isa);

// Span conveniences over Active(). Sizes must match (std::invalid_argument).
void SpAdditional(std::span<const double> idle_us,
                  std::span<const double> meas_us,
                  std::span<const double> tx_bits,
                  std::span<const double> busy_us, double p,
                  std::span<double> out);
void AccumulateLinkCost(std::span<const double> retry,
                        std::span<const double> rate_bps,
                        std::span<double> cost);
void SsAdditional(std::span<const double> idle_us,
                  std::span<const double> meas_us,
                  std::span<const double> capacity_bps, double f,
                  std::span<double> out);
void Add(std::span<const double> a, std::span<const double> b,
         std::span<double> out);
void Divide(std::span<const double> a, std::span<const double> b,
            std::span<double> out);
BandCount CountInBand(std::span<const double> totals, double capacity,
                      double band);
int64_t FindConservationViolation(std::span<const int64_t> tx,
                                  std::span<const int64_t> backoff,
                                  std::span<const int64_t> other,
                                  std::span<const int64_t> idle,
                                  std::span<const int64_t> window_us);

}  // namespace airtime::kernels

#endif  // AIRTIME_KERNELS_H_
