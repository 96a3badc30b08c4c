#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "airtime/kernels.h"

namespace airtime::kernels {

std::string_view ToString(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "?";
}

namespace {

const KernelTable* TableFor(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &ScalarKernels();
    case Isa::kAvx2:
      return Avx2Kernels();
    case Isa::kNeon:
      return NeonKernels();
  }
  return nullptr;
}

const KernelTable* InitialTable() {
  if (const char* env = std::getenv("AIRTIME_KERNELS")) {
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (ToString(isa) == env && IsaAvailable(isa)) return TableFor(isa);
    }
  }
  return TableFor(BestIsa());
}

std::atomic<const KernelTable*>& ActiveSlot() {
  static std::atomic<const KernelTable*> slot{InitialTable()};
  return slot;
}

void RequireSameSize(size_t a, size_t b) {
  if (a != b) throw std::invalid_argument("kernel inputs differ in length");
}

}  // namespace

bool IsaAvailable(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return Avx2Kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
      // Advanced SIMD is mandatory on AArch64.
      return NeonKernels() != nullptr;
  }
  return false;
}

Isa BestIsa() {
  if (IsaAvailable(Isa::kAvx2)) return Isa::kAvx2;
  if (IsaAvailable(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

const KernelTable& Active() { return *ActiveSlot().load(); }

void ForceIsa(Isa isa) {
  if (!IsaAvailable(isa)) {
    throw std::invalid_argument("ISA " + std::string(ToString(isa)) +
                                " is not available on this machine");
  }
  ActiveSlot().store(TableFor(isa));
}

void SpAdditional(std::span<const double> idle_us,
                  std::span<const double> meas_us,
                  std::span<const double> tx_bits,
                  std::span<const double> busy_us, double p,
                  std::span<double> out) {
  RequireSameSize(idle_us.size(), out.size());
  RequireSameSize(meas_us.size(), out.size());
  RequireSameSize(tx_bits.size(), out.size());
  RequireSameSize(busy_us.size(), out.size());
  Active().sp_additional(idle_us.data(), meas_us.data(), tx_bits.data(),
                         busy_us.data(), p, out.data(),
                         static_cast<int64_t>(out.size()));
}

void AccumulateLinkCost(std::span<const double> retry,
                        std::span<const double> rate_bps,
                        std::span<double> cost) {
  RequireSameSize(retry.size(), cost.size());
  RequireSameSize(rate_bps.size(), cost.size());
  Active().accumulate_link_cost(retry.data(), rate_bps.data(), cost.data(),
                                static_cast<int64_t>(cost.size()));
}

void SsAdditional(std::span<const double> idle_us,
                  std::span<const double> meas_us,
                  std::span<const double> capacity_bps, double f,
                  std::span<double> out) {
  RequireSameSize(idle_us.size(), out.size());
  RequireSameSize(meas_us.size(), out.size());
  RequireSameSize(capacity_bps.size(), out.size());
  Active().ss_additional(idle_us.data(), meas_us.data(), capacity_bps.data(),
                         f, out.data(), static_cast<int64_t>(out.size()));
}

void Divide(std::span<const double> a, std::span<const double> b,
            std::span<double> out) {
  RequireSameSize(a.size(), out.size());
  RequireSameSize(b.size(), out.size());
  Active().divide(a.data(), b.data(), out.data(),
                  static_cast<int64_t>(out.size()));
}

void Add(std::span<const double> a, std::span<const double> b,
         std::span<double> out) {
  RequireSameSize(a.size(), out.size());
  RequireSameSize(b.size(), out.size());
  Active().add(a.data(), b.data(), out.data(),
               static_cast<int64_t>(out.size()));
}

BandCount CountInBand(std::span<const double> totals, double capacity,
                      double band) {
  return Active().count_in_band(totals.data(), capacity, band,
                                static_cast<int64_t>(totals.size()));
}

int64_t FindConservationViolation(std::span<const int64_t> tx,
                                  std::span<const int64_t> backoff,
                                  std::span<const int64_t> other,
                                  std::span<const int64_t> idle,
                                  std::span<const int64_t> window_us) {
  RequireSameSize(tx.size(), window_us.size());
  RequireSameSize(backoff.size(), window_us.size());
  RequireSameSize(other.size(), window_us.size());
  RequireSameSize(idle.size(), window_us.size());
  return Active().find_conservation_violation(
      tx.data(), backoff.data(), other.data(), idle.data(), window_us.data(),
      static_cast<int64_t>(window_us.size()));
}

}  // namespace airtime::kernels
