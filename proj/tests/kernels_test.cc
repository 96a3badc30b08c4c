#include "airtime/kernels.h"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <vector>

#include "airtime/sim_engine.h"

namespace airtime::kernels {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<const KernelTable*> VectorTables() {
  std::vector<const KernelTable*> tables;
  if (IsaAvailable(Isa::kAvx2)) tables.push_back(Avx2Kernels());
  if (IsaAvailable(Isa::kNeon)) tables.push_back(NeonKernels());
  return tables;
}

void ExpectBitEqual(const std::vector<double>& a, const std::vector<double>& b,
                    const char* what) {
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(std::bit_cast<uint64_t>(a[i]), std::bit_cast<uint64_t>(b[i]))
        << what << " differs at " << i << ": " << a[i] << " vs " << b[i];
  }
}

struct Columns {
  std::vector<double> idle, meas, bits, busy, retry, rate, capacity, totals;
  std::vector<int64_t> tx, backoff, other, idle_i, window;
};

// Odd lengths exercise the scalar tails of the vector loops.
Columns RandomColumns(size_t n, uint64_t seed) {
  RngStream rng(seed, "kernels");
  Columns c;
  for (size_t i = 0; i < n; ++i) {
    const int64_t window = 200'000;
    const int64_t tx = rng.UniformInt(0, 100'000);
    const int64_t backoff = rng.UniformInt(0, 50'000);
    const int64_t idle = rng.UniformInt(0, window - tx - backoff);
    c.tx.push_back(tx);
    c.backoff.push_back(backoff);
    c.idle_i.push_back(idle);
    c.other.push_back(window - tx - backoff - idle);
    c.window.push_back(window);
    c.idle.push_back(static_cast<double>(idle));
    c.meas.push_back(static_cast<double>(window));
    c.bits.push_back(static_cast<double>(rng.UniformInt(0, 6'000'000)));
    c.busy.push_back(rng.Bernoulli(0.1) ? 0.0
                                        : static_cast<double>(tx + backoff));
    c.retry.push_back(rng.Bernoulli(0.05) ? kNaN
                                          : 1.0 + 2.0 * rng.UniformUnit());
    c.rate.push_back(6e6 + 48e6 * rng.UniformUnit());
    c.capacity.push_back(1e6 + 30e6 * rng.UniformUnit());
    c.totals.push_back(rng.Bernoulli(0.1) ? kNaN
                                          : 30e6 * rng.UniformUnit());
  }
  return c;
}

class KernelEquivalenceTest : public ::testing::TestWithParam<size_t> {};

TEST_P(KernelEquivalenceTest, VectorMatchesScalarBitForBit) {
  const size_t n = GetParam();
  const Columns c = RandomColumns(n, 1000 + n);
  const KernelTable& scalar = ScalarKernels();
  const auto len = static_cast<int64_t>(n);
  for (const KernelTable* vec : VectorTables()) {
    SCOPED_TRACE(std::string(ToString(vec->isa)));
    std::vector<double> want(n), got(n);

    scalar.sp_additional(c.idle.data(), c.meas.data(), c.bits.data(),
                         c.busy.data(), 0.8, want.data(), len);
    vec->sp_additional(c.idle.data(), c.meas.data(), c.bits.data(),
                       c.busy.data(), 0.8, got.data(), len);
    ExpectBitEqual(want, got, "sp_additional");

    std::vector<double> cost_want(n, 0.0), cost_got(n, 0.0);
    for (int hop = 0; hop < 3; ++hop) {
      scalar.accumulate_link_cost(c.retry.data(), c.rate.data(),
                                  cost_want.data(), len);
      vec->accumulate_link_cost(c.retry.data(), c.rate.data(), cost_got.data(),
                                len);
    }
    ExpectBitEqual(cost_want, cost_got, "accumulate_link_cost");

    scalar.ss_additional(c.idle.data(), c.meas.data(), c.capacity.data(),
                         24.0 / 54.0, want.data(), len);
    vec->ss_additional(c.idle.data(), c.meas.data(), c.capacity.data(),
                       24.0 / 54.0, got.data(), len);
    ExpectBitEqual(want, got, "ss_additional");

    scalar.add(c.bits.data(), c.capacity.data(), want.data(), len);
    vec->add(c.bits.data(), c.capacity.data(), got.data(), len);
    ExpectBitEqual(want, got, "add");

    scalar.divide(c.rate.data(), c.retry.data(), want.data(), len);
    vec->divide(c.rate.data(), c.retry.data(), got.data(), len);
    ExpectBitEqual(want, got, "divide");

    EXPECT_EQ(scalar.count_in_band(c.totals.data(), 20e6, 0.2, len),
              vec->count_in_band(c.totals.data(), 20e6, 0.2, len));

    EXPECT_EQ(scalar.find_conservation_violation(
                  c.tx.data(), c.backoff.data(), c.other.data(),
                  c.idle_i.data(), c.window.data(), len),
              vec->find_conservation_violation(c.tx.data(), c.backoff.data(),
                                               c.other.data(), c.idle_i.data(),
                                               c.window.data(), len));
  }
}

INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalenceTest,
                         ::testing::Values(0, 1, 3, 4, 5, 7, 150, 1001));

TEST(KernelTest, ScalarValues) {
  const std::vector<double> idle = {100'000, 0, 50'000};
  const std::vector<double> meas = {200'000, 200'000, 200'000};
  const std::vector<double> bits = {2'000'000, 1'000, 0};
  const std::vector<double> busy = {80'000, 10, 0};
  std::vector<double> out(3);
  ForceIsa(Isa::kScalar);
  SpAdditional(idle, meas, bits, busy, 0.8, out);
  EXPECT_NEAR(out[0], 10e6, 1e-6);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_TRUE(std::isnan(out[2]));

  std::vector<double> cost(1, 0.0);
  AccumulateLinkCost(std::vector<double>{1.0}, std::vector<double>{54e6}, cost);
  AccumulateLinkCost(std::vector<double>{1.5}, std::vector<double>{24e6}, cost);
  EXPECT_DOUBLE_EQ(cost[0], 1.0 / 54e6 + 1.5 / 24e6);
  std::vector<double> nan_cost(1, 0.0);
  AccumulateLinkCost(std::vector<double>{kNaN}, std::vector<double>{54e6},
                     nan_cost);
  EXPECT_TRUE(std::isnan(nan_cost[0]));

  std::vector<double> capacity(1);
  Divide(std::vector<double>{54e6}, std::vector<double>{1.2}, capacity);
  EXPECT_DOUBLE_EQ(capacity[0], 45e6);
  std::vector<double> ss(1);
  SsAdditional(std::vector<double>{100'000}, std::vector<double>{200'000},
               capacity, 24.0 / 54.0, ss);
  EXPECT_NEAR(ss[0], 10e6, 1e-6);

  std::vector<double> sum(2);
  Add(std::vector<double>{1.0, 2.0}, std::vector<double>{3.0, kNaN}, sum);
  EXPECT_EQ(sum[0], 4.0);
  EXPECT_TRUE(std::isnan(sum[1]));

  const std::vector<double> totals = {1.0, 1.1, 1.3, kNaN, 0.8, 0.7};
  EXPECT_EQ(CountInBand(totals, 1.0, 0.2), (BandCount{3, 5}));
}

TEST(KernelTest, ConservationViolationIndex) {
  const std::vector<int64_t> tx = {1, 1, 1, 1, 1, 1};
  const std::vector<int64_t> zero(6, 0);
  std::vector<int64_t> idle = {9, 9, 9, 9, 9, 9};
  const std::vector<int64_t> window(6, 10);
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (!IsaAvailable(isa)) continue;
    ForceIsa(isa);
    idle[4] = 9;
    EXPECT_EQ(FindConservationViolation(tx, zero, zero, idle, window), -1);
    idle[4] = 8;
    EXPECT_EQ(FindConservationViolation(tx, zero, zero, idle, window), 4);
  }
  ForceIsa(BestIsa());
}

TEST(KernelTest, SizeMismatchThrows) {
  std::vector<double> out(2);
  EXPECT_THROW(Add(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}, out),
               std::invalid_argument);
  EXPECT_THROW(Divide(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0},
                      out),
               std::invalid_argument);
}

TEST(KernelTest, DispatchReportsIsa) {
  EXPECT_TRUE(IsaAvailable(Isa::kScalar));
  EXPECT_EQ(ToString(Isa::kScalar), "scalar");
  ForceIsa(Isa::kScalar);
  EXPECT_EQ(Active().isa, Isa::kScalar);
  ForceIsa(BestIsa());
  EXPECT_EQ(Active().isa, BestIsa());
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!IsaAvailable(isa)) {
      EXPECT_THROW(ForceIsa(isa), std::invalid_argument);
    }
  }
}

}  // namespace
}  // namespace airtime::kernels
