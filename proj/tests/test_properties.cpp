#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fdrkit/core.hpp"
#include "fdrkit/exact.hpp"
#include "fdrkit/kernels.hpp"
#include "fdrkit/verify.hpp"

namespace fdrkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs each property once per available kernel table.
class Properties : public ::testing::TestWithParam<const char*> {
 protected:
  void SetUp() override {
    if (!kernels::select(GetParam())) GTEST_SKIP() << GetParam() << " unavailable";
  }
  void TearDown() override { kernels::select("auto"); }
};

std::vector<double> random_pvalues(std::mt19937_64& gen, std::size_t K, double alpha) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> p(K);
  for (auto& v : p) {
    switch (gen() % 4) {
      case 0:
        v = alpha * static_cast<double>(1 + gen() % K) / static_cast<double>(K);
        break;
      case 1:
        v = alpha * unit(gen);
        break;
      default:
        v = unit(gen);
        break;
    }
  }
  return p;
}

TEST_P(Properties, LoweringOneValueNeverShrinksRejections) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t K = 1 + gen() % 20;
    const double alpha = 0.05 + 0.3 * std::uniform_real_distribution<double>(0, 1)(gen);
    const PValueVector p(random_pvalues(gen, K, alpha));
    const std::size_t k = gen() % K;
    const double lowered = p[k] * std::uniform_real_distribution<double>(0, 1)(gen);
    const auto before = bh_procedure(p, alpha);
    const auto after = bh_procedure(p.with(k, lowered), alpha);
    ASSERT_TRUE(std::includes(after.rejected.begin(), after.rejected.end(),
                              before.rejected.begin(), before.rejected.end()));
  }
}

TEST_P(Properties, ThresholdCharacterizesRejections) {
  std::mt19937_64 gen(32);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t K = 1 + gen() % 20;
    const double alpha = 0.2;
    const PValueVector p(random_pvalues(gen, K, alpha));
    const auto r = bh_procedure(p, alpha);
    for (std::size_t k = 0; k < K; ++k) ASSERT_EQ(p[k] <= r.threshold, r.rejects(k));
    const auto counts = counting_processes(p, TruthAssignment::leading_nulls(K, K), r.threshold);
    ASSERT_EQ(counts.rejections, std::max<std::size_t>(r.k_star, 1));
  }
}

TEST_P(Properties, MatchesOracleOnCoarseGridUpToEight) {
  // Grid values sit on the BH cutoffs 0.025 j for K = 8 at alpha = 0.2.
  const std::vector<double> grid = {0.025, 0.05, 0.1, 0.3};
  const double alpha = 0.2;
  std::size_t cases = 0;
  for (std::size_t K = 5; K <= 8; ++K) {
    std::vector<std::size_t> digits(K, 0);
    std::vector<double> values(K);
    for (;;) {
      for (std::size_t k = 0; k < K; ++k) values[k] = grid[digits[k]];
      const PValueVector p(values);
      ASSERT_EQ(bh_procedure(p, alpha).rejected, verify::bh_oracle(p, alpha));
      ++cases;
      std::size_t k = 0;
      while (k < K && ++digits[k] == grid.size()) digits[k++] = 0;
      if (k == K) break;
    }
  }
  EXPECT_EQ(cases, 1024u + 4096u + 16384u + 65536u);
}

TEST_P(Properties, MatchesOracleOnRandomVectors) {
  const auto report = verify::random_oracle_check(10000, 33);
  EXPECT_EQ(report.cases_run, 10000u);
  EXPECT_EQ(report.failures, 0u) << report.first_failure.value_or("");
}

TEST_P(Properties, EbhIsBhOnReciprocals) {
  std::mt19937_64 gen(34);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t K = 1 + gen() % 20;
    const double alpha = std::ldexp(1.0, -static_cast<int>(1 + gen() % 4));
    std::vector<double> e(K), q(K);
    for (std::size_t k = 0; k < K; ++k) {
      const auto pick = gen() % 6;
      e[k] = pick == 0 ? 0.0 : pick == 1 ? kInf : std::ldexp(1.0, static_cast<int>(gen() % 10) - 2);
      q[k] = e[k] == 0.0 ? 1.0 : std::min(1.0, 1.0 / e[k]);
    }
    ASSERT_EQ(ebh_procedure(EValueVector(e), alpha).rejected,
              bh_procedure(PValueVector(q), alpha).rejected);
  }
}

TEST_P(Properties, EbhIsMaximalSelfConsistentTopSet) {
  std::mt19937_64 gen(35);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t K = 1 + gen() % 20;
    const double alpha = 0.05 + 0.5 * unit(gen);
    std::vector<double> values(K);
    for (auto& v : values) {
      v = gen() % 3 == 0 ? static_cast<double>(K) / (alpha * static_cast<double>(1 + gen() % K))
                         : 1.0 / unit(gen);
    }
    const EValueVector e(values);
    const auto r = ebh_procedure(e, alpha);
    ASSERT_TRUE(is_self_consistent(e, alpha, r.rejected));
    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return e[a] > e[b]; });
    for (std::size_t size = r.r() + 1; size <= K; ++size) {
      ASSERT_FALSE(is_self_consistent(e, alpha, std::span(order).first(size)));
    }
  }
}

TEST_P(Properties, SimesBelowLevelIffBhRejects) {
  std::mt19937_64 gen(36);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t K = 1 + gen() % 20;
    const double alpha = trial % 2 ? 0.1 : 0.01 + 0.5 * std::uniform_real_distribution<double>(0, 1)(gen);
    const PValueVector p(random_pvalues(gen, K, alpha));
    ASSERT_EQ(simes_statistic(p) <= alpha, bh_procedure(p, alpha).r() > 0);
  }
}

TEST_P(Properties, LeaveOneOutEventIdentity) {
  std::mt19937_64 gen(37);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t K = 1 + gen() % 20;
    const double alpha = 0.1;
    const PValueVector p(random_pvalues(gen, K, alpha));
    const std::size_t R = bh_procedure(p, alpha).r();
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t Rk = leave_one_out_rejections(p, alpha, k);
      ASSERT_GE(Rk, 1u);
      for (std::size_t r = 1; r <= K; ++r) {
        const bool small = exact::product_le(static_cast<double>(K), p[k], alpha,
                                             static_cast<double>(r));
        ASSERT_EQ(small && R == r, small && Rk == r);
      }
    }
  }
}

TEST_P(Properties, CalibratedEbhEqualsBh) {
  std::mt19937_64 gen(38);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t K = 1 + gen() % 20;
    const double alpha = trial % 3 ? 0.1 : 0.01 + 0.8 * std::uniform_real_distribution<double>(0, 1)(gen);
    ASSERT_TRUE(calibrated_equivalence(PValueVector(random_pvalues(gen, K, alpha)), alpha));
  }
}

TEST_P(Properties, PermutationEquivariance) {
  std::mt19937_64 gen(39);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t K = 1 + gen() % 20;
    const double alpha = 0.2;
    const auto values = random_pvalues(gen, K, alpha);
    std::vector<std::size_t> perm(K);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<double> permuted(K);
    for (std::size_t k = 0; k < K; ++k) permuted[perm[k]] = values[k];

    const auto map = [&](const std::vector<std::size_t>& rejected) {
      std::vector<std::size_t> out;
      for (const auto k : rejected) out.push_back(perm[k]);
      std::sort(out.begin(), out.end());
      return out;
    };
    const PValueVector p(values), q(permuted);
    ASSERT_EQ(map(bh_procedure(p, alpha).rejected), bh_procedure(q, alpha).rejected);
    ASSERT_EQ(map(by_procedure(p, alpha).rejected), by_procedure(q, alpha).rejected);
    std::vector<double> ev(K), eq(K);
    for (std::size_t k = 0; k < K; ++k) {
      ev[k] = values[k] == 0 ? kInf : 1.0 / values[k];
      eq[k] = permuted[k] == 0 ? kInf : 1.0 / permuted[k];
    }
    ASSERT_EQ(map(ebh_procedure(EValueVector(ev), alpha).rejected),
              ebh_procedure(EValueVector(eq), alpha).rejected);
  }
}

INSTANTIATE_TEST_SUITE_P(Kernels, Properties, ::testing::Values("scalar", "avx2"),
                         [](const auto& info) { return std::string(info.param); });

TEST(CalibratorProperties, IntegratesToOne) {
  for (std::size_t K = 1; K <= 50; ++K) {
    for (const double alpha : {0.01, 0.05, 0.1, 0.2}) {
      const Calibrator cal(K, alpha);
      const double width = alpha / static_cast<double>(K);
      // phi is constant on ((c-1) alpha / K, c alpha / K]; sample mid-step.
      double integral = 0.0;
      for (std::size_t c = 1; c <= K; ++c) {
        integral += width * cal((static_cast<double>(c) - 0.5) * width);
      }
      ASSERT_NEAR(integral, 1.0, 1e-12) << "K=" << K << " alpha=" << alpha;
    }
  }
}

TEST(CalibratorProperties, DecreasingAcrossBreakpoints) {
  for (std::size_t K = 1; K <= 30; ++K) {
    for (const double alpha : {0.01, 0.05, 0.1, 0.2, 0.7}) {
      const Calibrator cal(K, alpha);
      double previous = cal(0.0);
      for (std::size_t c = 1; c <= K + 1; ++c) {
        const double b = alpha * static_cast<double>(c) / static_cast<double>(K);
        for (const double p : {std::nextafter(b, 0.0), b, std::nextafter(b, 2.0)}) {
          if (p > 1.0) continue;
          const double e = cal(p);
          ASSERT_LE(e, previous) << "K=" << K << " alpha=" << alpha << " p=" << p;
          previous = e;
        }
      }
      ASSERT_EQ(cal(1.0), 0.0);
    }
  }
}

}  // namespace
}  // namespace fdrkit
