#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "fdrkit/core.hpp"
#include "fdrkit/exact.hpp"
#include "fdrkit/montecarlo.hpp"
#include "fdrkit/rng.hpp"
#include "fdrkit/simulate.hpp"

namespace fdrkit {
namespace {

ModelSpec model(ModelKind kind, std::size_t K, std::size_t K0) {
  ModelSpec m;
  m.kind = kind;
  m.K = K;
  m.K0 = K0;
  return m;
}

std::vector<double> null_values(const ModelSpec& m, std::size_t draws, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(draws * m.K0);
  std::vector<double> buffer(m.K);
  for (std::size_t i = 0; i < draws; ++i) {
    SplitMix64 rng(derive_seed(seed, i));
    generate_into(m, rng, buffer);
    out.insert(out.end(), buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(m.K0));
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

TEST(Rng, UniformStaysInsideOpenInterval) {
  SplitMix64 rng(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowIsUnbiasedAndInRange) {
  SplitMix64 rng(1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  for (const int c : counts) EXPECT_NEAR(c, 10000, 5 * std::sqrt(10000.0 * 6 / 7));
}

TEST(Rng, NormalMoments) {
  SplitMix64 rng(2);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(0, 0), derive_seed(0, 1));
  EXPECT_NE(derive_seed(0, 0), derive_seed(1, 0));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}

TEST(Generate, DeterministicInSeed) {
  for (const auto kind : {ModelKind::independent_uniform, ModelKind::gaussian_one_factor,
                          ModelKind::comonotone_evalue, ModelKind::discrete_adversarial_p}) {
    auto m = model(kind, 12, 7);
    if (kind == ModelKind::discrete_adversarial_p) m.grid_alpha = 0.1;
    if (kind == ModelKind::gaussian_one_factor) m.rho = 0.5;
    const Draw a = generate(m, 42);
    const Draw b = generate(m, 42);
    const Draw c = generate(m, 43);
    const auto values = [](const Draw& d) {
      return std::visit([](const auto& v) { return std::vector<double>(v.values().begin(), v.values().end()); },
                        d.values);
    };
    EXPECT_EQ(values(a), values(b)) << to_string(kind);
    if (kind != ModelKind::comonotone_evalue) {
      EXPECT_NE(values(a), values(c)) << to_string(kind);
    }
    EXPECT_EQ(a.truth.null_count(), 7u);
    EXPECT_EQ(std::holds_alternative<EValueVector>(a.values), kind == ModelKind::comonotone_evalue);
  }
}

TEST(Generate, UniformNullMeanIsOneHalf) {
  const auto m = model(ModelKind::independent_uniform, 1, 1);
  const auto v = null_values(m, 100000, 3);
  EXPECT_NEAR(mean(v), 0.5, 3.0 * std::sqrt(1.0 / 12.0 / 100000.0));
}

TEST(Generate, UncorrelatedGaussianNullsMatchUniformNulls) {
  auto gaussian = model(ModelKind::gaussian_one_factor, 1, 1);
  gaussian.rho = 0.0;
  const auto a = null_values(gaussian, 100000, 4);
  const auto b = null_values(model(ModelKind::independent_uniform, 1, 1), 100000, 5);
  EXPECT_LT(ks_distance(a, b), 0.01);
}

TEST(Generate, CorrelatedGaussianNullsAreStillUniform) {
  auto gaussian = model(ModelKind::gaussian_one_factor, 2, 2);
  gaussian.rho = 0.9;
  const auto v = null_values(gaussian, 100000, 6);
  EXPECT_LT(ks_distance_to_uniform(v), 0.01);
}

TEST(Generate, ComonotoneNullMeanIsOne) {
  auto m = model(ModelKind::comonotone_evalue, 3, 3);
  m.signal = 10.0;
  const auto v = null_values(m, 100000, 7);
  // Variance of m 1{U <= 1/m} is m - 1.
  EXPECT_NEAR(mean(v), 1.0, 3.0 * std::sqrt(9.0 / 100000.0));
  for (std::size_t i = 0; i < v.size(); i += 3) {
    ASSERT_EQ(v[i], v[i + 1]);
    ASSERT_TRUE(v[i] == 0.0 || v[i] == 10.0);
  }
}

TEST(Generate, ComonotoneAlternativeMeanIsCapped) {
  auto m = model(ModelKind::comonotone_evalue, 2, 1);
  m.signal = 20.0;
  m.alt_signal = 5.0;
  double total = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) total += std::get<EValueVector>(generate(m, derive_seed(8, i)).values)[1];
  EXPECT_NEAR(total / n, 5.0, 3.0 * std::sqrt(20.0 * 5.0 / n));
}

TEST(Generate, AdversarialNullsAreValidPValues) {
  auto m = model(ModelKind::discrete_adversarial_p, 20, 20);
  m.grid_alpha = 0.1;
  const std::size_t draws = 100000;
  const auto v = null_values(m, draws, 9);
  for (int j = 1; j <= 20; ++j) {
    const double x = exact::ratio_round_down(0.1, j, 20.0);
    // Nulls within a draw are dependent, so average per-draw fractions.
    std::vector<double> fractions(draws, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) fractions[i / 20] += v[i] <= x ? 0.05 : 0.0;
    const double f = mean(fractions);
    double ss = 0.0;
    for (const double q : fractions) ss += (q - f) * (q - f);
    const double se = std::sqrt(ss / (draws - 1.0) / draws);
    // Exact law: 0.1 j (j + 1) / (20 * 21).
    const double expected = 0.1 * j * (j + 1) / (20.0 * 21.0);
    EXPECT_NEAR(f, expected, 4.0 * se + 1e-9) << j;
    EXPECT_LE(expected, x);
  }
}

TEST(Generate, InvalidSpecs) {
  auto m = model(ModelKind::independent_uniform, 5, 6);
  EXPECT_THROW(m.validate(), DomainError);
  m = model(ModelKind::independent_uniform, 0, 0);
  EXPECT_THROW(m.validate(), DomainError);
  m = model(ModelKind::independent_uniform, 5, 5);
  m.signal = 0.0;
  EXPECT_THROW(m.validate(), DomainError);
  m.signal = 1.5;
  EXPECT_THROW(m.validate(), DomainError);
  m = model(ModelKind::gaussian_one_factor, 5, 5);
  m.rho = 1.0;
  EXPECT_THROW(m.validate(), DomainError);
  m.rho = -0.1;
  EXPECT_THROW(m.validate(), DomainError);
  m = model(ModelKind::comonotone_evalue, 5, 5);
  m.signal = 0.5;
  EXPECT_THROW(m.validate(), DomainError);
  m = model(ModelKind::discrete_adversarial_p, 5, 5);
  EXPECT_THROW(generate(m, 1), DomainError);
  m.grid_alpha = 0.6;
  EXPECT_THROW(m.validate(), DomainError);
  m = model(ModelKind::independent_uniform, 5, 5);
  m.rho = 0.3;
  EXPECT_THROW(m.validate(), DomainError);
}

TEST(Generate, ModelNamesRoundTrip) {
  for (const auto kind : {ModelKind::independent_uniform, ModelKind::gaussian_one_factor,
                          ModelKind::comonotone_evalue, ModelKind::discrete_adversarial_p}) {
    EXPECT_EQ(parse_model_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_model_kind("normal"));
  EXPECT_EQ(parse_procedure_kind("by"), ProcedureKind::by);
  EXPECT_FALSE(parse_procedure_kind("holm"));
}

TEST(MonteCarlo, ConstantStatisticHasZeroError) {
  const auto m = montecarlo::run(5000, 1, 3, [](std::size_t, std::span<double> out) { out[0] = 7.0; });
  EXPECT_EQ(m[0].mean, 7.0);
  EXPECT_EQ(m[0].std_error, 0.0);
  const auto single = montecarlo::run(1, 1, 1, [](std::size_t, std::span<double> out) { out[0] = 0.3; });
  EXPECT_EQ(single[0].std_error, 0.0);
  EXPECT_THROW(montecarlo::run(0, 1, 1, [](std::size_t, std::span<double>) {}), std::invalid_argument);
}

TEST(MonteCarlo, KnownMeanAndError) {
  // 0, 1, ..., n-1: mean (n-1)/2, sample variance n(n+1)/12.
  const std::size_t n = 3001;
  const auto m = montecarlo::run(n, 1, 4, [](std::size_t i, std::span<double> out) {
    out[0] = static_cast<double>(i);
  });
  EXPECT_EQ(m[0].mean, 1500.0);
  EXPECT_NEAR(m[0].std_error, std::sqrt(n * (n + 1) / 12.0 / n), 1e-9);
}

TEST(MonteCarlo, WorkerCountDoesNotChangeResults) {
  const auto body = [](std::size_t i, std::span<double> out) {
    SplitMix64 rng(derive_seed(99, i));
    out[0] = rng.uniform();
    out[1] = rng.normal() * 1e-3;
  };
  const auto a = montecarlo::run(10007, 2, 1, body);
  for (const std::size_t workers : {2u, 3u, 8u}) {
    const auto b = montecarlo::run(10007, 2, workers, body);
    for (std::size_t s = 0; s < 2; ++s) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(a[s].mean), std::bit_cast<std::uint64_t>(b[s].mean));
      EXPECT_EQ(std::bit_cast<std::uint64_t>(a[s].std_error),
                std::bit_cast<std::uint64_t>(b[s].std_error));
    }
  }
}

TEST(MonteCarlo, SampleKeepsReplicationOrder) {
  const auto v = montecarlo::sample(2500, 4, [](std::size_t i) { return static_cast<double>(i); });
  for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(v[i], static_cast<double>(i));
}

TEST(MonteCarlo, PropagatesExceptions) {
  EXPECT_THROW(montecarlo::run(5000, 1, 2,
                               [](std::size_t i, std::span<double>) {
                                 if (i == 4000) throw std::runtime_error("boom");
                               }),
               std::runtime_error);
}

TEST(EstimateFdr, GlobalNullEqualsAlpha) {
  const auto e = estimate_fdr(model(ModelKind::independent_uniform, 10, 10),
                              {ProcedureKind::bh, 0.1}, 200000, 7);
  EXPECT_NEAR(e.mean_fdp, 0.1, 0.01);
  EXPECT_EQ(e.replications, 200000u);
  EXPECT_EQ(e.mean_power, 0.0);
}

TEST(EstimateFdr, HalfNullEqualsHalfAlpha) {
  auto m = model(ModelKind::independent_uniform, 10, 5);
  m.signal = 0.1;
  const auto e = estimate_fdr(m, {ProcedureKind::bh, 0.1}, 200000, 11);
  EXPECT_NEAR(e.mean_fdp, 0.05, 0.01);
  EXPECT_GT(e.mean_power, 0.1);
}

TEST(EstimateFdr, NegligibleLevelNeverRejects) {
  for (const auto kind : {ModelKind::independent_uniform, ModelKind::gaussian_one_factor,
                          ModelKind::discrete_adversarial_p}) {
    auto m = model(kind, 10, 10);
    const auto e = estimate_fdr(m, {ProcedureKind::bh, 1e-9}, 10000, 3);
    EXPECT_EQ(e.mean_fdp, 0.0) << to_string(kind);
  }
}

TEST(EstimateFdr, ReproducibleAcrossWorkerCounts) {
  auto m = model(ModelKind::gaussian_one_factor, 20, 10);
  m.rho = 0.5;
  const auto a = estimate_fdr(m, {ProcedureKind::bh, 0.1}, 20000, 5, 1);
  const auto b = estimate_fdr(m, {ProcedureKind::bh, 0.1}, 20000, 5, 4);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.mean_fdp), std::bit_cast<std::uint64_t>(b.mean_fdp));
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.std_error), std::bit_cast<std::uint64_t>(b.std_error));
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.mean_power), std::bit_cast<std::uint64_t>(b.mean_power));
}

TEST(EstimateFdr, StressorExceedsTheIndependentRate) {
  const auto m = model(ModelKind::discrete_adversarial_p, 20, 20);
  const auto e = estimate_fdr(m, {ProcedureKind::bh, 0.1}, 100000, 12);
  // Exact value 2 alpha K0^2 / (K (K0 + 1)).
  EXPECT_NEAR(e.mean_fdp, 2 * 0.1 * 400 / (20.0 * 21), 4 * e.std_error);
  EXPECT_GT(e.mean_fdp, 0.1);
  EXPECT_LE(e.mean_fdp, fdr_bound(m, {ProcedureKind::bh, 0.1}).value);
}

TEST(EstimateFdr, MismatchedProcedureIsRejected) {
  EXPECT_THROW(estimate_fdr(model(ModelKind::comonotone_evalue, 5, 5), {ProcedureKind::bh, 0.1}, 10, 0),
               std::invalid_argument);
  EXPECT_THROW(estimate_fdr(model(ModelKind::independent_uniform, 5, 5), {ProcedureKind::ebh, 0.1}, 10, 0),
               std::invalid_argument);
  EXPECT_THROW(estimate_fdr(model(ModelKind::independent_uniform, 5, 5), {ProcedureKind::bh, 0.1}, 0, 0),
               DomainError);
}

TEST(FdrBound, Regimes) {
  const ProcedureSpec bh{ProcedureKind::bh, 0.1};
  EXPECT_DOUBLE_EQ(fdr_bound(model(ModelKind::independent_uniform, 10, 4), bh).value, 0.04);
  EXPECT_DOUBLE_EQ(fdr_bound(model(ModelKind::gaussian_one_factor, 10, 4), bh).value, 0.04);
  EXPECT_DOUBLE_EQ(fdr_bound(model(ModelKind::discrete_adversarial_p, 10, 4), bh).value,
                   harmonic_number(10) * 0.04);
  EXPECT_DOUBLE_EQ(fdr_bound(model(ModelKind::discrete_adversarial_p, 10, 4), {ProcedureKind::by, 0.1}).value,
                   0.04);
  EXPECT_DOUBLE_EQ(fdr_bound(model(ModelKind::comonotone_evalue, 10, 4), {ProcedureKind::ebh, 0.1}).value,
                   0.04);
}

TEST(Martingale, OptionalStoppingAndGrid) {
  const auto d = martingale_diagnostics(model(ModelKind::independent_uniform, 10, 10), 0.1, 50000, 1);
  EXPECT_NEAR(d.stopped.mean, 10.0, 3 * d.stopped.std_error);
  ASSERT_EQ(d.grid.size(), 5u);
  for (std::size_t g = 0; g < d.grid.size(); ++g) {
    EXPECT_NEAR(d.at_grid[g].mean, 10.0, 3 * d.at_grid[g].std_error + 1e-12) << d.grid[g];
  }
  EXPECT_EQ(d.at_grid.back().mean, 10.0);
  EXPECT_EQ(d.at_grid.back().std_error, 0.0);
}

TEST(Martingale, NoNullsGivesZeros) {
  const auto d = martingale_diagnostics(model(ModelKind::independent_uniform, 10, 0), 0.1, 1000, 1);
  EXPECT_EQ(d.stopped.mean, 0.0);
  for (const auto& m : d.at_grid) EXPECT_EQ(m.mean, 0.0);
}

TEST(Martingale, OtherModelsAreRejected) {
  EXPECT_THROW(martingale_diagnostics(model(ModelKind::gaussian_one_factor, 10, 10), 0.1, 10, 1),
               std::invalid_argument);
}

TEST(Simes, UniformUnderIndependentGlobalNull) {
  const auto s = simes_samples(model(ModelKind::independent_uniform, 5, 5), 100000, 2);
  EXPECT_LT(ks_distance_to_uniform(s), 0.006);
}

TEST(Stats, KsDistanceToUniform) {
  EXPECT_DOUBLE_EQ(ks_distance_to_uniform({0.5}), 0.5);
  std::vector<double> even;
  for (int i = 0; i < 100; ++i) even.push_back((i + 0.5) / 100.0);
  EXPECT_NEAR(ks_distance_to_uniform(even), 0.005, 1e-12);
  EXPECT_DOUBLE_EQ(ks_distance({0.1, 0.2}, {0.1, 0.2}), 0.0);
  EXPECT_DOUBLE_EQ(ks_distance({0.1, 0.2}, {0.3, 0.4}), 1.0);
}

}  // namespace
}  // namespace fdrkit
