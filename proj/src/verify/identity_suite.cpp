#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fault_injection.hpp"
#include "fdrkit/core.hpp"
#include "fdrkit/exact.hpp"
#include "fdrkit/rng.hpp"
#include "fdrkit/verify.hpp"
#include "oracle_detail.hpp"

namespace fdrkit::verify {

namespace {

using detail::Rational;
using detail::to_rational;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFixedLevels[] = {0.05, 0.1, 0.2, 0.125, 0.25, 0.5};

enum Check : std::size_t {
  kThreshold,
  kLeaveOneOut,
  kSimesLink,
  kCalibrated,
  kBhOracle,
  kDuality,
  kEbhOracle,
  kSelfConsistency,
  kCheckCount,
};

constexpr const char* kCheckNames[kCheckCount] = {
    "threshold_characterization", "leave_one_out_identity", "simes_bh_link",
    "calibrated_equivalence",     "bh_oracle_agreement",    "reciprocal_duality",
    "ebh_oracle_agreement",       "ebh_self_consistency",
};

std::string render(const char* label, std::span<const double> values, double alpha) {
  std::ostringstream out;
  out.precision(17);
  out << "K=" << values.size() << " alpha=" << alpha << ' ' << label << "=[";
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? ", " : "") << values[i];
  out << ']';
  return out.str();
}

class Reports {
 public:
  Reports() {
    for (std::size_t c = 0; c < kCheckCount; ++c) reports_[c].check_name = kCheckNames[c];
  }

  template <class Describe>
  void record(Check check, bool ok, Describe describe) {
    CheckReport& report = reports_[check];
    ++report.cases_run;
    if (ok) return;
    if (report.failures++ == 0) report.first_failure = describe();
  }

  std::vector<CheckReport> take() { return {reports_.begin(), reports_.end()}; }

 private:
  std::array<CheckReport, kCheckCount> reports_;
};

// Smallest r with K p <= alpha r, i.e. ceil(K p / alpha), in exact arithmetic.
std::size_t first_passing_rank(double p, double alpha, std::size_t K) {
  const Rational ratio = Rational(static_cast<long long>(K)) * to_rational(p) / to_rational(alpha);
  const auto num = boost::multiprecision::numerator(ratio);
  const auto den = boost::multiprecision::denominator(ratio);
  boost::multiprecision::cpp_int q = num / den;
  if (q * den != num) ++q;
  return q > K + 1 ? K + 1 : static_cast<std::size_t>(q);
}

std::vector<std::size_t> indices_at_most(std::span<const double> values, double t) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] <= t) out.push_back(k);
  }
  return out;
}

void check_p_case(const PValueVector& p, double alpha, const testing::BhFunction& bh,
                  Reports& reports) {
  const std::size_t K = p.size();
  const auto describe = [&] { return render("p", p.values(), alpha); };
  const RejectionResult result = bh(p, alpha);

  {
    // t is the largest double with K t <= alpha max(k*, 1), and it splits
    // the p-values into exactly the rejected set.
    const double t = result.threshold;
    const Rational bound = to_rational(alpha) *
                           Rational(static_cast<long long>(std::max<std::size_t>(result.r(), 1)));
    const Rational Kr(static_cast<long long>(K));
    const bool below = Kr * to_rational(t) <= bound;
    const bool maximal = Kr * to_rational(std::nextafter(t, kInf)) > bound;
    const bool split = indices_at_most(p.values(), t) == result.rejected;
    const bool count = result.k_star == result.r();
    reports.record(kThreshold, below && maximal && split && count, describe);
  }

  {
    const std::size_t R = result.r();
    bool ok = true;
    for (std::size_t k = 0; k < K && ok; ++k) {
      const std::size_t Rk = bh(p.with(k, 0.0), alpha).r();
      const std::size_t first = first_passing_rank(p[k], alpha, K);
      ok = Rk >= 1;
      for (std::size_t r = 1; r <= K && ok; ++r) {
        const bool small = r >= first;
        ok = (small && R == r) == (small && Rk == r);
      }
    }
    reports.record(kLeaveOneOut, ok, describe);
  }

  reports.record(kSimesLink, (simes_statistic(p) <= alpha) == (result.r() > 0), describe);

  {
    const Calibrator calibrator(K, alpha);
    const RejectionResult via_e =
        fdrkit::detail::ebh_at_level(calibrator.apply(p), calibrator.alpha_prime());
    reports.record(kCalibrated, via_e.rejected == result.rejected, describe);
  }

  reports.record(kBhOracle, bh_oracle(p, alpha) == result.rejected, describe);
}

void check_e_case(const EValueVector& e, double alpha, const testing::BhFunction& bh,
                  Reports& reports) {
  const std::size_t K = e.size();
  const auto describe = [&] { return render("e", e.values(), alpha); };
  const RejectionResult result = ebh_procedure(e, alpha);

  {
    std::vector<double> reciprocal;
    for (const double v : e.values()) reciprocal.push_back(v <= 1.0 ? 1.0 : 1.0 / v);
    const RejectionResult via_p = bh(PValueVector(std::move(reciprocal)), alpha);
    reports.record(kDuality, via_p.rejected == result.rejected, describe);
  }

  reports.record(kEbhOracle, ebh_oracle(e, alpha) == result.rejected, describe);

  {
    bool ok = is_self_consistent(e, alpha, result.rejected);
    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return e[a] > e[b]; });
    for (std::size_t size = result.r() + 1; size <= K && ok; ++size) {
      ok = !is_self_consistent(e, alpha, std::span(order).first(size));
    }
    reports.record(kSelfConsistency, ok, describe);
  }
}

double draw_level(SplitMix64& rng) {
  if (rng.below(2) == 0) return kFixedLevels[rng.below(std::size(kFixedLevels))];
  return 0.005 + 0.6 * rng.uniform();
}

// Continuous values mixed with values on and next to the BH grid alpha j / K,
// exact zeros and ones, and repeats, so ties and boundaries come up often.
std::vector<double> draw_pvalues(SplitMix64& rng, std::size_t K, double alpha) {
  std::vector<double> p(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double grid = alpha * static_cast<double>(1 + rng.below(K)) / static_cast<double>(K);
    switch (rng.below(7)) {
      case 0:
        p[k] = rng.uniform();
        break;
      case 1:
        p[k] = alpha * rng.uniform();
        break;
      case 2:
        p[k] = grid;
        break;
      case 3:
        p[k] = std::nextafter(grid, rng.below(2) ? 0.0 : 1.0);
        break;
      case 4:
        p[k] = rng.below(2) ? 0.0 : 1.0;
        break;
      case 5:
        p[k] = exact::ratio_round_down(alpha, static_cast<double>(1 + rng.below(K)),
                                       static_cast<double>(K));
        break;
      default:
        p[k] = k > 0 ? p[rng.below(k)] : rng.uniform();
        break;
    }
  }
  return p;
}

// Powers of two keep 1/e exact, so reciprocal duality is tested right on
// the cutoffs when alpha is dyadic too.
std::vector<double> draw_evalues(SplitMix64& rng, std::size_t K) {
  std::vector<double> e(K);
  for (std::size_t k = 0; k < K; ++k) {
    switch (rng.below(5)) {
      case 0:
      case 1:
        e[k] = std::ldexp(1.0, static_cast<int>(rng.below(12)) - 3);
        break;
      case 2:
        e[k] = 1.0 / rng.uniform();
        break;
      case 3:
        e[k] = rng.below(2) ? 0.0 : kInf;
        break;
      default:
        e[k] = k > 0 ? e[rng.below(k)] : 1.0;
        break;
    }
  }
  return e;
}

}  // namespace

std::vector<CheckReport> check_identities(const PValueVector& p, double alpha) {
  fdrkit::detail::check_level(alpha);
  const testing::BhFunction bh = [](const PValueVector& v, double a) { return bh_procedure(v, a); };
  Reports reports;
  check_p_case(p, alpha, bh, reports);
  std::vector<double> e;
  for (const double v : p.values()) e.push_back(v == 0.0 ? kInf : 1.0 / v);
  check_e_case(EValueVector(std::move(e)), alpha, bh, reports);
  return reports.take();
}

namespace testing {

std::vector<CheckReport> run_identity_suite_with(std::size_t trials, std::uint64_t seed,
                                                 const BhFunction& bh) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  Reports reports;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng(derive_seed(seed, trial));
    const std::size_t K = 1 + rng.below(20);
    const double alpha = draw_level(rng);
    check_p_case(PValueVector(draw_pvalues(rng, K, alpha)), alpha, bh, reports);
    check_e_case(EValueVector(draw_evalues(rng, K)), alpha, bh, reports);
  }
  return reports.take();
}

}  // namespace testing

std::vector<CheckReport> run_identity_suite(std::size_t trials, std::uint64_t seed) {
  return testing::run_identity_suite_with(
      trials, seed, [](const PValueVector& p, double alpha) { return bh_procedure(p, alpha); });
}

CheckReport exhaustive_oracle_grid(std::size_t max_K, std::size_t steps,
                                   std::vector<double> alphas) {
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  CheckReport report;
  report.check_name = "bh_oracle_exhaustive";
  for (std::size_t K = 1; K <= max_K; ++K) {
    std::vector<std::size_t> digits(K, 0);
    std::vector<double> values(K);
    for (;;) {
      for (std::size_t k = 0; k < K; ++k) {
        values[k] = static_cast<double>(digits[k]) / static_cast<double>(steps);
      }
      const PValueVector p(values);
      for (const double alpha : alphas) {
        ++report.cases_run;
        if (bh_oracle(p, alpha) != bh_procedure(p, alpha).rejected && report.failures++ == 0) {
          report.first_failure = render("p", values, alpha);
        }
      }
      std::size_t k = 0;
      while (k < K && ++digits[k] > steps) digits[k++] = 0;
      if (k == K) break;
    }
  }
  return report;
}

CheckReport random_oracle_check(std::size_t trials, std::uint64_t seed, std::size_t max_K) {
  if (max_K < 1) throw std::invalid_argument("max_K must be at least 1");
  CheckReport report;
  report.check_name = "bh_oracle_random";
  for (std::size_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng(derive_seed(seed, trial));
    const std::size_t K = 1 + rng.below(max_K);
    const double alpha = draw_level(rng);
    const std::vector<double> values = draw_pvalues(rng, K, alpha);
    const PValueVector p(values);
    ++report.cases_run;
    if (bh_oracle(p, alpha) != bh_procedure(p, alpha).rejected && report.failures++ == 0) {
      report.first_failure = render("p", values, alpha);
    }
  }
  return report;
}

}  // namespace fdrkit::verify
