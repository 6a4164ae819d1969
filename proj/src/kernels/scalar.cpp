#include <bit>
#include <cstdint>
#include <limits>

#include "detail.hpp"
#include "fdrkit/exact.hpp"
#include "fdrkit/kernels.hpp"

namespace fdrkit::kernels {

namespace detail {

bool evalue_passes(double e, double rank, double scale, double level) noexcept {
  if (e == 0) return false;
  return exact::compare_triple_product(level, e, rank, scale) >= 0;
}

double simes_finalize(std::span<const double> ascending,
                      double approximate_min) noexcept {
  const double n = static_cast<double>(ascending.size());
  const double cutoff = approximate_min * (1 + 0x1p-48) + 0x1p-1020;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ascending.size(); ++i) {
    const double rank = static_cast<double>(i + 1);
    const double q = (n * ascending[i]) / rank;
    if (q > cutoff) continue;
    const double exact_up = exact::ratio_round_up(n, ascending[i], rank);
    if (exact_up < best) best = exact_up;
  }
  return best;
}

}  // namespace detail

namespace {

std::size_t step_up_count(std::span<const double> ascending, double scale,
                          double level) {
  for (std::size_t k = ascending.size(); k > 0; --k) {
    if (exact::product_le(scale, ascending[k - 1], level,
                          static_cast<double>(k))) {
      return k;
    }
  }
  return 0;
}

std::size_t step_up_count_evalues(std::span<const double> descending,
                                  double scale, double level) {
  for (std::size_t k = descending.size(); k > 0; --k) {
    if (detail::evalue_passes(descending[k - 1], static_cast<double>(k), scale,
                              level)) {
      return k;
    }
  }
  return 0;
}

std::size_t count_at_most(std::span<const double> values, double t) {
  std::size_t count = 0;
  for (const double v : values) count += (v <= t) ? 1 : 0;
  return count;
}

std::size_t count_at_most_masked(std::span<const double> values,
                                 std::span<const std::uint8_t> mask, double t) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    count += (mask[i] != 0 && values[i] <= t) ? 1 : 0;
  }
  return count;
}

double simes_min(std::span<const double> ascending) {
  const double n = static_cast<double>(ascending.size());
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ascending.size(); ++i) {
    const double q = (n * ascending[i]) / static_cast<double>(i + 1);
    if (q < m) m = q;
  }
  return detail::simes_finalize(ascending, m);
}

double exp_reference(double x) {
  using namespace detail;
  x = x < kExpClampLow ? kExpClampLow : x;
  x = x > kExpClampHigh ? kExpClampHigh : x;
  double shifted = x * kInvLn2 + kShifter;
  const std::int64_t n = std::bit_cast<std::int64_t>(shifted) -
                         std::bit_cast<std::int64_t>(kShifter);
  shifted = shifted - kShifter;
  double r = x - shifted * kLn2Hi;
  r = r - shifted * kLn2Lo;
  double poly = kExpPoly[11];
  for (int i = 10; i >= 0; --i) poly = poly * r + kExpPoly[i];
  const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(n + 1023) << 52);
  return poly * scale;
}

void normal_upper_tail(std::span<const double> z, std::span<double> out) {
  using namespace detail;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double x = z[i] * kInvSqrt2;
    const double ax = x < 0 ? -x : x;
    const double t = 1.0 / (1.0 + 0.5 * ax);
    double s = kErfcPoly[9];
    for (int j = 8; j >= 1; --j) s = s * t + kErfcPoly[j];
    s = s * t;
    const double arg = (-(ax * ax) + kErfcPoly[0]) + s;
    const double tail = t * exp_reference(arg);
    const double erfc = x >= 0 ? tail : 2.0 - tail;
    out[i] = 0.5 * erfc;
  }
}

constexpr KernelTable kScalarTable{
    "scalar",      &step_up_count, &step_up_count_evalues, &count_at_most,
    &count_at_most_masked, &simes_min,     &normal_upper_tail,
};

}  // namespace

const KernelTable& scalar() noexcept { return kScalarTable; }

}  // namespace fdrkit::kernels
