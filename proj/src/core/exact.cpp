#include "fdrkit/exact.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace fdrkit::exact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Products below this may lose bits of their fma residual to underflow.
constexpr double kTinyProduct = 0x1p-900;
// Relative error of fl(fl(a*b)*c) is below 2^-52; anything outside this
// band around d is decided without the exact path.
constexpr double kFilterMargin = 0x1p-50;

double next_up(double x) noexcept { return std::nextafter(x, kInf); }
double next_down(double x) noexcept { return std::nextafter(x, -kInf); }

}  // namespace

TwoTerm two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

TwoTerm two_product(double a, double b) noexcept {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

int sign_of_sum(std::span<const double> terms) noexcept {
  // Shewchuk's grow-expansion: the running expansion stays nonoverlapping
  // with components in increasing magnitude, so its sign is the sign of the
  // last nonzero component.
  std::array<double, 9> expansion{};
  std::size_t length = 0;
  for (const double term : terms) {
    double carry = term;
    for (std::size_t i = 0; i < length; ++i) {
      const TwoTerm s = two_sum(carry, expansion[i]);
      expansion[i] = s.lo;
      carry = s.hi;
    }
    expansion[length++] = carry;
    if (length == expansion.size()) break;
  }
  for (std::size_t i = length; i-- > 0;) {
    if (expansion[i] > 0) return 1;
    if (expansion[i] < 0) return -1;
  }
  return 0;
}

bool product_le(double a, double b, double c, double d) noexcept {
  const double lhs = a * b;
  const double rhs = c * d;
  // Rounding is monotone, so distinct rounded products order the exact ones.
  if (lhs != rhs) return lhs < rhs;
  if (lhs < kTinyProduct) {
    if (a == 0 || b == 0) return true;
    if (c == 0 || d == 0) return false;
    return product_le(std::ldexp(a, 600), b, std::ldexp(c, 600), d);
  }
  return std::fma(a, b, -lhs) <= std::fma(c, d, -rhs);
}

int compare_triple_product(double a, double b, double c, double d) noexcept {
  if (a == 0 || b == 0 || c == 0) return -1;
  const double approx = (a * b) * c;
  if (approx == kInf) return 1;
  if (approx > d * (1 + kFilterMargin)) return 1;
  if (approx < d * (1 - kFilterMargin)) return -1;

  const TwoTerm ab = two_product(a, b);
  const TwoTerm hi = two_product(ab.hi, c);
  const TwoTerm lo = two_product(ab.lo, c);
  const std::array<double, 5> terms{-d, lo.lo, lo.hi, hi.lo, hi.hi};
  return sign_of_sum(terms);
}

double ratio_round_up(double a, double b, double c) noexcept {
  double r = (a * b) / c;
  if (r == kInf) return r;
  while (!product_le(a, b, r, c)) r = next_up(r);
  while (r > 0 && product_le(a, b, next_down(r), c)) r = next_down(r);
  return r;
}

double ratio_round_down(double a, double b, double c) noexcept {
  double r = (a * b) / c;
  while (r > 0 && !product_le(r, c, a, b)) r = next_down(r);
  while (product_le(next_up(r), c, a, b)) r = next_up(r);
  return r;
}

double reciprocal_round_up(double num, double a, double b) noexcept {
  double r = num / (a * b);
  if (r == kInf) return r;
  while (compare_triple_product(r, a, b, num) < 0) r = next_up(r);
  while (r > 0 && compare_triple_product(next_down(r), a, b, num) >= 0) {
    r = next_down(r);
  }
  return r;
}

double ceil_ratio(double a, double b, double c) noexcept {
  double g = std::ceil((a * b) / c);
  while (g > 0 && product_le(a, b, c, g - 1)) g -= 1;
  while (!product_le(a, b, c, g)) g += 1;
  return g;
}

}  // namespace fdrkit::exact
