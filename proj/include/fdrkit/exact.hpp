#pragma once

// Error-free transformations and exactly-decided comparisons on doubles.
//
// Every rejection decision in the library reduces to one of two questions
// about real numbers built from doubles and small integers:
//
//   K * p <= alpha * k          (BH, threshold membership, calibrator steps)
//   alpha * k * e >= K          (e-BH, self-consistency)
//
// Both are answered exactly, so the result never depends on rounding, and
// reported reals (thresholds, Simes statistic, calibrated e-values) are
// rounded in the direction that keeps their comparison with the level exact.

#include <span>

namespace fdrkit::exact {

struct TwoTerm {
  double hi;
  double lo;
};

/// hi + lo == a + b exactly, hi = fl(a + b).
TwoTerm two_sum(double a, double b) noexcept;

/// hi + lo == a * b exactly, hi = fl(a * b). Requires no underflow in lo.
TwoTerm two_product(double a, double b) noexcept;

/// Sign (-1, 0, 1) of the exact sum of up to 8 finite terms.
int sign_of_sum(std::span<const double> terms) noexcept;

/// a*b <= c*d, decided exactly. All arguments finite and >= 0.
bool product_le(double a, double b, double c, double d) noexcept;

/// Sign of a*b*c - d, decided exactly. a, b, c >= 0 (b may be +inf when a
/// and c are nonzero); d > 0 finite and not subnormal.
int compare_triple_product(double a, double b, double c, double d) noexcept;

/// Smallest double r >= a*b/c. a, b >= 0 finite; c > 0.
double ratio_round_up(double a, double b, double c) noexcept;

/// Largest double r <= a*b/c. a, b >= 0 finite; c > 0.
double ratio_round_down(double a, double b, double c) noexcept;

/// Smallest double r >= num/(a*b). num, a, b > 0 finite.
double reciprocal_round_up(double num, double a, double b) noexcept;

/// ceil(a*b/c) as an integer-valued double. a, b >= 0 finite; c > 0.
double ceil_ratio(double a, double b, double c) noexcept;

}  // namespace fdrkit::exact
