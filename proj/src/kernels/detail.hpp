#pragma once

// Shared between kernel variants. Everything here is out-of-line or
// constexpr data so no function body is compiled under two instruction sets.

#include <cstddef>
#include <span>

namespace fdrkit::kernels::detail {

// exp(x) by Cody-Waite reduction and a degree-11 Taylor polynomial. The
// scalar and AVX2 variants evaluate exactly this operation sequence.
inline constexpr double kExpClampLow = -700.0;
inline constexpr double kExpClampHigh = 700.0;
inline constexpr double kInvLn2 = 1.4426950408889634;
inline constexpr double kShifter = 0x1.8p52;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kExpPoly[12] = {
    1.0,
    1.0,
    1.0 / 2,
    1.0 / 6,
    1.0 / 24,
    1.0 / 120,
    1.0 / 720,
    1.0 / 5040,
    1.0 / 40320,
    1.0 / 362880,
    1.0 / 3628800,
    1.0 / 39916800,
};

// erfc(x) ~ t * exp(-x^2 + P(t)), t = 1 / (1 + |x|/2); fractional error
// below 1.2e-7 everywhere.
inline constexpr double kErfcPoly[10] = {
    -1.26551223, 1.00002368, 0.37409196, 0.09678418, -0.18628806,
    0.27886807,  -1.13520398, 1.48851587, -0.82215223, 0.17087277,
};
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

// Exact e-BH predicate for one rank; the SIMD filter defers to it.
bool evalue_passes(double e, double rank, double scale, double level) noexcept;

// Given the smallest rounded quotient n*x/k seen, resolves the exact
// rounded-up minimum among the candidates that could attain it.
double simes_finalize(std::span<const double> ascending,
                      double approximate_min) noexcept;

}  // namespace fdrkit::kernels::detail
