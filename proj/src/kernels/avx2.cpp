// AVX2+FMA kernel variants. Only functions carrying the target attribute are
// compiled for AVX2, so nothing here leaks wider instructions into code that
// runs before dispatch.

#include "fdrkit/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define FDRKIT_AVX2_AVAILABLE 1
#endif

#ifdef FDRKIT_AVX2_AVAILABLE

#include <immintrin.h>

#include <cstdint>
#include <cstring>
#include <limits>

#include "detail.hpp"
#include "fdrkit/exact.hpp"

#define FDRKIT_TARGET_AVX2 __attribute__((target("avx2,fma")))

namespace fdrkit::kernels {

namespace {

// Lanes in which scale*x <= level*k holds exactly (same rule as
// exact::product_le on normal-range products).
FDRKIT_TARGET_AVX2 inline __m256d product_le_lanes(__m256d scale, __m256d x,
                                                   __m256d level, __m256d k) {
  const __m256d lhs = _mm256_mul_pd(scale, x);
  const __m256d rhs = _mm256_mul_pd(level, k);
  const __m256d lhs_lo = _mm256_fmsub_pd(scale, x, lhs);
  const __m256d rhs_lo = _mm256_fmsub_pd(level, k, rhs);
  const __m256d less = _mm256_cmp_pd(lhs, rhs, _CMP_LT_OQ);
  const __m256d equal = _mm256_cmp_pd(lhs, rhs, _CMP_EQ_OQ);
  const __m256d lo_le = _mm256_cmp_pd(lhs_lo, rhs_lo, _CMP_LE_OQ);
  return _mm256_or_pd(less, _mm256_and_pd(equal, lo_le));
}

FDRKIT_TARGET_AVX2 inline __m256d rank_lanes(std::size_t first_rank) {
  const double base = static_cast<double>(first_rank);
  return _mm256_add_pd(_mm256_set1_pd(base), _mm256_setr_pd(0.0, 1.0, 2.0, 3.0));
}

inline int highest_lane(int mask) { return 31 - __builtin_clz(static_cast<unsigned>(mask)); }

FDRKIT_TARGET_AVX2 std::size_t step_up_count(std::span<const double> ascending,
                                             double scale, double level) {
  // Residuals of products this small are not exact; the reference handles it.
  if (level < 0x1p-900) return scalar().step_up_count(ascending, scale, level);

  const std::size_t n = ascending.size();
  const std::size_t full = n - n % 4;
  for (std::size_t k = n; k > full; --k) {
    if (exact::product_le(scale, ascending[k - 1], level, static_cast<double>(k))) return k;
  }

  const __m256d vscale = _mm256_set1_pd(scale);
  const __m256d vlevel = _mm256_set1_pd(level);
  for (std::size_t block = full; block > 0; block -= 4) {
    const std::size_t first = block - 4;
    const __m256d x = _mm256_loadu_pd(ascending.data() + first);
    const __m256d pass = product_le_lanes(vscale, x, vlevel, rank_lanes(first + 1));
    const int mask = _mm256_movemask_pd(pass);
    if (mask != 0) return first + 1 + static_cast<std::size_t>(highest_lane(mask));
  }
  return 0;
}

FDRKIT_TARGET_AVX2 std::size_t step_up_count_evalues(
    std::span<const double> descending, double scale, double level) {
  const std::size_t n = descending.size();
  const std::size_t full = n - n % 4;
  for (std::size_t k = n; k > full; --k) {
    if (detail::evalue_passes(descending[k - 1], static_cast<double>(k), scale, level)) {
      return k;
    }
  }

  const __m256d vlevel = _mm256_set1_pd(level);
  const __m256d upper = _mm256_set1_pd(scale * (1 + 0x1p-50));
  const __m256d lower = _mm256_set1_pd(scale * (1 - 0x1p-50));
  for (std::size_t block = full; block > 0; block -= 4) {
    const std::size_t first = block - 4;
    const __m256d e = _mm256_loadu_pd(descending.data() + first);
    const __m256d approx = _mm256_mul_pd(_mm256_mul_pd(vlevel, e), rank_lanes(first + 1));
    const int sure = _mm256_movemask_pd(_mm256_cmp_pd(approx, upper, _CMP_GT_OQ));
    const int unsure = _mm256_movemask_pd(_mm256_cmp_pd(approx, lower, _CMP_GE_OQ)) & ~sure;
    // Highest rank first: an unsure lane above every sure lane must be
    // resolved before the sure lane can be reported.
    for (int lane = 3; lane >= 0; --lane) {
      const int bit = 1 << lane;
      if (sure & bit) return first + 1 + static_cast<std::size_t>(lane);
      if (unsure & bit) {
        const std::size_t k = first + 1 + static_cast<std::size_t>(lane);
        if (detail::evalue_passes(descending[k - 1], static_cast<double>(k), scale, level)) {
          return k;
        }
      }
    }
  }
  return 0;
}

FDRKIT_TARGET_AVX2 std::size_t count_at_most(std::span<const double> values, double t) {
  const std::size_t n = values.size();
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(values.data() + i);
    count += static_cast<std::size_t>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(v, vt, _CMP_LE_OQ)))));
  }
  for (; i < n; ++i) count += (values[i] <= t) ? 1 : 0;
  return count;
}

FDRKIT_TARGET_AVX2 std::size_t count_at_most_masked(std::span<const double> values,
                                                    std::span<const std::uint8_t> mask,
                                                    double t) {
  const std::size_t n = values.size();
  const __m256d vt = _mm256_set1_pd(t);
  const __m256i zero = _mm256_setzero_si256();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    std::int32_t packed;
    std::memcpy(&packed, mask.data() + i, sizeof packed);
    const __m256i flags = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
    const __m256d selected = _mm256_castsi256_pd(
        _mm256_xor_si256(_mm256_cmpeq_epi64(flags, zero), _mm256_set1_epi64x(-1)));
    const __m256d v = _mm256_loadu_pd(values.data() + i);
    const __m256d hit = _mm256_and_pd(selected, _mm256_cmp_pd(v, vt, _CMP_LE_OQ));
    count += static_cast<std::size_t>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(hit))));
  }
  for (; i < n; ++i) count += (mask[i] != 0 && values[i] <= t) ? 1 : 0;
  return count;
}

FDRKIT_TARGET_AVX2 double simes_min(std::span<const double> ascending) {
  const std::size_t n = ascending.size();
  const double size = static_cast<double>(n);
  const __m256d vsize = _mm256_set1_pd(size);
  __m256d vmin = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(ascending.data() + i);
    const __m256d q = _mm256_div_pd(_mm256_mul_pd(vsize, x), rank_lanes(i + 1));
    vmin = _mm256_min_pd(vmin, q);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmin);
  double m = lanes[0];
  for (int lane = 1; lane < 4; ++lane) m = lanes[lane] < m ? lanes[lane] : m;
  for (; i < n; ++i) {
    const double q = (size * ascending[i]) / static_cast<double>(i + 1);
    m = q < m ? q : m;
  }
  return detail::simes_finalize(ascending, m);
}

FDRKIT_TARGET_AVX2 inline __m256d exp_lanes(__m256d x) {
  using namespace detail;
  x = _mm256_max_pd(x, _mm256_set1_pd(kExpClampLow));
  x = _mm256_min_pd(x, _mm256_set1_pd(kExpClampHigh));
  const __m256d shifter = _mm256_set1_pd(kShifter);
  __m256d shifted = _mm256_add_pd(_mm256_mul_pd(x, _mm256_set1_pd(kInvLn2)), shifter);
  const __m256i n = _mm256_sub_epi64(_mm256_castpd_si256(shifted), _mm256_castpd_si256(shifter));
  shifted = _mm256_sub_pd(shifted, shifter);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(shifted, _mm256_set1_pd(kLn2Hi)));
  r = _mm256_sub_pd(r, _mm256_mul_pd(shifted, _mm256_set1_pd(kLn2Lo)));
  __m256d poly = _mm256_set1_pd(kExpPoly[11]);
  for (int i = 10; i >= 0; --i) {
    poly = _mm256_add_pd(_mm256_mul_pd(poly, r), _mm256_set1_pd(kExpPoly[i]));
  }
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(poly, _mm256_castsi256_pd(bits));
}

FDRKIT_TARGET_AVX2 void normal_upper_tail(std::span<const double> z, std::span<double> out) {
  using namespace detail;
  const std::size_t n = z.size();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_mul_pd(_mm256_loadu_pd(z.data() + i), _mm256_set1_pd(kInvSqrt2));
    const __m256d ax = _mm256_max_pd(x, _mm256_sub_pd(zero, x));
    const __m256d t = _mm256_div_pd(one, _mm256_add_pd(one, _mm256_mul_pd(half, ax)));
    __m256d s = _mm256_set1_pd(kErfcPoly[9]);
    for (int j = 8; j >= 1; --j) {
      s = _mm256_add_pd(_mm256_mul_pd(s, t), _mm256_set1_pd(kErfcPoly[j]));
    }
    s = _mm256_mul_pd(s, t);
    const __m256d arg = _mm256_add_pd(
        _mm256_add_pd(_mm256_sub_pd(zero, _mm256_mul_pd(ax, ax)), _mm256_set1_pd(kErfcPoly[0])), s);
    const __m256d tail = _mm256_mul_pd(t, exp_lanes(arg));
    const __m256d negative = _mm256_cmp_pd(x, zero, _CMP_LT_OQ);
    const __m256d erfc = _mm256_blendv_pd(tail, _mm256_sub_pd(two, tail), negative);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(half, erfc));
  }
  if (i < n) scalar().normal_upper_tail(z.subspan(i), out.subspan(i));
}

constexpr KernelTable kAvx2Table{
    "avx2",        &step_up_count, &step_up_count_evalues, &count_at_most,
    &count_at_most_masked, &simes_min,     &normal_upper_tail,
};

}  // namespace

namespace detail {
const KernelTable* avx2_table() noexcept { return &kAvx2Table; }
}  // namespace detail

}  // namespace fdrkit::kernels

#else

namespace fdrkit::kernels::detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace fdrkit::kernels::detail

#endif
