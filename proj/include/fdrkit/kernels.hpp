#pragma once

// Data-parallel inner loops behind the procedures and the simulator.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2+FMA variant. Variants are required to return results
// bit-identical to the reference: the step-up scans and counts are exact
// decisions, and the normal tail uses the same sequence of IEEE operations in
// every variant. The active table is chosen once at startup from CPUID and
// may be forced with FDRKIT_KERNELS=scalar|avx2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace fdrkit::kernels {

struct KernelTable {
  std::string_view name;

  /// Largest k in [1, n] with scale * ascending[k-1] <= level * k, exactly;
  /// 0 when no k qualifies. `ascending` must be sorted.
  std::size_t (*step_up_count)(std::span<const double> ascending, double scale,
                               double level);

  /// Largest k in [1, n] with level * k * descending[k-1] >= scale, exactly;
  /// 0 when none. `descending` must be sorted, entries in [0, +inf], scale >= 1.
  std::size_t (*step_up_count_evalues)(std::span<const double> descending,
                                       double scale, double level);

  /// |{i : values[i] <= t}|.
  std::size_t (*count_at_most)(std::span<const double> values, double t);

  /// |{i : mask[i] != 0 and values[i] <= t}|.
  std::size_t (*count_at_most_masked)(std::span<const double> values,
                                      std::span<const std::uint8_t> mask,
                                      double t);

  /// min over k of n * ascending[k-1] / k, rounded up to the nearest double.
  double (*simes_min)(std::span<const double> ascending);

  /// out[i] = 1 - Phi(z[i]) via a rational erfc approximation, absolute
  /// error below 1e-7. `out.size() >= z.size()`.
  void (*normal_upper_tail)(std::span<const double> z, std::span<double> out);
};

const KernelTable& scalar() noexcept;

/// AVX2+FMA table, or nullptr when the build or the CPU lacks support.
const KernelTable* avx2() noexcept;

/// Table used by the library.
const KernelTable& active() noexcept;

/// Force a table by name ("scalar", "avx2", "auto"). Returns false and leaves
/// the selection unchanged when the name is unknown or unsupported here.
bool select(std::string_view name) noexcept;

}  // namespace fdrkit::kernels
