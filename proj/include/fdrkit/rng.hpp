#pragma once

#include <cstdint>

namespace fdrkit {

/// SplitMix64. Replication i of a run seeded with s uses the stream seeded
/// with derive_seed(s, i), so streams never depend on scheduling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;

  /// Standard normal by Box-Muller; the second variate of each pair is kept.
  double normal() noexcept;

  /// Uniform on {0, ..., bound - 1}; bound >= 1.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// mix64(seed + (index + 1) * golden gamma).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace fdrkit
