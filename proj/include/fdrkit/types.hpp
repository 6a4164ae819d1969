#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdrkit {

/// Raised when an input lies outside the domain a procedure is defined on.
/// `position()` is the offending element index when one applies.
class DomainError : public std::domain_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit DomainError(const std::string& what, std::size_t position = npos)
      : std::domain_error(what), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Realized p-values p_1..p_K. Every entry is finite and in [0, 1]; K >= 1.
class PValueVector {
 public:
  explicit PValueVector(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Copy with entry `k` replaced by `value` (validated).
  PValueVector with(std::size_t k, double value) const;

 private:
  std::vector<double> values_;
};

/// Realized e-values e_1..e_K in [0, +inf]; K >= 1.
class EValueVector {
 public:
  explicit EValueVector(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

 private:
  std::vector<double> values_;
};

/// Which hypotheses are true nulls. Known to simulators, never to procedures.
class TruthAssignment {
 public:
  TruthAssignment() = default;
  explicit TruthAssignment(std::vector<std::uint8_t> is_null);

  /// First `null_count` of `size` hypotheses are null.
  static TruthAssignment leading_nulls(std::size_t size, std::size_t null_count);

  std::size_t size() const noexcept { return is_null_.size(); }
  bool is_null(std::size_t k) const { return is_null_[k] != 0; }
  std::size_t null_count() const noexcept { return null_count_; }
  std::span<const std::uint8_t> mask() const noexcept { return is_null_; }

 private:
  std::vector<std::uint8_t> is_null_;
  std::size_t null_count_ = 0;
};

/// Output of a step-up procedure. Indices are 0-based and sorted ascending.
///
/// For p-value procedures `threshold` is the largest double t with
/// K*t <= level*max(k_star, 1), so `rejected` is exactly {k : p_k <= threshold}.
/// For e-value procedures it is the smallest double c with
/// c*level*max(k_star, 1) >= K, so `rejected` is exactly {k : e_k >= threshold}.
struct RejectionResult {
  std::size_t K = 0;
  std::size_t k_star = 0;
  std::vector<std::size_t> rejected;
  double threshold = 0.0;

  std::size_t r() const noexcept { return rejected.size(); }
  bool rejects(std::size_t k) const;
};

struct FdpOutcome {
  std::size_t false_discoveries = 0;
  std::size_t discoveries = 0;
  double fdp = 0.0;
};

}  // namespace fdrkit
