#include "fdrkit/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fdrkit {

namespace {

void check_pvalue(double value, std::size_t k) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw DomainError("p-value at position " + std::to_string(k + 1) +
                          " is outside [0, 1]",
                      k);
  }
}

}  // namespace

PValueVector::PValueVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("p-value vector is empty");
  for (std::size_t k = 0; k < values_.size(); ++k) check_pvalue(values_[k], k);
}

PValueVector PValueVector::with(std::size_t k, double value) const {
  if (k >= values_.size()) {
    throw std::out_of_range("hypothesis index " + std::to_string(k) + " out of range");
  }
  check_pvalue(value, k);
  PValueVector copy = *this;
  copy.values_[k] = value;
  return copy;
}

EValueVector::EValueVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("e-value vector is empty");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    // NaN fails the comparison and lands here too.
    if (!(values_[k] >= 0.0)) {
      throw DomainError("e-value at position " + std::to_string(k + 1) + " is negative",
                        k);
    }
  }
}

TruthAssignment::TruthAssignment(std::vector<std::uint8_t> is_null)
    : is_null_(std::move(is_null)) {
  null_count_ = static_cast<std::size_t>(
      std::count_if(is_null_.begin(), is_null_.end(), [](std::uint8_t f) { return f != 0; }));
}

TruthAssignment TruthAssignment::leading_nulls(std::size_t size, std::size_t null_count) {
  if (null_count > size) {
    throw std::invalid_argument("null count exceeds number of hypotheses");
  }
  std::vector<std::uint8_t> flags(size, 0);
  std::fill_n(flags.begin(), null_count, std::uint8_t{1});
  return TruthAssignment(std::move(flags));
}

bool RejectionResult::rejects(std::size_t k) const {
  return std::binary_search(rejected.begin(), rejected.end(), k);
}

}  // namespace fdrkit
