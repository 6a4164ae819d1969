#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "fdrkit/core.hpp"
#include "fdrkit/exact.hpp"
#include "fdrkit/kernels.hpp"

namespace fdrkit {

namespace detail {

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("level " + std::to_string(alpha) + " is outside (0, 1)");
  }
}

}  // namespace detail

namespace {

struct Ordered {
  std::vector<std::size_t> order;
  std::vector<double> values;
};

template <class Compare>
Ordered sort_with_indices(std::span<const double> values, Compare compare) {
  Ordered out;
  out.order.resize(values.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return compare(values[a], values[b]); });
  out.values.reserve(values.size());
  for (const std::size_t i : out.order) out.values.push_back(values[i]);
  return out;
}

std::vector<std::size_t> leading_indices(const Ordered& sorted, std::size_t count) {
  std::vector<std::size_t> chosen(sorted.order.begin(),
                                  sorted.order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

RejectionResult bh_procedure(const PValueVector& p, double alpha) {
  detail::check_level(alpha);
  const Ordered sorted = sort_with_indices(p.values(), std::less<>{});
  const double K = static_cast<double>(p.size());

  RejectionResult result;
  result.K = p.size();
  result.k_star = kernels::active().step_up_count(sorted.values, K, alpha);
  // Ties with p_(k*) cannot sit above rank k*: they would pass the same test.
  result.rejected = leading_indices(sorted, result.k_star);
  result.threshold = exact::ratio_round_down(
      alpha, static_cast<double>(std::max<std::size_t>(result.k_star, 1)), K);
  return result;
}

double rejection_threshold(const PValueVector& p, double alpha) {
  return bh_procedure(p, alpha).threshold;
}

CountingProcesses counting_processes(const PValueVector& p, const TruthAssignment& truth,
                                     double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("time " + std::to_string(t) + " is outside [0, 1]");
  }
  if (truth.size() != p.size()) {
    throw std::invalid_argument("truth assignment length does not match p-values");
  }
  const auto& k = kernels::active();
  CountingProcesses out;
  out.false_rejections = k.count_at_most_masked(p.values(), truth.mask(), t);
  out.rejections = std::max<std::size_t>(k.count_at_most(p.values(), t), 1);
  return out;
}

FdpOutcome fdp(const RejectionResult& result, const TruthAssignment& truth) {
  if (truth.size() != result.K) {
    throw std::invalid_argument("truth assignment length does not match result");
  }
  FdpOutcome out;
  for (const std::size_t k : result.rejected) {
    if (k >= truth.size()) throw std::out_of_range("rejected index out of range");
    if (truth.is_null(k)) ++out.false_discoveries;
  }
  out.discoveries = result.rejected.size();
  out.fdp = out.discoveries == 0 ? 0.0
                                 : static_cast<double>(out.false_discoveries) /
                                       static_cast<double>(out.discoveries);
  return out;
}

namespace detail {

RejectionResult ebh_at_level(const EValueVector& e, double level) {
  if (!(level > 0.0) || !std::isfinite(level)) {
    throw DomainError("level must be positive and finite");
  }
  const Ordered sorted = sort_with_indices(e.values(), std::greater<>{});
  const double K = static_cast<double>(e.size());

  RejectionResult result;
  result.K = e.size();
  result.k_star = kernels::active().step_up_count_evalues(sorted.values, K, level);
  result.rejected = leading_indices(sorted, result.k_star);
  result.threshold = exact::reciprocal_round_up(
      K, level, static_cast<double>(std::max<std::size_t>(result.k_star, 1)));
  return result;
}

}  // namespace detail

RejectionResult ebh_procedure(const EValueVector& e, double alpha) {
  detail::check_level(alpha);
  return detail::ebh_at_level(e, alpha);
}

bool is_self_consistent(const EValueVector& e, double alpha,
                        std::span<const std::size_t> candidate) {
  detail::check_level(alpha);
  std::vector<std::size_t> members(candidate.begin(), candidate.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty()) return true;
  if (members.back() >= e.size()) {
    throw std::out_of_range("candidate index " + std::to_string(members.back()) +
                            " out of range");
  }
  const double K = static_cast<double>(e.size());
  const double size = static_cast<double>(members.size());
  return std::all_of(members.begin(), members.end(), [&](std::size_t k) {
    return e[k] > 0 && exact::compare_triple_product(alpha, size, e[k], K) >= 0;
  });
}

double harmonic_number(std::size_t K) {
  if (K < 1) throw DomainError("harmonic number needs K >= 1");
  double sum = 0.0;
  for (std::size_t k = K; k >= 1; --k) sum += 1.0 / static_cast<double>(k);
  return sum;
}

RejectionResult by_procedure(const PValueVector& p, double alpha) {
  detail::check_level(alpha);
  return bh_procedure(p, alpha / harmonic_number(p.size()));
}

double simes_statistic(const PValueVector& p) {
  std::vector<double> ascending(p.values().begin(), p.values().end());
  std::sort(ascending.begin(), ascending.end());
  return kernels::active().simes_min(ascending);
}

std::size_t leave_one_out_rejections(const PValueVector& p, double alpha, std::size_t k) {
  return bh_procedure(p.with(k, 0.0), alpha).r();
}

}  // namespace fdrkit
