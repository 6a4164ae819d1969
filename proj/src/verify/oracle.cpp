#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fdrkit/verify.hpp"
#include "oracle_detail.hpp"

namespace fdrkit::verify {

namespace mp = boost::multiprecision;

namespace detail {

Rational to_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("oracle needs finite values");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double fraction = std::frexp(x, &exponent);
  const auto mantissa = static_cast<std::int64_t>(std::ldexp(fraction, 53));
  exponent -= 53;
  Rational r{mp::cpp_int(mantissa)};
  if (exponent > 0) {
    r *= Rational{mp::cpp_int(1) << exponent};
  } else if (exponent < 0) {
    r /= Rational{mp::cpp_int(1) << -exponent};
  }
  return r;
}

}  // namespace detail

namespace {

using detail::Rational;
using detail::to_rational;

// Positions of `values` from smallest to largest (ties by position), by
// picking the minimum of what is left each round.
template <class Before>
std::vector<std::size_t> extraction_order(const std::vector<double>& values, Before before) {
  const std::size_t n = values.size();
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> order;
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (best == n || before(values[i], values[best])) best = i;
    }
    taken[best] = true;
    order.push_back(best);
  }
  return order;
}

std::vector<std::size_t> first_sorted(std::vector<std::size_t> order, std::size_t count) {
  order.resize(count);
  // Insertion sort; the order vector is tiny.
  for (std::size_t i = 1; i < order.size(); ++i) {
    for (std::size_t j = i; j > 0 && order[j - 1] > order[j]; --j) std::swap(order[j - 1], order[j]);
  }
  return order;
}

}  // namespace

std::vector<std::size_t> bh_oracle(const PValueVector& p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("level outside (0, 1)");
  const std::vector<double> values(p.values().begin(), p.values().end());
  const auto order = extraction_order(values, [](double a, double b) { return a < b; });
  const Rational K(static_cast<long long>(values.size()));
  const Rational level = to_rational(alpha);

  std::size_t k_star = 0;
  for (std::size_t k = 1; k <= values.size(); ++k) {
    const Rational lhs = K * to_rational(values[order[k - 1]]) / Rational(static_cast<long long>(k));
    if (lhs <= level) k_star = k;
  }
  return first_sorted(order, k_star);
}

std::vector<std::size_t> ebh_oracle(const EValueVector& e, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("level outside (0, 1)");
  const std::vector<double> values(e.values().begin(), e.values().end());
  const auto order = extraction_order(values, [](double a, double b) { return a > b; });
  const Rational K(static_cast<long long>(values.size()));
  const Rational level = to_rational(alpha);

  std::size_t k_star = 0;
  for (std::size_t k = 1; k <= values.size(); ++k) {
    const double value = values[order[k - 1]];
    bool passes = false;
    if (value == std::numeric_limits<double>::infinity()) {
      passes = true;
    } else {
      // k e_[k] / K >= 1 / alpha
      passes = Rational(static_cast<long long>(k)) * to_rational(value) * level >= K;
    }
    if (passes) k_star = k;
  }
  return first_sorted(order, k_star);
}

}  // namespace fdrkit::verify
