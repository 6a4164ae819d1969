#include <cmath>
#include <string>
#include <vector>

#include "fdrkit/core.hpp"
#include "fdrkit/exact.hpp"

namespace fdrkit {

Calibrator::Calibrator(std::size_t K, double alpha) : K_(K), alpha_(alpha) {
  if (K < 1) throw DomainError("calibrator needs K >= 1");
  detail::check_level(alpha);
  alpha_prime_ = alpha * harmonic_number(K);
}

double Calibrator::operator()(double p) const {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw DomainError("p-value " + std::to_string(p) + " is outside [0, 1]");
  }
  if (p > alpha_) return 0.0;
  const double K = static_cast<double>(K_);
  // The exact ceiling puts a p-value lying on a breakpoint in the lower step.
  double step = exact::ceil_ratio(K, p, alpha_);
  if (step < 1.0) step = 1.0;
  return exact::reciprocal_round_up(K, alpha_prime_, step);
}

EValueVector Calibrator::apply(const PValueVector& p) const {
  if (p.size() != K_) {
    throw std::invalid_argument("calibrator built for K=" + std::to_string(K_) +
                                " applied to " + std::to_string(p.size()) + " p-values");
  }
  std::vector<double> e;
  e.reserve(p.size());
  for (const double value : p.values()) e.push_back((*this)(value));
  return EValueVector(std::move(e));
}

double calibrate_p_to_e(const Calibrator& calibrator, double p) { return calibrator(p); }

bool calibrated_equivalence(const PValueVector& p, double alpha) {
  const Calibrator calibrator(p.size(), alpha);
  const RejectionResult via_e =
      detail::ebh_at_level(calibrator.apply(p), calibrator.alpha_prime());
  return via_e.rejected == bh_procedure(p, alpha).rejected;
}

}  // namespace fdrkit
