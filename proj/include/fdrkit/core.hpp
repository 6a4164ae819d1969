#pragma once

// Multiple-testing procedures on realized p-values and e-values.
//
// All functions are pure and thread-safe. Hypothesis indices are 0-based.
// Levels must lie in (0, 1); violations raise DomainError.

#include <cstddef>
#include <span>

#include "fdrkit/types.hpp"

namespace fdrkit {

/// Benjamini-Hochberg step-up at level alpha: k* = max{k : K p_(k) / k <= alpha}
/// (0 if none), rejecting the k* smallest p-values.
RejectionResult bh_procedure(const PValueVector& p, double alpha);

/// t_alpha = sup{t in [0,1] : K t <= alpha R(t)} with R(t) = |{p_k <= t}| v 1,
/// i.e. alpha * max(k*, 1) / K rounded down to a double.
double rejection_threshold(const PValueVector& p, double alpha);

struct CountingProcesses {
  std::size_t false_rejections = 0;  ///< F(t) = |{k null : p_k <= t}|
  std::size_t rejections = 0;        ///< R(t) = |{k : p_k <= t}| v 1
};

CountingProcesses counting_processes(const PValueVector& p, const TruthAssignment& truth,
                                     double t);

/// F/(R v 1) for a rejection set against the true null set.
FdpOutcome fdp(const RejectionResult& result, const TruthAssignment& truth);

/// e-BH: k* = max{k : k e_[k] / K >= 1/alpha} over e-values sorted descending.
/// Same decisions as BH on the reciprocals (1/0 = inf, 1/inf = 0).
RejectionResult ebh_procedure(const EValueVector& e, double alpha);

/// True iff e_k >= K / (alpha |candidate|) for every k in candidate; true for
/// the empty set. Duplicate indices count once.
bool is_self_consistent(const EValueVector& e, double alpha,
                        std::span<const std::size_t> candidate);

/// l_K = 1 + 1/2 + ... + 1/K, summed smallest term first.
double harmonic_number(std::size_t K);

/// Benjamini-Yekutieli: BH at level alpha / l_K.
RejectionResult by_procedure(const PValueVector& p, double alpha);

/// Simes combination S_K = min_k K p_(k) / k, rounded up to a double so that
/// S_K <= alpha holds exactly when BH at alpha rejects something.
double simes_statistic(const PValueVector& p);

/// Rejection count of BH after setting p_k to 0. Always >= 1.
std::size_t leave_one_out_rejections(const PValueVector& p, double alpha, std::size_t k);

/// The step calibrator phi(p) = K / (alpha' ceil(K p / alpha)) 1{p <= alpha},
/// phi(0) = K / alpha', alpha' = alpha l_K. Decreasing and integrates to one.
///
/// Values are rounded up so that e-BH at alpha' on phi(p_1..p_K) makes exactly
/// the decisions of BH at alpha on p_1..p_K.
class Calibrator {
 public:
  Calibrator(std::size_t K, double alpha);

  std::size_t K() const noexcept { return K_; }
  double alpha() const noexcept { return alpha_; }
  double alpha_prime() const noexcept { return alpha_prime_; }

  double operator()(double p) const;
  EValueVector apply(const PValueVector& p) const;

 private:
  std::size_t K_;
  double alpha_;
  double alpha_prime_;
};

double calibrate_p_to_e(const Calibrator& calibrator, double p);

/// Runs e-BH at alpha' on the calibrated e-values and BH at alpha on p, and
/// reports whether the rejected sets coincide.
bool calibrated_equivalence(const PValueVector& p, double alpha);

namespace detail {
/// e-BH at any positive level. alpha' = alpha l_K routinely exceeds one.
RejectionResult ebh_at_level(const EValueVector& e, double level);
void check_level(double alpha);
}  // namespace detail

}  // namespace fdrkit
