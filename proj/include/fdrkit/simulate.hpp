#pragma once

// Seeded data-generating models and Monte Carlo estimators of FDR.
//
// In every model the first K0 hypotheses are the true nulls.
//
//   independent-uniform     Nulls iid U(0,1). Non-nulls iid u^(1/signal), whose
//                           distribution function is p^signal; signal in (0,1],
//                           default 0.1. All p-values independent.
//   gaussian-one-factor     Z_k = sqrt(rho) W + sqrt(1-rho) xi_k, plus signal
//                           for non-nulls; p_k = 1 - Phi(Z_k). Nonnegative
//                           equicorrelation makes the p-values PRDS. signal
//                           finite, default 2.0; rho in [0,1).
//   comonotone-evalue       One U ~ U(0,1) drives everything. Nulls
//                           E = m 1{U <= 1/m} with m = signal >= 1 (default 10),
//                           so E[E] = 1. Non-nulls E = m 1{U <= min(1, a/m)}
//                           with a = alt_signal (default m), mean min(m, a).
//   discrete-adversarial-p  A level r in {1..K0} is picked with probability
//                           pi = 2 g K0 / (K (K0 + 1)) each, g = grid_alpha,
//                           and nothing is picked otherwise. Given r, r random
//                           nulls sit on the grid point g r / K and the other
//                           nulls are uniform on (g, 1]. Every null is a valid
//                           p-value (its distribution function at grid point j
//                           is g j (j+1) / (K (K0+1)) <= g j / K), yet BH at g
//                           rejects exactly r nulls whenever r is picked. A
//                           stressor, not a worst case. g in (0, 0.5]; when
//                           unset the estimators use the procedure's BH level.
//                           Non-nulls as in independent-uniform.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "fdrkit/montecarlo.hpp"
#include "fdrkit/rng.hpp"
#include "fdrkit/types.hpp"

namespace fdrkit {

enum class ModelKind {
  independent_uniform,
  gaussian_one_factor,
  comonotone_evalue,
  discrete_adversarial_p,
};

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;
bool produces_evalues(ModelKind kind) noexcept;

struct ModelSpec {
  ModelKind kind = ModelKind::independent_uniform;
  std::size_t K = 1;
  std::size_t K0 = 0;
  std::optional<double> signal;
  double rho = 0.0;
  std::optional<double> alt_signal;
  std::optional<double> grid_alpha;

  /// `signal` or the model default.
  double signal_or_default() const noexcept;

  /// Throws DomainError naming the offending field.
  void validate() const;
};

struct Draw {
  std::variant<PValueVector, EValueVector> values;
  TruthAssignment truth;
};

/// Deterministic in (model, seed). Throws DomainError on an invalid model, and
/// for discrete-adversarial-p when grid_alpha is unset.
Draw generate(const ModelSpec& model, std::uint64_t seed);

/// Writes one draw into `out` (size K) from `rng`. Validates nothing.
void generate_into(const ModelSpec& model, SplitMix64& rng, std::span<double> out);

enum class ProcedureKind { bh, by, ebh };

std::string_view to_string(ProcedureKind kind) noexcept;
std::optional<ProcedureKind> parse_procedure_kind(std::string_view name) noexcept;

struct ProcedureSpec {
  ProcedureKind kind = ProcedureKind::bh;
  double alpha = 0.1;
};

struct FdrEstimate {
  double mean_fdp = 0.0;
  double std_error = 0.0;
  std::size_t replications = 0;
  double mean_power = 0.0;  ///< mean fraction of non-nulls rejected; 0 when K0 = K
};

struct FdrBound {
  double value = 0.0;
  std::string_view regime;
};

/// Guaranteed FDR for the pairing: alpha K0 / K for BH under independence or
/// PRDS, for BY anywhere and for e-BH on e-values; l_K alpha K0 / K for BH on
/// the adversarial model. Throws std::invalid_argument when the procedure
/// does not take the values the model produces.
FdrBound fdr_bound(const ModelSpec& model, const ProcedureSpec& procedure);

/// Replication i draws from the stream seeded with derive_seed(seed, i).
/// `workers` = 0 uses the hardware concurrency; the result does not depend on it.
FdrEstimate estimate_fdr(const ModelSpec& model, const ProcedureSpec& procedure,
                         std::size_t replications, std::uint64_t seed,
                         std::size_t workers = 0);

struct MartingaleDiagnostics {
  montecarlo::Moment stopped;  ///< F(t_alpha) / t_alpha
  std::vector<double> grid;    ///< 0.2, 0.4, 0.6, 0.8, 1.0
  std::vector<montecarlo::Moment> at_grid;  ///< F(s) / s
};

/// Independent-uniform models only; anything else is std::invalid_argument.
MartingaleDiagnostics martingale_diagnostics(const ModelSpec& model, double alpha,
                                             std::size_t replications, std::uint64_t seed,
                                             std::size_t workers = 0);

/// Simes statistic of each replication's p-values. e-value models are mapped
/// to p-values through min(1, 1/e), which is a valid p-value for an e-value.
std::vector<double> simes_samples(const ModelSpec& model, std::size_t replications,
                                  std::uint64_t seed, std::size_t workers = 0);

/// sup_x |F_n(x) - x| for the empirical distribution of `samples`.
double ks_distance_to_uniform(std::vector<double> samples);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace fdrkit
