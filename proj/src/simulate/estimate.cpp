#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

#include "fdrkit/core.hpp"
#include "fdrkit/kernels.hpp"
#include "fdrkit/simulate.hpp"

namespace fdrkit {

namespace {

constexpr std::array<double, 5> kMartingaleGrid = {0.2, 0.4, 0.6, 0.8, 1.0};

bool takes_evalues(ProcedureKind kind) noexcept { return kind == ProcedureKind::ebh; }

double bh_level(const ProcedureSpec& procedure, std::size_t K) {
  return procedure.kind == ProcedureKind::by ? procedure.alpha / harmonic_number(K)
                                             : procedure.alpha;
}

void check_pairing(const ModelSpec& model, const ProcedureSpec& procedure) {
  if (produces_evalues(model.kind) != takes_evalues(procedure.kind)) {
    throw std::invalid_argument(std::string(to_string(procedure.kind)) + " cannot run on " +
                                std::string(to_string(model.kind)) + " values");
  }
}

// Fills in the adversarial grid from the procedure when the caller left it unset.
ModelSpec resolved(ModelSpec model, const ProcedureSpec& procedure) {
  if (model.kind == ModelKind::discrete_adversarial_p && !model.grid_alpha) {
    const double level = bh_level(procedure, model.K);
    if (level > 0.5) throw DomainError("level above 0.5 needs an explicit grid_alpha");
    model.grid_alpha = level;
  }
  model.validate();
  return model;
}

RejectionResult run_procedure(const ProcedureSpec& procedure, std::vector<double> values) {
  switch (procedure.kind) {
    case ProcedureKind::bh:
      return bh_procedure(PValueVector(std::move(values)), procedure.alpha);
    case ProcedureKind::by:
      return by_procedure(PValueVector(std::move(values)), procedure.alpha);
    case ProcedureKind::ebh:
      return ebh_procedure(EValueVector(std::move(values)), procedure.alpha);
  }
  throw std::invalid_argument("unknown procedure");
}

}  // namespace

std::string_view to_string(ProcedureKind kind) noexcept {
  switch (kind) {
    case ProcedureKind::bh:
      return "bh";
    case ProcedureKind::by:
      return "by";
    case ProcedureKind::ebh:
      return "ebh";
  }
  return "unknown";
}

std::optional<ProcedureKind> parse_procedure_kind(std::string_view name) noexcept {
  if (name == "bh") return ProcedureKind::bh;
  if (name == "by") return ProcedureKind::by;
  if (name == "ebh") return ProcedureKind::ebh;
  return std::nullopt;
}

FdrBound fdr_bound(const ModelSpec& model, const ProcedureSpec& procedure) {
  check_pairing(model, procedure);
  const double base =
      procedure.alpha * static_cast<double>(model.K0) / static_cast<double>(model.K);
  if (procedure.kind == ProcedureKind::ebh) return {base, "arbitrary e-values"};
  if (procedure.kind == ProcedureKind::by) return {base, "arbitrary dependence, corrected"};
  switch (model.kind) {
    case ModelKind::independent_uniform:
      return {base, "independent"};
    case ModelKind::gaussian_one_factor:
      return {base, "prds"};
    default:
      return {harmonic_number(model.K) * base, "arbitrary dependence"};
  }
}

FdrEstimate estimate_fdr(const ModelSpec& model_in, const ProcedureSpec& procedure,
                         std::size_t replications, std::uint64_t seed, std::size_t workers) {
  check_pairing(model_in, procedure);
  detail::check_level(procedure.alpha);
  const ModelSpec model = resolved(model_in, procedure);
  if (replications < 1) throw DomainError("replications must be at least 1");

  const TruthAssignment truth = TruthAssignment::leading_nulls(model.K, model.K0);
  const std::size_t alternatives = model.K - model.K0;
  const auto moments = montecarlo::run(
      replications, 2, workers, [&](std::size_t i, std::span<double> out) {
        SplitMix64 rng(derive_seed(seed, i));
        std::vector<double> values(model.K);
        generate_into(model, rng, values);
        const RejectionResult result = run_procedure(procedure, std::move(values));
        const FdpOutcome outcome = fdp(result, truth);
        out[0] = outcome.fdp;
        if (alternatives > 0) {
          const auto true_discoveries = outcome.discoveries - outcome.false_discoveries;
          out[1] = static_cast<double>(true_discoveries) / static_cast<double>(alternatives);
        }
      });

  FdrEstimate estimate;
  estimate.mean_fdp = moments[0].mean;
  estimate.std_error = moments[0].std_error;
  estimate.replications = replications;
  estimate.mean_power = moments[1].mean;
  return estimate;
}

MartingaleDiagnostics martingale_diagnostics(const ModelSpec& model_in, double alpha,
                                             std::size_t replications, std::uint64_t seed,
                                             std::size_t workers) {
  if (model_in.kind != ModelKind::independent_uniform) {
    throw std::invalid_argument("martingale diagnostics need the independent-uniform model");
  }
  detail::check_level(alpha);
  model_in.validate();
  if (replications < 1) throw DomainError("replications must be at least 1");
  const ModelSpec model = model_in;
  const TruthAssignment truth = TruthAssignment::leading_nulls(model.K, model.K0);

  const auto moments = montecarlo::run(
      replications, 1 + kMartingaleGrid.size(), workers,
      [&](std::size_t i, std::span<double> out) {
        SplitMix64 rng(derive_seed(seed, i));
        std::vector<double> values(model.K);
        generate_into(model, rng, values);
        const PValueVector p(std::move(values));
        const double t = rejection_threshold(p, alpha);
        out[0] = static_cast<double>(counting_processes(p, truth, t).false_rejections) / t;
        for (std::size_t g = 0; g < kMartingaleGrid.size(); ++g) {
          const double s = kMartingaleGrid[g];
          out[1 + g] =
              static_cast<double>(counting_processes(p, truth, s).false_rejections) / s;
        }
      });

  MartingaleDiagnostics diagnostics;
  diagnostics.stopped = moments[0];
  diagnostics.grid.assign(kMartingaleGrid.begin(), kMartingaleGrid.end());
  diagnostics.at_grid.assign(moments.begin() + 1, moments.end());
  return diagnostics;
}

std::vector<double> simes_samples(const ModelSpec& model, std::size_t replications,
                                  std::uint64_t seed, std::size_t workers) {
  model.validate();
  if (model.kind == ModelKind::discrete_adversarial_p && !model.grid_alpha) {
    throw DomainError("discrete-adversarial-p needs grid_alpha");
  }
  const bool evalues = produces_evalues(model.kind);
  return montecarlo::sample(replications, workers, [&](std::size_t i) {
    SplitMix64 rng(derive_seed(seed, i));
    std::vector<double> values(model.K);
    generate_into(model, rng, values);
    if (evalues) {
      for (double& v : values) v = v <= 1.0 ? 1.0 : 1.0 / v;
    }
    return simes_statistic(PValueVector(std::move(values)));
  });
}

}  // namespace fdrkit
