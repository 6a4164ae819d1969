#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fdrkit/exact.hpp"
#include "fdrkit/kernels.hpp"
#include "fdrkit/simulate.hpp"

namespace fdrkit {

namespace {

constexpr struct {
  ModelKind kind;
  std::string_view name;
} kModelNames[] = {
    {ModelKind::independent_uniform, "independent-uniform"},
    {ModelKind::gaussian_one_factor, "gaussian-one-factor"},
    {ModelKind::comonotone_evalue, "comonotone-evalue"},
    {ModelKind::discrete_adversarial_p, "discrete-adversarial-p"},
};

[[noreturn]] void invalid(const std::string& message) { throw DomainError(message); }

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) invalid(std::string(field) + " must be finite");
}

void draw_alternatives(SplitMix64& rng, double signal, std::span<double> out) {
  const double exponent = 1.0 / signal;
  for (double& v : out) v = std::pow(rng.uniform(), exponent);
}

void draw_gaussian(const ModelSpec& m, SplitMix64& rng, std::span<double> out) {
  const double loading = std::sqrt(m.rho);
  const double noise = std::sqrt(1.0 - m.rho);
  const double signal = m.signal_or_default();
  const double factor = rng.normal();
  for (std::size_t k = 0; k < out.size(); ++k) {
    double z = loading * factor + noise * rng.normal();
    if (k >= m.K0) z += signal;
    out[k] = z;
  }
  kernels::active().normal_upper_tail(out, out);
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
}

void draw_comonotone(const ModelSpec& m, SplitMix64& rng, std::span<double> out) {
  const double mass = m.signal_or_default();
  const double alt = m.alt_signal.value_or(mass);
  const double u = rng.uniform();
  const double null_value = u <= 1.0 / mass ? mass : 0.0;
  const double alt_value = u <= std::min(1.0, alt / mass) ? mass : 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = k < m.K0 ? null_value : alt_value;
}

void draw_adversarial(const ModelSpec& m, SplitMix64& rng, std::span<double> out) {
  const double g = *m.grid_alpha;
  const double K = static_cast<double>(m.K);
  const double K0 = static_cast<double>(m.K0);
  draw_alternatives(rng, m.signal_or_default(), out.subspan(m.K0));
  if (m.K0 == 0) return;

  const double floor_value = std::nextafter(g, 2.0);
  auto nulls = out.first(m.K0);
  for (double& v : nulls) v = std::max(floor_value, g + (1.0 - g) * rng.uniform());

  const double pi = 2.0 * g * K0 / (K * (K0 + 1.0));
  const double u = rng.uniform();
  const double picked = std::floor(u / pi) + 1.0;
  if (picked > K0) return;
  const std::size_t r = static_cast<std::size_t>(picked);

  std::vector<std::size_t> order(m.K0);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double grid_point = exact::ratio_round_down(g, picked, K);
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(m.K0 - i));
    std::swap(order[i], order[j]);
    nulls[order[i]] = grid_point;
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  for (const auto& entry : kModelNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  for (const auto& entry : kModelNames) {
    if (entry.name == name) return entry.kind;
  }
  return std::nullopt;
}

bool produces_evalues(ModelKind kind) noexcept { return kind == ModelKind::comonotone_evalue; }

double ModelSpec::signal_or_default() const noexcept {
  if (signal) return *signal;
  switch (kind) {
    case ModelKind::gaussian_one_factor:
      return 2.0;
    case ModelKind::comonotone_evalue:
      return 10.0;
    default:
      return 0.1;
  }
}

void ModelSpec::validate() const {
  if (K < 1) invalid("K must be at least 1");
  if (K0 > K) invalid("K0 must not exceed K");
  const double s = signal_or_default();
  require_finite(s, "signal");
  switch (kind) {
    case ModelKind::independent_uniform:
    case ModelKind::discrete_adversarial_p:
      if (!(s > 0.0 && s <= 1.0)) invalid("signal must lie in (0, 1] for this model");
      break;
    case ModelKind::gaussian_one_factor:
      break;
    case ModelKind::comonotone_evalue:
      if (!(s >= 1.0)) invalid("signal (the e-value mass m) must be at least 1");
      break;
  }
  require_finite(rho, "rho");
  if (!(rho >= 0.0 && rho < 1.0)) invalid("rho must lie in [0, 1)");
  if (rho != 0.0 && kind != ModelKind::gaussian_one_factor) {
    invalid("rho applies to gaussian-one-factor only");
  }
  if (alt_signal) {
    if (kind != ModelKind::comonotone_evalue) invalid("alt_signal applies to comonotone-evalue only");
    require_finite(*alt_signal, "alt_signal");
    if (!(*alt_signal > 0.0)) invalid("alt_signal must be positive");
  }
  if (grid_alpha) {
    if (kind != ModelKind::discrete_adversarial_p) {
      invalid("grid_alpha applies to discrete-adversarial-p only");
    }
    if (!(*grid_alpha > 0.0 && *grid_alpha <= 0.5)) invalid("grid_alpha must lie in (0, 0.5]");
  }
}

void generate_into(const ModelSpec& model, SplitMix64& rng, std::span<double> out) {
  switch (model.kind) {
    case ModelKind::independent_uniform:
      for (std::size_t k = 0; k < model.K0; ++k) out[k] = rng.uniform();
      draw_alternatives(rng, model.signal_or_default(), out.subspan(model.K0));
      break;
    case ModelKind::gaussian_one_factor:
      draw_gaussian(model, rng, out);
      break;
    case ModelKind::comonotone_evalue:
      draw_comonotone(model, rng, out);
      break;
    case ModelKind::discrete_adversarial_p:
      draw_adversarial(model, rng, out);
      break;
  }
}

Draw generate(const ModelSpec& model, std::uint64_t seed) {
  model.validate();
  if (model.kind == ModelKind::discrete_adversarial_p && !model.grid_alpha) {
    throw DomainError("discrete-adversarial-p needs grid_alpha");
  }
  SplitMix64 rng(seed);
  std::vector<double> values(model.K);
  generate_into(model, rng, values);
  auto truth = TruthAssignment::leading_nulls(model.K, model.K0);
  if (produces_evalues(model.kind)) {
    return Draw{EValueVector(std::move(values)), std::move(truth)};
  }
  return Draw{PValueVector(std::move(values)), std::move(truth)};
}

}  // namespace fdrkit
