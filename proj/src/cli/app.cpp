#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "fdrkit/cli.hpp"
#include "fdrkit/core.hpp"
#include "fdrkit/kernels.hpp"
#include "fdrkit/simulate.hpp"
#include "fdrkit/verify.hpp"

namespace fdrkit::cli {

namespace {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string output;
  std::string format = "json";
  std::string procedure;
  std::optional<double> alpha;
  std::string model;
  std::optional<std::size_t> K;
  std::optional<std::size_t> K0;
  std::optional<double> signal;
  std::optional<double> alt_signal;
  std::optional<double> grid_alpha;
  double rho = 0.0;
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::size_t trials = 10000;
  bool exhaustive = false;
  std::string kernels;
};

ProcedureKind procedure_or_throw(const std::string& name) {
  if (const auto kind = parse_procedure_kind(name)) return *kind;
  throw InputError("unknown procedure '" + name + "' (expected bh, by or ebh)");
}

double alpha_or_throw(const Options& o) {
  if (!o.alpha) throw InputError("--alpha is required");
  if (!(*o.alpha > 0.0 && *o.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
  return *o.alpha;
}

// e-BH stays well defined above 1, and calibrate can emit alpha_prime >= 1.
double ebh_level_or_throw(const Options& o) {
  if (!o.alpha) throw InputError("--alpha is required");
  if (!(*o.alpha > 0.0 && std::isfinite(*o.alpha))) {
    throw InputError("--alpha must be positive and finite for ebh");
  }
  return *o.alpha;
}

Column read_input(const Options& o, std::istream& in) {
  if (o.input.empty() || o.input == "-") return read_column(in);
  std::ifstream file(o.input);
  if (!file) throw IoError("cannot open input file '" + o.input + "'");
  return read_column(file);
}

void require_header(const Column& column, const std::string& expected) {
  if (column.header != expected) {
    throw InputError("line 1: header must be '" + expected + "', found '" + column.header + "'");
  }
}

// Re-raises a value-domain error with the source line of the offending entry.
[[noreturn]] void rethrow_with_line(const DomainError& e, const Column& column) {
  if (e.position() < column.lines.size()) {
    throw InputError("line " + std::to_string(column.lines[e.position()]) + ": " + e.what());
  }
  throw InputError(e.what());
}

PValueVector pvalues_from(const Column& column) {
  try {
    return PValueVector(column.values);
  } catch (const DomainError& e) {
    rethrow_with_line(e, column);
  }
}

EValueVector evalues_from(const Column& column) {
  try {
    return EValueVector(column.values);
  } catch (const DomainError& e) {
    rethrow_with_line(e, column);
  }
}

Json one_based(const std::vector<std::size_t>& indices) {
  Json out = Json::array();
  for (const std::size_t k : indices) out.push_back(k + 1);
  return out;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty() || o.output == "-") {
    out << text;
    return;
  }
  std::ofstream file(o.output, std::ios::binary);
  if (!file) throw IoError("cannot open output file '" + o.output + "'");
  file << text;
  if (!file.flush()) throw IoError("cannot write output file '" + o.output + "'");
}

std::string csv_row(std::initializer_list<std::string> fields) {
  std::string row;
  for (const auto& f : fields) {
    if (!row.empty()) row += ',';
    row += f;
  }
  return row + '\n';
}

std::string dump(const Json& report) { return report.dump(2) + '\n'; }

int do_apply(const Options& o, std::istream& in, std::ostream& out) {
  const ProcedureKind kind = procedure_or_throw(o.procedure);
  const bool evalues = kind == ProcedureKind::ebh;
  const double alpha = evalues ? ebh_level_or_throw(o) : alpha_or_throw(o);
  const Column column = read_input(o, in);
  require_header(column, evalues ? "e" : "p");

  RejectionResult result;
  std::optional<double> simes;
  if (evalues) {
    result = detail::ebh_at_level(evalues_from(column), alpha);
  } else {
    const PValueVector p = pvalues_from(column);
    result = kind == ProcedureKind::bh ? bh_procedure(p, alpha) : by_procedure(p, alpha);
    simes = simes_statistic(p);
  }

  if (o.format == "csv") {
    std::string text = csv_row({"index", column.header, "rejected"});
    for (std::size_t k = 0; k < column.values.size(); ++k) {
      text += csv_row({std::to_string(k + 1), format_double(column.values[k]),
                       result.rejects(k) ? "1" : "0"});
    }
    emit(o, out, text);
    return kExitOk;
  }

  Json report;
  report["schema"] = 1;
  report["procedure"] = o.procedure;
  report["alpha"] = alpha;
  if (kind == ProcedureKind::by) report["bh_level"] = alpha / harmonic_number(result.K);
  report["K"] = result.K;
  report["k_star"] = result.k_star;
  report["rejected"] = one_based(result.rejected);
  report["threshold"] = result.threshold;
  if (simes) report["simes"] = *simes;
  Json decisions = Json::array();
  for (std::size_t k = 0; k < column.values.size(); ++k) {
    Json row;
    row["index"] = k + 1;
    row[column.header] = column.values[k];
    row["rejected"] = result.rejects(k);
    decisions.push_back(std::move(row));
  }
  report["decisions"] = std::move(decisions);
  emit(o, out, dump(report));
  return kExitOk;
}

ModelSpec model_from(const Options& o) {
  const auto kind = parse_model_kind(o.model);
  if (!kind) {
    throw InputError("unknown model '" + o.model +
                     "' (expected independent-uniform, gaussian-one-factor, "
                     "comonotone-evalue or discrete-adversarial-p)");
  }
  if (!o.K) throw InputError("--K is required");
  ModelSpec model;
  model.kind = *kind;
  model.K = *o.K;
  model.K0 = o.K0.value_or(*o.K);
  model.signal = o.signal;
  model.rho = o.rho;
  model.alt_signal = o.alt_signal;
  model.grid_alpha = o.grid_alpha;
  return model;
}

int do_simulate(const Options& o, std::ostream& out) {
  const ModelSpec model = model_from(o);
  const double alpha = alpha_or_throw(o);
  const ProcedureKind kind =
      o.procedure.empty()
          ? (produces_evalues(model.kind) ? ProcedureKind::ebh : ProcedureKind::bh)
          : procedure_or_throw(o.procedure);
  if (o.reps < 1) throw InputError("--reps must be at least 1");
  const ProcedureSpec procedure{kind, alpha};
  if (produces_evalues(model.kind) != (kind == ProcedureKind::ebh)) {
    throw InputError(std::string(to_string(kind)) + " cannot run on " +
                     std::string(to_string(model.kind)) + " values");
  }

  const FdrEstimate estimate = estimate_fdr(model, procedure, o.reps, o.seed, o.workers);
  const FdrBound bound = fdr_bound(model, procedure);
  const bool satisfied = estimate.mean_fdp <= bound.value + 3.0 * estimate.std_error;

  if (o.format == "csv") {
    std::string text = csv_row({"model", "procedure", "alpha", "K", "K0", "replications", "seed",
                                "mean_fdp", "std_error", "mean_power", "bound",
                                "bound_satisfied"});
    text += csv_row({o.model, std::string(to_string(kind)), format_double(alpha),
                     std::to_string(model.K), std::to_string(model.K0),
                     std::to_string(estimate.replications), std::to_string(o.seed),
                     format_double(estimate.mean_fdp), format_double(estimate.std_error),
                     format_double(estimate.mean_power), format_double(bound.value),
                     satisfied ? "true" : "false"});
    emit(o, out, text);
    return kExitOk;
  }

  Json report;
  report["schema"] = 1;
  report["model"] = o.model;
  report["K"] = model.K;
  report["K0"] = model.K0;
  report["signal"] = model.signal_or_default();
  if (model.kind == ModelKind::gaussian_one_factor) report["rho"] = model.rho;
  if (model.alt_signal) report["alt_signal"] = *model.alt_signal;
  if (model.grid_alpha) report["grid_alpha"] = *model.grid_alpha;
  report["procedure"] = std::string(to_string(kind));
  report["alpha"] = alpha;
  report["replications"] = estimate.replications;
  report["seed"] = o.seed;
  report["mean_fdp"] = estimate.mean_fdp;
  report["std_error"] = estimate.std_error;
  report["mean_power"] = estimate.mean_power;
  report["bound"] = bound.value;
  report["regime"] = std::string(bound.regime);
  report["bound_satisfied"] = satisfied;
  emit(o, out, dump(report));
  return kExitOk;
}

int do_calibrate(const Options& o, std::istream& in, std::ostream& out) {
  const double alpha = alpha_or_throw(o);
  const Column column = read_input(o, in);
  require_header(column, "p");
  const PValueVector p = pvalues_from(column);
  const Calibrator calibrator(p.size(), alpha);
  const EValueVector e = calibrator.apply(p);

  if (o.format == "csv") {
    std::string text = "e\n";
    for (const double v : e.values()) text += format_double(v) + '\n';
    emit(o, out, text);
    return kExitOk;
  }

  Json report;
  report["schema"] = 1;
  report["alpha"] = alpha;
  report["alpha_prime"] = calibrator.alpha_prime();
  report["K"] = p.size();
  report["note"] =
      "e-BH at level alpha_prime on these e-values rejects exactly the hypotheses that BH "
      "at level alpha rejects on the input p-values";
  Json values = Json::array();
  for (std::size_t k = 0; k < p.size(); ++k) {
    Json row;
    row["index"] = k + 1;
    row["p"] = p[k];
    row["e"] = e[k];
    values.push_back(std::move(row));
  }
  report["values"] = std::move(values);
  emit(o, out, dump(report));
  return kExitOk;
}

int do_verify(const Options& o, std::ostream& out) {
  if (o.trials < 1) throw InputError("--trials must be at least 1");
  std::vector<verify::CheckReport> reports = verify::run_identity_suite(o.trials, o.seed);
  reports.push_back(verify::random_oracle_check(o.trials, o.seed));
  if (o.exhaustive) reports.push_back(verify::exhaustive_oracle_grid());
  bool passed = true;
  for (const auto& r : reports) passed = passed && r.passed();

  if (o.format == "csv") {
    std::string text = csv_row({"check_name", "cases_run", "failures"});
    for (const auto& r : reports) {
      text += csv_row({r.check_name, std::to_string(r.cases_run), std::to_string(r.failures)});
    }
    emit(o, out, text);
  } else {
    Json report;
    report["schema"] = 1;
    report["trials"] = o.trials;
    report["seed"] = o.seed;
    report["passed"] = passed;
    Json checks = Json::array();
    for (const auto& r : reports) {
      Json row;
      row["check_name"] = r.check_name;
      row["cases_run"] = r.cases_run;
      row["failures"] = r.failures;
      row["first_failure"] = r.first_failure ? Json(*r.first_failure) : Json(nullptr);
      checks.push_back(std::move(row));
    }
    report["checks"] = std::move(checks);
    emit(o, out, dump(report));
  }
  return passed ? kExitOk : kExitCheckFailed;
}

void add_output_options(CLI::App* sub, Options& o) {
  sub->add_option("--output,-o", o.output, "Write the report here instead of stdout");
  sub->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"False discovery rate procedures: apply, simulate, calibrate, verify"};
  app.name("fdrkit");
  app.require_subcommand(1);
  app.add_option("--kernels", o.kernels, "Kernel set: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  CLI::App* apply = app.add_subcommand("apply", "Run a procedure on a CSV column of values");
  apply->add_option("--input,-i", o.input, "CSV file (default: stdin)");
  apply->add_option("--procedure", o.procedure, "bh, by or ebh")->required();
  apply->add_option("--alpha", o.alpha, "Level in (0, 1); any positive level for ebh")->required();
  add_output_options(apply, o);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo FDR estimate for a model");
  simulate->add_option("--model", o.model, "Data-generating model")->required();
  simulate->add_option("--K", o.K, "Number of hypotheses")->required();
  simulate->add_option("--K0", o.K0, "Number of true nulls (default: K)");
  simulate->add_option("--signal", o.signal, "Non-null strength (model specific)");
  simulate->add_option("--alt-signal", o.alt_signal, "Non-null e-value mean cap");
  simulate->add_option("--rho", o.rho, "Factor loading for gaussian-one-factor");
  simulate->add_option("--grid-alpha", o.grid_alpha, "Grid level for discrete-adversarial-p");
  simulate->add_option("--procedure", o.procedure, "bh, by or ebh (default by model)");
  simulate->add_option("--alpha", o.alpha, "Level in (0, 1)")->required();
  simulate->add_option("--reps", o.reps, "Replications")->capture_default_str();
  simulate->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  simulate->add_option("--workers", o.workers, "Worker threads (0: all cores)")
      ->capture_default_str();
  add_output_options(simulate, o);

  CLI::App* calibrate = app.add_subcommand("calibrate", "Convert p-values to e-values");
  calibrate->add_option("--input,-i", o.input, "CSV file (default: stdin)");
  calibrate->add_option("--alpha", o.alpha, "Level in (0, 1)")->required();
  add_output_options(calibrate, o);

  CLI::App* check = app.add_subcommand("verify", "Run the oracle and identity checks");
  check->add_option("--trials", o.trials, "Random trials")->capture_default_str();
  check->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  check->add_flag("--exhaustive", o.exhaustive, "Add the exhaustive small-K oracle grid");
  add_output_options(check, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (!o.kernels.empty() && !kernels::select(o.kernels)) {
      throw InputError("kernel set '" + o.kernels + "' is not available on this machine");
    }
    if (*apply) return do_apply(o, in, out);
    if (*simulate) return do_simulate(o, out);
    if (*calibrate) return do_calibrate(o, in, out);
    return do_verify(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace fdrkit::cli
