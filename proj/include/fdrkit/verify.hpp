#pragma once

// Brute-force oracles and identity checks for the procedures in core.
//
// The oracles work in exact rational arithmetic, sort by repeated minimum
// extraction and scan every k. They share no sorting or scanning code with
// core, so agreement between the two is evidence rather than tautology.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdrkit/types.hpp"

namespace fdrkit::verify {

struct CheckReport {
  std::string check_name;
  std::size_t cases_run = 0;
  std::size_t failures = 0;
  std::optional<std::string> first_failure;

  bool passed() const noexcept { return failures == 0; }
};

/// BH rejected set (0-based, ascending) by literal evaluation of the k* rule.
std::vector<std::size_t> bh_oracle(const PValueVector& p, double alpha);

/// e-BH rejected set (0-based, ascending) by literal evaluation of its k* rule.
std::vector<std::size_t> ebh_oracle(const EValueVector& e, double alpha);

/// Every p-vector with K <= max_K and entries in {0, 1/steps, ..., 1}, at each
/// of `alphas`: core BH against the oracle.
CheckReport exhaustive_oracle_grid(std::size_t max_K = 4, std::size_t steps = 20,
                                   std::vector<double> alphas = {0.05, 0.1, 0.25});

/// Random p-vectors with K in {1..max_K}: core BH against the oracle.
CheckReport random_oracle_check(std::size_t trials, std::uint64_t seed,
                                std::size_t max_K = 20);

/// Draws `trials` random cases (K in {1..20}, mixed continuous and grid-valued
/// entries) and checks every structural identity on each. One report per
/// identity. Throws std::invalid_argument when trials is 0.
std::vector<CheckReport> run_identity_suite(std::size_t trials, std::uint64_t seed);

/// The identity checks on a single given case.
std::vector<CheckReport> check_identities(const PValueVector& p, double alpha);

}  // namespace fdrkit::verify
