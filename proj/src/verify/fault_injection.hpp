#pragma once

// Test-only entry point: runs the identity suite against a substitute BH so
// tests can confirm that a faulty procedure is caught. Not installed.

#include <cstdint>
#include <functional>
#include <vector>

#include "fdrkit/verify.hpp"

namespace fdrkit::verify::testing {

using BhFunction = std::function<RejectionResult(const PValueVector&, double)>;

std::vector<CheckReport> run_identity_suite_with(std::size_t trials, std::uint64_t seed,
                                                 const BhFunction& bh);

}  // namespace fdrkit::verify::testing
