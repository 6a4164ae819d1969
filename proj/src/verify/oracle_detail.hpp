#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace fdrkit::verify::detail {

using Rational = boost::multiprecision::cpp_rational;

/// The exact value of a finite double.
Rational to_rational(double x);

}  // namespace fdrkit::verify::detail
