#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdrkit::cli {

/// Malformed input; maps to the validation exit status.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Column {
  std::string header;
  std::vector<double> values;
  std::vector<std::size_t> lines;  ///< 1-based source line of each value
};

/// Single-column CSV: a header row, then one number per line. A UTF-8 byte
/// order mark and CR line endings are accepted; blank lines are skipped but
/// still counted.
Column read_column(std::istream& in);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace fdrkit::cli
