#pragma once

// Reproducible parallel replication runner.
//
// Replications are grouped into fixed blocks of kBlockSize. Workers claim
// whole blocks; each block keeps compensated sums of its statistics, and the
// blocks are merged in index order afterwards. The result is therefore
// bit-identical for every worker count.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fdrkit::montecarlo {

inline constexpr std::size_t kBlockSize = 1024;

struct Moment {
  double mean = 0.0;
  double std_error = 0.0;  ///< sample std / sqrt(n); 0 for n = 1
};

/// Writes the statistics of replication `index` into `out`.
using ReplicationBody = std::function<void(std::size_t index, std::span<double> out)>;

/// Zero selects the hardware concurrency.
std::size_t resolve_workers(std::size_t requested) noexcept;

std::vector<Moment> run(std::size_t replications, std::size_t statistics,
                        std::size_t workers, const ReplicationBody& body);

/// One scalar per replication, in replication order.
std::vector<double> sample(std::size_t replications, std::size_t workers,
                           const std::function<double(std::size_t index)>& body);

}  // namespace fdrkit::montecarlo
