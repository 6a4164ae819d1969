#include "fdrkit/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fdrkit::montecarlo {

namespace {

// Neumaier summation.
struct Compensated {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) noexcept {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

template <class Work>
void for_each_block(std::size_t blocks, std::size_t workers, Work work) {
  workers = std::min(resolve_workers(workers), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) work(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto loop = [&] {
    try {
      for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) work(b);
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(blocks);
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(loop);
  loop();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::size_t resolve_workers(std::size_t requested) noexcept {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<Moment> run(std::size_t replications, std::size_t statistics,
                        std::size_t workers, const ReplicationBody& body) {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  const std::size_t blocks = (replications + kBlockSize - 1) / kBlockSize;
  // Per block and statistic: sum of x, sum of x^2.
  std::vector<Compensated> partial(blocks * statistics * 2);

  for_each_block(blocks, workers, [&](std::size_t b) {
    std::vector<double> out(statistics);
    Compensated* sums = partial.data() + b * statistics * 2;
    const std::size_t end = std::min(replications, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      std::fill(out.begin(), out.end(), 0.0);
      body(i, out);
      for (std::size_t s = 0; s < statistics; ++s) {
        sums[2 * s].add(out[s]);
        sums[2 * s + 1].add(out[s] * out[s]);
      }
    }
  });

  const double n = static_cast<double>(replications);
  std::vector<Moment> moments(statistics);
  for (std::size_t s = 0; s < statistics; ++s) {
    Compensated total;
    Compensated total_sq;
    for (std::size_t b = 0; b < blocks; ++b) {
      total.add(partial[(b * statistics + s) * 2].value());
      total_sq.add(partial[(b * statistics + s) * 2 + 1].value());
    }
    const double mean = total.value() / n;
    moments[s].mean = mean;
    if (replications > 1) {
      const double variance =
          std::max(0.0, (total_sq.value() - n * mean * mean) / (n - 1.0));
      moments[s].std_error = std::sqrt(variance / n);
    }
  }
  return moments;
}

std::vector<double> sample(std::size_t replications, std::size_t workers,
                           const std::function<double(std::size_t index)>& body) {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  std::vector<double> values(replications);
  const std::size_t blocks = (replications + kBlockSize - 1) / kBlockSize;
  for_each_block(blocks, workers, [&](std::size_t b) {
    const std::size_t end = std::min(replications, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) values[i] = body(i);
  });
  return values;
}

}  // namespace fdrkit::montecarlo
