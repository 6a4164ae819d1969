#include <atomic>
#include <cstdlib>
#include <string_view>

#include "fdrkit/kernels.hpp"

namespace fdrkit::kernels {

namespace detail {
const KernelTable* avx2_table() noexcept;
}

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_available() noexcept {
  if (const KernelTable* table = avx2()) return table;
  return &scalar();
}

const KernelTable* initial_selection() noexcept {
  if (const char* forced = std::getenv("FDRKIT_KERNELS")) {
    const std::string_view name(forced);
    if (name == "scalar") return &scalar();
    if (name == "avx2" && avx2() != nullptr) return avx2();
  }
  return best_available();
}

std::atomic<const KernelTable*>& selection() noexcept {
  static std::atomic<const KernelTable*> current{initial_selection()};
  return current;
}

}  // namespace

const KernelTable* avx2() noexcept {
  static const bool supported = cpu_has_avx2();
  return supported ? detail::avx2_table() : nullptr;
}

const KernelTable& active() noexcept {
  return *selection().load(std::memory_order_acquire);
}

bool select(std::string_view name) noexcept {
  const KernelTable* table = nullptr;
  if (name == "scalar") {
    table = &scalar();
  } else if (name == "avx2") {
    table = avx2();
  } else if (name == "auto") {
    table = best_available();
  }
  if (table == nullptr) return false;
  selection().store(table, std::memory_order_release);
  return true;
}

}  // namespace fdrkit::kernels
