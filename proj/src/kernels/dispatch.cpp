#include <cstdlib>
#include <string_view>

#include "hyperlearn/kernels.hpp"

namespace hyperlearn::kernels {

#ifdef HYPERLEARN_HAVE_AVX2
namespace avx2 {
const KernelTable& table();
}
#endif

const KernelTable* avx2_table() {
#if defined(HYPERLEARN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* forced = std::getenv("HYPERLEARN_KERNELS");
    if (forced && std::string_view(forced) == "scalar") return scalar_table();
    const KernelTable* fast = avx2_table();
    return fast ? *fast : scalar_table();
  }();
  return chosen;
}

}  // namespace hyperlearn::kernels
