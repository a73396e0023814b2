#include <cstdlib>
#include <string_view>

#include "paprlab/simd/kernels.hpp"

namespace paprlab::simd {

#if defined(PAPRLAB_HAVE_AVX2)
const Kernels& avx2_table();
#endif

const Kernels* avx2_kernels() {
#if defined(PAPRLAB_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels& active() {
  static const Kernels& chosen = [&]() -> const Kernels& {
    const char* env = std::getenv("PAPRLAB_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const Kernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace paprlab::simd
