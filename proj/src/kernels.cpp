#include <cstdlib>
#include <stdexcept>

#include "wpx/kernels.hpp"

namespace wpx::kernels {

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Ops& by_name(const std::string& name) {
  if (name == "scalar") return scalar_ops;
  if (name == "avx2") {
    if (!avx2_available())
      throw std::runtime_error("avx2 kernels unavailable on this cpu");
    return avx2_ops;
  }
  throw std::runtime_error("unknown kernel variant: " + name);
}

const Ops& active() {
  static const Ops& ops = []() -> const Ops& {
    if (const char* env = std::getenv("WPX_SIMD")) return by_name(env);
    return avx2_available() ? avx2_ops : scalar_ops;
  }();
  return ops;
}

}  // namespace wpx::kernels
