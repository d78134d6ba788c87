#pragma once
// Hot inner-loop kernels used by the spectral transforms and quantization.
// Each kernel has a scalar reference implementation and an AVX2 variant;
// the active one is chosen at load time from CPUID (override with
// WPX_SIMD=scalar|avx2).
#include <complex>
#include <cstddef>
#include <string>

namespace wpx::kernels {

using cd = std::complex<double>;

struct Ops {
  // out[i] = a[i] * b[i]
  void (*cmul)(const cd*, const cd*, cd*, std::size_t);
  // out[i] += a[i] * b[i]
  void (*cmul_accum)(const cd*, const cd*, cd*, std::size_t);
  // y[i] += alpha * x[i]
  void (*caxpy)(cd, const cd*, cd*, std::size_t);
  // sum_i |x[i]|^2
  double (*sum_sq)(const cd*, std::size_t);
  // out[i] += a[i] * c * col[i]   (real field a, fixed complex c)
  void (*rcmul_accum)(const double*, cd, const cd*, cd*, std::size_t);
  // out[i] += a[i] * x[i]         (real field a)
  void (*rmul_accum)(const double*, const cd*, cd*, std::size_t);
  // out[i] += a[i] * c * col[i]   (float32 symbol table row a)
  void (*rcmul_accum_f32)(const float*, cd, const cd*, cd*, std::size_t);
  // out[i] += (c * col[i]) / (a[i] + i*shift)   (float32 table row a)
  void (*rinv_cmul_accum_f32)(const float*, double, cd, const cd*, cd*,
                              std::size_t);
  const char* name;
};

extern const Ops scalar_ops;
extern const Ops avx2_ops;

// Active dispatch table (resolved once, thread-safe).
const Ops& active();
// For tests: fetch a table by name ("scalar" or "avx2"); throws if the
// requested variant is unavailable on this machine.
const Ops& by_name(const std::string& name);
bool avx2_available();

}  // namespace wpx::kernels
