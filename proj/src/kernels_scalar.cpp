#include "wpx/kernels.hpp"

namespace wpx::kernels {
namespace {

void cmul(const cd* a, const cd* b, cd* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void cmul_accum(const cd* a, const cd* b, cd* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * b[i];
}

void caxpy(cd alpha, const cd* x, cd* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq(const cd* x, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void rcmul_accum(const double* a, cd c, const cd* col, cd* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * c * col[i];
}

void rmul_accum(const double* a, const cd* x, cd* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * x[i];
}

void rcmul_accum_f32(const float* a, cd c, const cd* col, cd* out,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] += static_cast<double>(a[i]) * c * col[i];
}

void rinv_cmul_accum_f32(const float* a, double shift, cd c, const cd* col,
                         cd* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double b = a[i];
    double d = b * b + shift * shift;
    out[i] += (c * col[i]) * (cd(b, -shift) / d);
  }
}

}  // namespace

const Ops scalar_ops = {cmul,       cmul_accum,      caxpy,
                        sum_sq,     rcmul_accum,     rmul_accum,
                        rcmul_accum_f32, rinv_cmul_accum_f32, "scalar"};

}  // namespace wpx::kernels
