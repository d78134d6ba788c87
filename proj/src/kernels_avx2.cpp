// AVX2 + FMA variants of the hot kernels. Complex doubles are processed two
// per 256-bit lane pair with the usual movedup/permute multiply scheme.
#include <immintrin.h>

#include "wpx/kernels.hpp"

namespace wpx::kernels {
namespace {

// [a*c - b*d, a*d + b*c] for packed (a,b),(c,d) pairs.
inline __m256d cmul2(__m256d x, __m256d y) {
  __m256d xre = _mm256_movedup_pd(x);
  __m256d xim = _mm256_permute_pd(x, 0xF);
  __m256d yswap = _mm256_permute_pd(y, 0x5);
  return _mm256_fmaddsub_pd(xre, y, _mm256_mul_pd(xim, yswap));
}

void cmul(const cd* a, const cd* b, cd* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d x = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    __m256d y = _mm256_loadu_pd(reinterpret_cast<const double*>(b + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i), cmul2(x, y));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void cmul_accum(const cd* a, const cd* b, cd* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d x = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    __m256d y = _mm256_loadu_pd(reinterpret_cast<const double*>(b + i));
    __m256d acc = _mm256_loadu_pd(reinterpret_cast<double*>(out + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i),
                     _mm256_add_pd(acc, cmul2(x, y)));
  }
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

void caxpy(cd alpha, const cd* x, cd* y, std::size_t n) {
  __m256d al = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(),
                              alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d yv = _mm256_loadu_pd(reinterpret_cast<double*>(y + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(y + i),
                     _mm256_add_pd(yv, cmul2(al, xv)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq(const cd* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double buf[4];
  _mm256_store_pd(buf, acc);
  double s = buf[0] + buf[1] + buf[2] + buf[3];
  for (; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void rcmul_accum(const double* a, cd c, const cd* col, cd* out,
                 std::size_t n) {
  __m256d cv = _mm256_setr_pd(c.real(), c.imag(), c.real(), c.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d av = _mm256_setr_pd(a[i], a[i], a[i + 1], a[i + 1]);
    __m256d colv = _mm256_loadu_pd(reinterpret_cast<const double*>(col + i));
    __m256d acc = _mm256_loadu_pd(reinterpret_cast<double*>(out + i));
    __m256d prod = _mm256_mul_pd(av, cmul2(cv, colv));
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i),
                     _mm256_add_pd(acc, prod));
  }
  for (; i < n; ++i) out[i] += a[i] * c * col[i];
}

void rmul_accum(const double* a, const cd* x, cd* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d av = _mm256_setr_pd(a[i], a[i], a[i + 1], a[i + 1]);
    __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d acc = _mm256_loadu_pd(reinterpret_cast<double*>(out + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i),
                     _mm256_fmadd_pd(av, xv, acc));
  }
  for (; i < n; ++i) out[i] += a[i] * x[i];
}

void rcmul_accum_f32(const float* a, cd c, const cd* col, cd* out,
                     std::size_t n) {
  __m256d cv = _mm256_setr_pd(c.real(), c.imag(), c.real(), c.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d av = _mm256_setr_pd(a[i], a[i], a[i + 1], a[i + 1]);
    __m256d colv = _mm256_loadu_pd(reinterpret_cast<const double*>(col + i));
    __m256d acc = _mm256_loadu_pd(reinterpret_cast<double*>(out + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i),
                     _mm256_fmadd_pd(av, cmul2(cv, colv), acc));
  }
  for (; i < n; ++i) out[i] += static_cast<double>(a[i]) * c * col[i];
}

void rinv_cmul_accum_f32(const float* a, double shift, cd c, const cd* col,
                         cd* out, std::size_t n) {
  __m256d cv = _mm256_setr_pd(c.real(), c.imag(), c.real(), c.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    double b0 = a[i], b1 = a[i + 1];
    double d0 = b0 * b0 + shift * shift, d1 = b1 * b1 + shift * shift;
    __m256d fv = _mm256_setr_pd(b0 / d0, -shift / d0, b1 / d1, -shift / d1);
    __m256d colv = _mm256_loadu_pd(reinterpret_cast<const double*>(col + i));
    __m256d acc = _mm256_loadu_pd(reinterpret_cast<double*>(out + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i),
                     _mm256_add_pd(acc, cmul2(fv, cmul2(cv, colv))));
  }
  for (; i < n; ++i) {
    double b = a[i];
    double d = b * b + shift * shift;
    out[i] += (c * col[i]) * (cd(b, -shift) / d);
  }
}

}  // namespace

const Ops avx2_ops = {cmul,       cmul_accum,      caxpy,
                      sum_sq,     rcmul_accum,     rmul_accum,
                      rcmul_accum_f32, rinv_cmul_accum_f32, "avx2"};

}  // namespace wpx::kernels
