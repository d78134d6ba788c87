#include "wpx/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <stdexcept>

namespace wpx::fft {
namespace {

// FFTW plans are cached per (dim, size, sign). Plans are created with
// FFTW_ESTIMATE and the "unaligned + in-place" flags so a cached plan can be
// executed on any buffer via fftw_execute_dft.
struct PlanCache {
  std::map<std::tuple<int, int, int>, fftw_plan> plans;
  // Scratch buffer used only at planning time.
  fftw_plan get(int n, int N, int sign) {
    auto key = std::make_tuple(n, N, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= N;
    fftw_complex* buf = fftw_alloc_complex(total);
    int dims[3] = {N, N, N};
    fftw_plan p = fftw_plan_dft(n, dims, buf, buf, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fftw planning failed");
    plans.emplace(key, p);
    return p;
  }
  ~PlanCache() {
    for (auto& [k, p] : plans) fftw_destroy_plan(p);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

std::size_t total_size(int n, int N) {
  std::size_t t = 1;
  for (int i = 0; i < n; ++i) t *= N;
  return t;
}

}  // namespace

void forward(cd* data, int n, int N) {
  if (n < 1 || n > 3) throw std::invalid_argument("fft: dim must be 1..3");
  fftw_plan p = cache().get(n, N, FFTW_FORWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
  std::size_t total = total_size(n, N);
  double scale = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
}

void inverse(cd* data, int n, int N) {
  if (n < 1 || n > 3) throw std::invalid_argument("fft: dim must be 1..3");
  fftw_plan p = cache().get(n, N, FFTW_BACKWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

}  // namespace wpx::fft
