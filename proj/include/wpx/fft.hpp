#pragma once
// Thin wrapper around FFTW: cached plans for n-dimensional complex
// transforms on N^n grids. Conventions used throughout:
//   forward:  fhat(zeta) = N^{-n} sum_x f(x) e^{-i zeta.x}
//   inverse:  f(x)       = sum_zeta fhat(zeta) e^{+i zeta.x}
// so "forward then inverse" is the identity and Parseval reads
//   N^{-n} sum_x |f|^2 = sum_zeta |fhat|^2.
// Plans are created with FFTW_ESTIMATE so the algorithm choice (and thus
// the bit pattern of results) is stable run to run.
#include <complex>
#include <vector>

namespace wpx::fft {

using cd = std::complex<double>;

// In-place transforms on row-major data of shape N^n (n = 1, 2, or 3).
void forward(cd* data, int n, int N);
void inverse(cd* data, int n, int N);

}  // namespace wpx::fft
