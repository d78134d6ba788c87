#pragma once
// RealField: complex scalar samples on the periodic grid [0,2pi)^n, plus
// spectral helpers and binary I/O (float64 interleaved complex, row-major,
// with a JSON sidecar {n, grid_size, band_limit}).
#include <cstdint>
#include <string>
#include <vector>

#include "wpx/common.hpp"

namespace wpx {

// Guard band used throughout: packets and band-limited data live inside
// |zeta| <= (2/3) * Nyquist so flow transport cannot alias.
inline int guard_band(int grid_size) { return (grid_size / 2) * 2 / 3; }

struct RealField {
  int n = 2;
  int grid_size = 0;
  int band_limit = 0;  // declared band limit (<= guard band)
  std::vector<cd> data;  // row-major, size grid_size^n

  RealField() = default;
  RealField(int n_, int N) : n(n_), grid_size(N), band_limit(guard_band(N)) {
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= N;
    data.assign(total, cd(0.0));
  }

  std::size_t size() const { return data.size(); }
  // Position of grid point with row-major flat index m.
  Vec point(std::size_t m) const;
  // L2 norm w.r.t. normalized Haar measure: sqrt(N^{-n} sum |f|^2).
  double l2_norm() const;
  RealField& operator+=(const RealField& o);
  RealField& operator-=(const RealField& o);
  RealField& operator*=(cd s);

  // Spectrum in FFT bin order (forward convention of fft.hpp).
  std::vector<cd> spectrum() const;
  static RealField from_spectrum(int n, int N, const std::vector<cd>& spec);
};

double rel_l2_error(const RealField& a, const RealField& b);

// Random field, spectrum supported on kmin <= |zeta| <= kmax with unit
// L2 norm; deterministic per (seed, tag).
RealField random_band_limited(int n, int N, double kmin, double kmax,
                              std::uint64_t seed, std::uint64_t tag = 0);

// Binary I/O; ".json" sidecar written/checked next to the payload.
void save_field(const RealField& f, const std::string& path);
RealField load_field(const std::string& path);

}  // namespace wpx
