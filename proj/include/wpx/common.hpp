#pragma once
// Shared small types: fixed-capacity vectors for points on the torus /
// frequency space, grid index helpers, RNG conventions, error codes.
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpx {

using cd = std::complex<double>;
inline constexpr double PI = 3.14159265358979323846;
inline constexpr double TWO_PI = 2.0 * PI;
inline constexpr int MAX_DIM = 3;

// Small dense vector with runtime dimension n <= MAX_DIM.
struct Vec {
  std::array<double, MAX_DIM> v{0, 0, 0};
  int n = 2;
  Vec() = default;
  Vec(int dim) : n(dim) {}
  Vec(double a, double b) : v{a, b, 0}, n(2) {}
  Vec(double a, double b, double c) : v{a, b, c}, n(3) {}
  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }
  Vec operator+(const Vec& o) const {
    Vec r(n);
    for (int i = 0; i < n; ++i) r.v[i] = v[i] + o.v[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r(n);
    for (int i = 0; i < n; ++i) r.v[i] = v[i] - o.v[i];
    return r;
  }
  Vec operator*(double s) const {
    Vec r(n);
    for (int i = 0; i < n; ++i) r.v[i] = v[i] * s;
    return r;
  }
  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += v[i] * o.v[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec hat() const {
    double r = norm();
    return r > 0 ? (*this) * (1.0 / r) : Vec(n);
  }
};

// Wrap a coordinate difference into (-pi, pi] (shortest displacement on the
// 2*pi torus).
inline double torus_diff(double a, double b) {
  double d = std::fmod(a - b, TWO_PI);
  if (d > PI) d -= TWO_PI;
  if (d <= -PI) d += TWO_PI;
  return d;
}

inline Vec torus_diff(const Vec& a, const Vec& b) {
  Vec r(a.n);
  for (int i = 0; i < a.n; ++i) r[i] = torus_diff(a[i], b[i]);
  return r;
}

// Integer frequency for FFT bin k on an N-point axis.
inline int fft_freq(int k, int N) { return k <= N / 2 ? k : k - N; }

// Surface measure of the unit sphere S^{n-1}.
inline double sphere_measure(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return TWO_PI;
    case 3: return 4.0 * PI;
    default: throw std::invalid_argument("sphere_measure: n out of range");
  }
}

// Volume of the unit ball in R^n.
inline double ball_measure(int n) { return sphere_measure(n) / n; }

// All randomness flows through mt19937_64 streams derived from a user seed
// and a fixed per-purpose tag, so independent stages stay reproducible.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{seed, tag};
  return std::mt19937_64(seq);
}

// Process exit codes used by the CLI.
enum ExitCode : int {
  EXIT_OK = 0,
  EXIT_CONFIG = 1,
  EXIT_IO = 2,
  EXIT_NUMERIC = 3,
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// FNV-1a over a byte string; used to hash canonicalized run configurations.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace wpx
