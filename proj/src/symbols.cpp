#include "wpx/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "wpx/fft.hpp"
#include "wpx/kernels.hpp"
#include "wpx/profiles.hpp"

namespace wpx {

namespace {

std::size_t grid_total(int n, int N) {
  std::size_t t = 1;
  for (int i = 0; i < n; ++i) t *= static_cast<std::size_t>(N);
  return t;
}

Vec grid_point(int n, int N, std::size_t m) {
  Vec x(n);
  double h = TWO_PI / N;
  for (int d = n - 1; d >= 0; --d) {
    x[d] = h * static_cast<double>(m % N);
    m /= N;
  }
  return x;
}

Vec bin_freq(int n, int N, std::size_t idx) {
  Vec z(n);
  for (int d = n - 1; d >= 0; --d) {
    z[d] = fft_freq(static_cast<int>(idx % N), N);
    idx /= N;
  }
  return z;
}

// Quadratic basis q_c(xi) = (2 - delta_ij) xi_i xi_j for component c = (i,j).
void comp_pairs(int n, int* ci, int* cj) {
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ci[c] = i;
      cj[c] = j;
      ++c;
    }
}

double quad_basis(int i, int j, const Vec& xi) {
  return (i == j ? 1.0 : 2.0) * xi[i] * xi[j];
}

void quad_basis_grad(int i, int j, const Vec& xi, Vec& g) {
  for (int d = 0; d < xi.n; ++d) g[d] = 0;
  if (i == j) {
    g[i] = 2.0 * xi[i];
  } else {
    g[i] = 2.0 * xi[j];
    g[j] = 2.0 * xi[i];
  }
}

std::vector<std::vector<double>> spectral_gradient(
    const std::vector<double>& f, int n, int N) {
  std::size_t total = f.size();
  std::vector<cd> spec(total);
  for (std::size_t m = 0; m < total; ++m) spec[m] = f[m];
  fft::forward(spec.data(), n, N);
  std::vector<std::vector<double>> out(n);
  std::vector<cd> buf(total);
  for (int d = 0; d < n; ++d) {
    for (std::size_t idx = 0; idx < total; ++idx) {
      Vec z = bin_freq(n, N, idx);
      buf[idx] = cd(0, z[d]) * spec[idx];  // true partial d/dx_d
    }
    fft::inverse(buf.data(), n, N);
    out[d].resize(total);
    for (std::size_t m = 0; m < total; ++m) out[d][m] = buf[m].real();
  }
  return out;
}

struct SparseMode {
  Vec freq;
  cd amp;
};

// Exact Fourier modes of a real grid field, folded onto a half lattice so
// the field is Re(sum amp e^{i freq.x}). Returns false if the field has too
// many modes to be worth evaluating by trigonometric sums.
bool extract_modes(const std::vector<double>& f, int n, int N,
                   std::vector<SparseMode>& modes, std::size_t cap = 64) {
  std::size_t total = f.size();
  std::vector<cd> spec(total);
  for (std::size_t m = 0; m < total; ++m) spec[m] = f[m];
  fft::forward(spec.data(), n, N);
  double top = 0;
  for (auto& s : spec) top = std::max(top, std::abs(s));
  double tol = 1e-13 * std::max(1.0, top);
  modes.clear();
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (std::abs(spec[idx]) <= tol) continue;
    Vec z = bin_freq(n, N, idx);
    bool self = true, canonical = true;
    for (int d = 0; d < n; ++d) {
      if (z[d] != 0 && z[d] != -N / 2) self = false;
    }
    if (!self) {
      for (int d = 0; d < n; ++d) {
        if (z[d] == 0) continue;
        canonical = z[d] > 0;
        break;
      }
    }
    if (!canonical) continue;
    modes.push_back({z, self ? spec[idx] : 2.0 * spec[idx]});
    if (modes.size() > cap) return false;
  }
  return true;
}

double field_sup(const std::vector<double>& f) {
  double s = 0;
  for (double v : f) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// CoefficientMatrix.

int CoefficientMatrix::comp_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

std::size_t CoefficientMatrix::grid_total() const {
  return wpx::grid_total(n, grid_size);
}

CoefficientMatrix flat_coefficients(int n, int N) {
  CoefficientMatrix a;
  a.n = n;
  a.grid_size = N;
  a.reg_r = 0;
  a.amplitude = 0;
  a.kappa0 = 1;
  std::size_t total = grid_total(n, N);
  a.comp.assign(CoefficientMatrix::comp_count(n), std::vector<double>());
  int ci[6], cj[6];
  comp_pairs(n, ci, cj);
  for (int c = 0; c < CoefficientMatrix::comp_count(n); ++c)
    a.comp[c].assign(total, ci[c] == cj[c] ? 1.0 : 0.0);
  return a;
}

CoefficientMatrix gen_rough_coeffs(int n, int N, double r, double amplitude,
                                   std::uint64_t seed, double amp_bound) {
  if (n < 1 || n > MAX_DIM) throw config_error("coefficients: bad dimension");
  if (r <= 0) throw config_error("coefficients: decay exponent must be > 0");
  if (amplitude < 0 || amplitude > amp_bound)
    throw config_error("coefficients: amplitude outside ellipticity-safe range");
  CoefficientMatrix a = flat_coefficients(n, N);
  a.reg_r = r;
  a.amplitude = amplitude;
  a.seed = seed;
  std::size_t total = a.grid_total();
  int jmax = std::max(1, static_cast<int>(std::floor(std::log2(N / 4.0))));
  int ci[6], cj[6];
  comp_pairs(n, ci, cj);
  for (int c = 0; c < CoefficientMatrix::comp_count(n); ++c) {
    if (ci[c] != cj[c]) continue;  // perturbation on the diagonal only
    for (int j = 1; j <= jmax; ++j) {
      // One stream per (component, scale) so coarse scales agree across
      // grid resolutions sharing a seed.
      auto rng = make_rng(seed, 0x6366ull + (static_cast<std::uint64_t>(ci[c]) << 8) + j);
      std::uniform_real_distribution<double> uni(0.0, TWO_PI);
      Vec dir(n);
      if (n == 1) {
        dir[0] = 1;
      } else if (n == 2) {
        double th = uni(rng);
        dir = Vec(std::cos(th), std::sin(th));
      } else {
        std::uniform_real_distribution<double> uz(-1.0, 1.0);
        double z = uz(rng), ph = uni(rng), s = std::sqrt(1 - z * z);
        dir = Vec(s * std::cos(ph), s * std::sin(ph), z);
      }
      double phase = uni(rng);
      double mag = std::pow(2.0, j);
      Vec kap(n);
      bool nonzero = false;
      for (int d = 0; d < n; ++d) {
        double v = std::round(mag * dir[d]);
        v = std::min(v, N / 2 - 1.0);
        v = std::max(v, -(N / 2 - 1.0));
        kap[d] = v;
        nonzero = nonzero || v != 0;
      }
      if (!nonzero) kap[0] = std::min(mag, N / 2 - 1.0);
      double w = amplitude * std::pow(2.0, -j * r);
      for (std::size_t m = 0; m < total; ++m) {
        Vec x = grid_point(n, N, m);
        a.comp[c][m] += w * std::cos(kap.dot(x) + phase);
      }
    }
  }
  // Ellipticity constant: exact smallest eigenvalue for n <= 2, Gershgorin
  // lower bound otherwise (off-diagonals vanish here, so it is exact too).
  double kmin = 1e300;
  for (std::size_t m = 0; m < total; ++m) {
    if (n == 1) {
      kmin = std::min(kmin, a.comp[0][m]);
    } else if (n == 2) {
      double a11 = a.at(0, 0)[m], a22 = a.at(1, 1)[m], a12 = a.at(0, 1)[m];
      double mid = 0.5 * (a11 + a22);
      double rad = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
      kmin = std::min(kmin, mid - rad);
    } else {
      for (int i = 0; i < n; ++i) {
        double row = a.at(i, i)[m];
        for (int j = 0; j < n; ++j)
          if (j != i) row -= std::abs(a.at(i, j)[m]);
        kmin = std::min(kmin, row);
      }
    }
  }
  a.kappa0 = kmin;
  if (a.kappa0 <= 0.05)
    throw numeric_error("coefficients: ellipticity constant below 0.05");
  return a;
}

void save_coeffs(const CoefficientMatrix& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out.write("WPCF", 4);
  std::int32_t hdr[4] = {1, a.n, a.grid_size,
                         static_cast<std::int32_t>(a.comp.size())};
  out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  double meta[3] = {a.reg_r, a.amplitude, a.kappa0};
  out.write(reinterpret_cast<const char*>(meta), sizeof meta);
  out.write(reinterpret_cast<const char*>(&a.seed), sizeof a.seed);
  for (const auto& f : a.comp)
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!out) throw io_error("write failed: " + path);
}

CoefficientMatrix load_coeffs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "WPCF", 4) != 0)
    throw io_error("bad coefficient file: " + path);
  std::int32_t hdr[4];
  in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  CoefficientMatrix a;
  a.n = hdr[1];
  a.grid_size = hdr[2];
  if (hdr[0] != 1 || a.n < 1 || a.n > MAX_DIM || a.grid_size < 2 ||
      hdr[3] != CoefficientMatrix::comp_count(a.n))
    throw io_error("bad coefficient header: " + path);
  double meta[3];
  in.read(reinterpret_cast<char*>(meta), sizeof meta);
  a.reg_r = meta[0];
  a.amplitude = meta[1];
  a.kappa0 = meta[2];
  in.read(reinterpret_cast<char*>(&a.seed), sizeof a.seed);
  std::size_t total = a.grid_total();
  a.comp.assign(hdr[3], std::vector<double>(total));
  for (auto& f : a.comp)
    in.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(total * sizeof(double)));
  if (!in) throw io_error("truncated coefficient file: " + path);
  return a;
}

// ---------------------------------------------------------------------------
// Symbol base defaults.

void Symbol::eval_lattice(const Vec& xi, cd* out) const {
  std::size_t total = grid_total(n, grid_size);
  for (std::size_t m = 0; m < total; ++m)
    out[m] = eval(grid_point(n, grid_size, m), xi);
}

void Symbol::grad(const Vec& x, const Vec& xi, Vec& gx, Vec& gxi) const {
  double hx = grid_size > 0 ? TWO_PI / grid_size : 1e-3;
  double hxi = 1.0;
  gx = Vec(n);
  gxi = Vec(n);
  for (int d = 0; d < n; ++d) {
    Vec xp = x, xm = x;
    xp[d] += hx;
    xm[d] -= hx;
    gx[d] = (eval(xp, xi).real() - eval(xm, xi).real()) / (2 * hx);
    Vec zp = xi, zm = xi;
    zp[d] += hxi;
    zm[d] -= hxi;
    gxi[d] = (eval(x, zp).real() - eval(x, zm).real()) / (2 * hxi);
  }
}

void Symbol::eval_grad(const Vec& x, const Vec& xi, double& val, Vec& gx,
                       Vec& gxi) const {
  val = eval(x, xi).real();
  grad(x, xi, gx, gxi);
}

// ---------------------------------------------------------------------------
// MultiplierSymbol / PointwiseSymbol.

MultiplierSymbol::MultiplierSymbol(int n_, int N, double order_,
                                   std::function<cd(const Vec&)> f,
                                   std::function<Vec(const Vec&)> gradf)
    : f_(std::move(f)), gradf_(std::move(gradf)) {
  n = n_;
  grid_size = N;
  order = order_;
  x_independent = true;
}

void MultiplierSymbol::eval_lattice(const Vec& xi, cd* out) const {
  std::size_t total = grid_total(n, grid_size);
  cd v = f_(xi);
  for (std::size_t m = 0; m < total; ++m) out[m] = v;
}

void MultiplierSymbol::grad(const Vec&, const Vec& xi, Vec& gx,
                            Vec& gxi) const {
  gx = Vec(n);
  if (gradf_) {
    gxi = gradf_(xi);
    return;
  }
  gxi = Vec(n);
  double h = 1.0;
  for (int d = 0; d < n; ++d) {
    Vec zp = xi, zm = xi;
    zp[d] += h;
    zm[d] -= h;
    gxi[d] = (f_(zp).real() - f_(zm).real()) / (2 * h);
  }
}

PointwiseSymbol::PointwiseSymbol(int n_, int N, std::vector<double> field)
    : field_(std::move(field)) {
  n = n_;
  grid_size = N;
  xi_independent = true;
  if (field_.size() != grid_total(n, N))
    throw config_error("pointwise symbol: field size mismatch");
  sep_.terms.push_back({&field_, [](const Vec&) { return 1.0; }});
}

cd PointwiseSymbol::eval(const Vec& x, const Vec&) const {
  return interp_field(field_, n, grid_size, x);
}

void PointwiseSymbol::eval_lattice(const Vec&, cd* out) const {
  for (std::size_t m = 0; m < field_.size(); ++m) out[m] = field_[m];
}

// ---------------------------------------------------------------------------
// SeparableSymbol.

SeparableSymbol::SeparableSymbol(int n_, int N, double order_,
                                 std::vector<TermSpec> specs) {
  n = n_;
  grid_size = N;
  order = order_;
  std::size_t total = grid_total(n, N);
  terms_.reserve(specs.size());
  for (auto& s : specs) {
    if (s.field.size() != total)
      throw config_error("separable symbol: field size mismatch");
    Term t;
    t.field = std::move(s.field);
    t.fxi = std::move(s.fxi);
    t.dfxi = std::move(s.dfxi);
    t.gradf = spectral_gradient(t.field, n, N);
    std::vector<SparseMode> sm;
    t.sparse = extract_modes(t.field, n, N, sm);
    if (t.sparse)
      for (const auto& m : sm) t.modes.push_back({m.freq, m.amp});
    terms_.push_back(std::move(t));
  }
  for (auto& t : terms_) sep_.terms.push_back({&t.field, t.fxi});
}

double SeparableSymbol::field_value(const Term& t, const Vec& x) const {
  if (t.sparse) {
    double v = 0;
    for (const auto& m : t.modes) {
      double ph = m.freq.dot(x);
      v += m.amp.real() * std::cos(ph) - m.amp.imag() * std::sin(ph);
    }
    return v;
  }
  return interp_field(t.field, n, grid_size, x);
}

Vec SeparableSymbol::field_grad(const Term& t, const Vec& x) const {
  Vec g(n);
  if (t.sparse) {
    for (const auto& m : t.modes) {
      double ph = m.freq.dot(x);
      double im = m.amp.real() * std::sin(ph) + m.amp.imag() * std::cos(ph);
      for (int d = 0; d < n; ++d) g[d] -= m.freq[d] * im;
    }
    return g;
  }
  for (int d = 0; d < n; ++d)
    g[d] = interp_field(t.gradf[d], n, grid_size, x);
  return g;
}

cd SeparableSymbol::eval(const Vec& x, const Vec& xi) const {
  double v = 0;
  for (const auto& t : terms_) {
    double h = t.fxi(xi);
    if (h != 0) v += h * field_value(t, x);
  }
  return v;
}

void SeparableSymbol::eval_lattice(const Vec& xi, cd* out) const {
  std::size_t total = grid_total(n, grid_size);
  for (std::size_t m = 0; m < total; ++m) out[m] = 0;
  for (const auto& t : terms_) {
    double h = t.fxi(xi);
    if (h == 0) continue;
    for (std::size_t m = 0; m < total; ++m) out[m] += h * t.field[m];
  }
}

void SeparableSymbol::grad(const Vec& x, const Vec& xi, Vec& gx,
                           Vec& gxi) const {
  gx = Vec(n);
  gxi = Vec(n);
  double hxi = 0.25 * std::max(1.0, xi.norm() / 32.0);
  for (const auto& t : terms_) {
    double h = t.fxi(xi);
    double cv = field_value(t, x);
    if (h != 0) {
      Vec fg = field_grad(t, x);
      for (int d = 0; d < n; ++d) gx[d] += h * fg[d];
    }
    if (cv == 0) continue;
    if (t.dfxi) {
      Vec dh = t.dfxi(xi);
      for (int d = 0; d < n; ++d) gxi[d] += cv * dh[d];
    } else {
      for (int d = 0; d < n; ++d) {
        Vec zp = xi, zm = xi;
        zp[d] += hxi;
        zm[d] -= hxi;
        gxi[d] += cv * (t.fxi(zp) - t.fxi(zm)) / (2 * hxi);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Littlewood-Paley helpers.

int shell_count(int N) {
  return std::max(1, static_cast<int>(std::ceil(2.0 * std::log2(N / 2.0))));
}

namespace {
double pl(double r, int k) { return plateau(std::ldexp(r, -k)); }
double pld(double r, int k) {
  return plateau_deriv(std::ldexp(r, -k)) * std::ldexp(1.0, -k);
}
}  // namespace

double shell_weight(int k, int K, double r) {
  if (K == 0) return 1.0;
  if (k == 0) return pl(r, 0);
  if (k == K) return 1.0 - pl(r, K - 1);
  return pl(r, k) - pl(r, k - 1);
}

double shell_weight_deriv(int k, int K, double r) {
  if (K == 0) return 0.0;
  if (k == 0) return pld(r, 0);
  if (k == K) return -pld(r, K - 1);
  return pld(r, k) - pld(r, k - 1);
}

std::vector<double> lowpass_field(const std::vector<double>& f, int n, int N,
                                  double cutoff) {
  std::size_t total = f.size();
  std::vector<cd> spec(total);
  for (std::size_t m = 0; m < total; ++m) spec[m] = f[m];
  fft::forward(spec.data(), n, N);
  for (std::size_t idx = 0; idx < total; ++idx)
    spec[idx] *= plateau(bin_freq(n, N, idx).norm() / cutoff);
  fft::inverse(spec.data(), n, N);
  std::vector<double> out(total);
  for (std::size_t m = 0; m < total; ++m) out[m] = spec[m].real();
  return out;
}

double interp_field(const std::vector<double>& f, int n, int N, const Vec& x) {
  double h = TWO_PI / N;
  int base[MAX_DIM];
  double fr[MAX_DIM];
  for (int d = 0; d < n; ++d) {
    double u = x[d] / h;
    double fl = std::floor(u);
    base[d] = static_cast<int>(fl) % N;
    if (base[d] < 0) base[d] += N;
    fr[d] = u - fl;
  }
  double v = 0;
  int corners = 1 << n;
  for (int c = 0; c < corners; ++c) {
    double w = 1;
    std::size_t idx = 0;
    for (int d = 0; d < n; ++d) {
      int bit = (c >> d) & 1;
      w *= bit ? fr[d] : 1.0 - fr[d];
      int id = base[d] + bit;
      if (id >= N) id -= N;
      idx = idx * N + static_cast<std::size_t>(id);
    }
    v += w * f[idx];
  }
  return v;
}

SymbolSplit smooth_split(const Symbol& a) {
  const SeparableData* sd = a.separable();
  if (!sd || sd->terms.empty())
    throw config_error(
        "smooth_split: symbol lacks a separable coefficient representation");
  int n = a.n, N = a.grid_size;
  int K = shell_count(N);
  SymbolSplit out;
  out.shells = K + 1;
  std::vector<SeparableSymbol::TermSpec> sharp, flat;
  for (const auto& term : sd->terms) {
    const std::vector<double>& c = *term.field;
    auto base_fxi = term.fxi;
    for (int k = 0; k <= K; ++k) {
      double cutoff = std::min(std::ldexp(1.0, 0) * std::pow(2.0, 0.5 * k),
                               N / 2.0);
      if (std::pow(2.0, 0.5 * k) > N / 2.0) out.truncated = true;
      std::vector<double> low = lowpass_field(c, n, N, cutoff);
      std::vector<double> high(low.size());
      for (std::size_t m = 0; m < low.size(); ++m) high[m] = c[m] - low[m];
      auto fxi = [base_fxi, k, K](const Vec& xi) {
        return shell_weight(k, K, xi.norm()) * base_fxi(xi);
      };
      if (field_sup(low) > 1e-14)
        sharp.push_back({std::move(low), fxi, nullptr});
      if (field_sup(high) > 1e-14)
        flat.push_back({std::move(high), fxi, nullptr});
    }
  }
  out.sharp = std::make_shared<SeparableSymbol>(n, N, a.order, std::move(sharp));
  out.flat = std::make_shared<SeparableSymbol>(n, N, a.order, std::move(flat));
  return out;
}

// ---------------------------------------------------------------------------
// MetricSymbol.

MetricSymbol::MetricSymbol(std::shared_ptr<const CoefficientMatrix> a,
                           MetricMode mode)
    : coeffs_(std::move(a)), mode_(mode) {
  n = coeffs_->n;
  grid_size = coeffs_->grid_size;
  order = 2;
  int N = grid_size;
  ncomp_ = CoefficientMatrix::comp_count(n);
  K_ = mode == MetricMode::raw ? 0 : shell_count(N);
  std::size_t total = grid_total(n, N);

  // Sparse modes per component (shared frequency list).
  std::vector<std::vector<SparseMode>> comp_modes(ncomp_);
  sparse_ = true;
  for (int c = 0; c < ncomp_; ++c)
    sparse_ = sparse_ && extract_modes(coeffs_->comp[c], n, N, comp_modes[c]);
  if (sparse_) {
    for (int c = 0; c < ncomp_ && sparse_; ++c)
      for (const auto& m : comp_modes[c]) {
        bool found = false;
        for (const auto& f : mode_freq_) {
          bool same = true;
          for (int d = 0; d < n; ++d) same = same && f[d] == m.freq[d];
          if (same) {
            found = true;
            break;
          }
        }
        if (!found) mode_freq_.push_back(m.freq);
        if (mode_freq_.size() > 128) {
          sparse_ = false;
          break;
        }
      }
  }
  if (sparse_) {
    std::size_t M = mode_freq_.size();
    amp_.assign(static_cast<std::size_t>(K_ + 1) * ncomp_ * M, cd(0));
    for (int k = 0; k <= K_; ++k) {
      double cutoff = std::min(std::pow(2.0, 0.5 * k), N / 2.0);
      for (int c = 0; c < ncomp_; ++c)
        for (const auto& m : comp_modes[c]) {
          std::size_t mi = 0;
          for (; mi < M; ++mi) {
            bool same = true;
            for (int d = 0; d < n; ++d)
              same = same && mode_freq_[mi][d] == m.freq[d];
            if (same) break;
          }
          double p = mode_ == MetricMode::raw
                         ? 1.0
                         : plateau(m.freq.norm() / cutoff);
          if (mode_ == MetricMode::flat) p = 1.0 - p;
          amp_[(static_cast<std::size_t>(k) * ncomp_ + c) * M + mi] =
              m.amp * p;
          if (m.freq.norm() > N / 4.0) truncated_ = true;
        }
    }
  }

  // Grid fields per (shell, component) for lattice evaluation / quantize.
  fields_.resize(static_cast<std::size_t>(K_ + 1) * ncomp_);
  for (int k = 0; k <= K_; ++k) {
    double cutoff = std::min(std::pow(2.0, 0.5 * k), N / 2.0);
    for (int c = 0; c < ncomp_; ++c) {
      auto& dst = fields_[static_cast<std::size_t>(k) * ncomp_ + c];
      if (mode_ == MetricMode::raw) {
        dst = coeffs_->comp[c];
      } else {
        dst = lowpass_field(coeffs_->comp[c], n, N, cutoff);
        if (mode_ == MetricMode::flat)
          for (std::size_t m = 0; m < total; ++m)
            dst[m] = coeffs_->comp[c][m] - dst[m];
      }
    }
  }
  int ci[6], cj[6];
  comp_pairs(n, ci, cj);
  for (int k = 0; k <= K_; ++k)
    for (int c = 0; c < ncomp_; ++c) {
      int i = ci[c], j = cj[c], kk = k, KK = K_;
      sep_.terms.push_back(
          {&fields_[static_cast<std::size_t>(k) * ncomp_ + c],
           [i, j, kk, KK](const Vec& xi) {
             return shell_weight(kk, KK, xi.norm()) * quad_basis(i, j, xi);
           }});
    }
}

int MetricSymbol::active_shells(double r, ShellHit* hits) const {
  if (K_ == 0) {
    hits[0] = {0, 1.0, 0.0};
    return 1;
  }
  int cnt = 0;
  for (int k = 0; k <= K_; ++k) {
    // w_k is supported in 2^{k-2} < r < 2^k (tail shells open-ended).
    if (k < K_ && r >= std::ldexp(1.0, k)) continue;
    if (k > 0 && r <= std::ldexp(1.0, k - 2)) continue;
    double w = shell_weight(k, K_, r);
    if (w == 0 && shell_weight_deriv(k, K_, r) == 0) continue;
    hits[cnt++] = {k, w, shell_weight_deriv(k, K_, r)};
    if (cnt == 3) break;
  }
  if (cnt == 0) hits[cnt++] = {0, shell_weight(0, K_, r), 0.0};
  return cnt;
}

cd MetricSymbol::eval(const Vec& x, const Vec& xi) const {
  double v;
  Vec gx(n), gxi(n);
  eval_grad(x, xi, v, gx, gxi);
  return v;
}

void MetricSymbol::grad(const Vec& x, const Vec& xi, Vec& gx, Vec& gxi) const {
  double v;
  eval_grad(x, xi, v, gx, gxi);
}

void MetricSymbol::eval_grad(const Vec& x, const Vec& xi, double& val, Vec& gx,
                             Vec& gxi) const {
  ShellHit hits[3];
  int nh = active_shells(xi.norm(), hits);
  int ci[6], cj[6];
  comp_pairs(n, ci, cj);
  double cval[3][6];
  double cgx[3][6][MAX_DIM];
  for (int h = 0; h < nh; ++h)
    for (int c = 0; c < ncomp_; ++c) {
      cval[h][c] = 0;
      for (int d = 0; d < n; ++d) cgx[h][c][d] = 0;
    }
  if (sparse_) {
    std::size_t M = mode_freq_.size();
    for (std::size_t mi = 0; mi < M; ++mi) {
      const Vec& fr = mode_freq_[mi];
      double ph = fr.dot(x);
      double cph = std::cos(ph), sph = std::sin(ph);
      for (int h = 0; h < nh; ++h) {
        std::size_t off =
            (static_cast<std::size_t>(hits[h].k) * ncomp_) * M + mi;
        for (int c = 0; c < ncomp_; ++c) {
          cd a = amp_[off + static_cast<std::size_t>(c) * M];
          if (a.real() == 0 && a.imag() == 0) continue;
          cval[h][c] += a.real() * cph - a.imag() * sph;
          double im = a.real() * sph + a.imag() * cph;
          for (int d = 0; d < n; ++d) cgx[h][c][d] -= fr[d] * im;
        }
      }
    }
  } else {
    for (int h = 0; h < nh; ++h)
      for (int c = 0; c < ncomp_; ++c) {
        const auto& f =
            fields_[static_cast<std::size_t>(hits[h].k) * ncomp_ + c];
        cval[h][c] = interp_field(f, n, grid_size, x);
        // Gradient by centered differences of the interpolant (dense
        // fallback; the generated coefficients always take the sparse path).
        double hstep = TWO_PI / grid_size;
        for (int d = 0; d < n; ++d) {
          Vec xp = x, xm = x;
          xp[d] += hstep;
          xm[d] -= hstep;
          cgx[h][c][d] = (interp_field(f, n, grid_size, xp) -
                          interp_field(f, n, grid_size, xm)) /
                         (2 * hstep);
        }
      }
  }
  val = 0;
  gx = Vec(n);
  gxi = Vec(n);
  Vec xhat = xi.hat();
  for (int h = 0; h < nh; ++h) {
    double Q = 0;
    Vec Qxi(n);
    Vec qg(n);
    for (int c = 0; c < ncomp_; ++c) {
      double q = quad_basis(ci[c], cj[c], xi);
      Q += cval[h][c] * q;
      quad_basis_grad(ci[c], cj[c], xi, qg);
      for (int d = 0; d < n; ++d) {
        Qxi[d] += cval[h][c] * qg[d];
        gx[d] += hits[h].w * cgx[h][c][d] * q;
      }
    }
    val += hits[h].w * Q;
    for (int d = 0; d < n; ++d)
      gxi[d] += hits[h].w * Qxi[d] + hits[h].wd * xhat[d] * Q;
  }
}

void MetricSymbol::eval_lattice(const Vec& xi, cd* out) const {
  std::size_t total = grid_total(n, grid_size);
  for (std::size_t m = 0; m < total; ++m) out[m] = 0;
  ShellHit hits[3];
  int nh = active_shells(xi.norm(), hits);
  int ci[6], cj[6];
  comp_pairs(n, ci, cj);
  for (int h = 0; h < nh; ++h) {
    if (hits[h].w == 0) continue;
    for (int c = 0; c < ncomp_; ++c) {
      double coef = hits[h].w * quad_basis(ci[c], cj[c], xi);
      if (coef == 0) continue;
      const auto& f =
          fields_[static_cast<std::size_t>(hits[h].k) * ncomp_ + c];
      for (std::size_t m = 0; m < total; ++m) out[m] += coef * f[m];
    }
  }
}

std::shared_ptr<MetricSymbol> make_metric_symbol(
    std::shared_ptr<const CoefficientMatrix> a, MetricMode mode) {
  return std::make_shared<MetricSymbol>(std::move(a), mode);
}

// ---------------------------------------------------------------------------
// SqrtSymbol.

SqrtSymbol::SqrtSymbol(SymbolPtr base, double R)
    : base_(std::move(base)), R_(R) {
  n = base_->n;
  grid_size = base_->grid_size;
  order = base_->order / 2;
  if (R_ <= 0) throw config_error("sqrt symbol: cutoff must be positive");
}

double SqrtSymbol::chi(double r, double* deriv) const {
  double t = r / R_ - 1.0;
  if (deriv) *deriv = smoothstep_deriv(t) / R_;
  return smoothstep(t);
}

cd SqrtSymbol::eval(const Vec& x, const Vec& xi) const {
  double c = chi(xi.norm(), nullptr);
  if (c == 0) return 0;
  double A = base_->eval(x, xi).real();
  if (A <= 0)
    throw numeric_error("sqrt symbol: base symbol not positive on cutoff");
  return c * std::sqrt(A);
}

void SqrtSymbol::eval_grad(const Vec& x, const Vec& xi, double& val, Vec& gx,
                           Vec& gxi) const {
  double cd_, c = chi(xi.norm(), &cd_);
  if (c == 0 && cd_ == 0) {
    val = 0;
    gx = Vec(n);
    gxi = Vec(n);
    return;
  }
  double A;
  Vec Agx(n), Agxi(n);
  base_->eval_grad(x, xi, A, Agx, Agxi);
  if (A <= 0)
    throw numeric_error("sqrt symbol: base symbol not positive on cutoff");
  double s = std::sqrt(A);
  val = c * s;
  Vec xhat = xi.hat();
  for (int d = 0; d < n; ++d) {
    gx[d] = c * Agx[d] / (2 * s);
    gxi[d] = cd_ * xhat[d] * s + c * Agxi[d] / (2 * s);
  }
}

void SqrtSymbol::grad(const Vec& x, const Vec& xi, Vec& gx, Vec& gxi) const {
  double v;
  eval_grad(x, xi, v, gx, gxi);
}

void SqrtSymbol::eval_lattice(const Vec& xi, cd* out) const {
  double c = chi(xi.norm(), nullptr);
  std::size_t total = grid_total(n, grid_size);
  if (c == 0) {
    for (std::size_t m = 0; m < total; ++m) out[m] = 0;
    return;
  }
  base_->eval_lattice(xi, out);
  for (std::size_t m = 0; m < total; ++m) {
    double A = out[m].real();
    if (A <= 0)
      throw numeric_error("sqrt symbol: base symbol not positive on cutoff");
    out[m] = c * std::sqrt(A);
  }
}

// ---------------------------------------------------------------------------
// RayLimitSymbol.

RayLimitSymbol::RayLimitSymbol(SymbolPtr base, double ray_t)
    : base_(std::move(base)), T_(ray_t) {
  n = base_->n;
  grid_size = base_->grid_size;
  order = base_->order;
}

cd RayLimitSymbol::eval(const Vec& x, const Vec& xi) const {
  double r = xi.norm();
  if (r == 0) return 0;
  double m = order;
  return std::pow(r / T_, m) * base_->eval(x, xi.hat() * T_);
}

void RayLimitSymbol::eval_grad(const Vec& x, const Vec& xi, double& val,
                               Vec& gx, Vec& gxi) const {
  double r = xi.norm();
  gx = Vec(n);
  gxi = Vec(n);
  if (r == 0) {
    val = 0;
    return;
  }
  double m = order;
  Vec xhat = xi.hat();
  double bv;
  Vec bgx(n), bgxi(n);
  base_->eval_grad(x, xhat * T_, bv, bgx, bgxi);
  double scale = std::pow(r / T_, m);
  val = scale * bv;
  for (int d = 0; d < n; ++d) gx[d] = scale * bgx[d];
  // d/dxi [ r^m phi(xihat) ]: radial part + tangential projection.
  double phi = bv / std::pow(T_, m);
  for (int d = 0; d < n; ++d) {
    double tang = 0;
    for (int e = 0; e < n; ++e) {
      double proj = (d == e ? 1.0 : 0.0) - xhat[d] * xhat[e];
      tang += proj * bgxi[e];
    }
    gxi[d] = m * std::pow(r, m - 1) * phi * xhat[d] +
             std::pow(r, m - 1) * tang * std::pow(T_, 1 - m);
  }
}

void RayLimitSymbol::grad(const Vec& x, const Vec& xi, Vec& gx,
                          Vec& gxi) const {
  double v;
  eval_grad(x, xi, v, gx, gxi);
}

// ---------------------------------------------------------------------------
// quantize.

namespace {

// out[m] += buf[m] * c * e^{i zeta.x_m}, phases from the unit-root table.
void direct_accumulate(const cd* buf, cd c, const int* z, int n, int N,
                       const std::vector<cd>& unit, cd* out,
                       std::vector<cd>& trow) {
  auto pidx = [N](long long i, long long zz) {
    long long r = (i * zz) % N;
    return static_cast<std::size_t>(r < 0 ? r + N : r);
  };
  const auto& ops = kernels::active();
  if (n == 1) {
    for (int i = 0; i < N; ++i) trow[i] = c * unit[pidx(i, z[0])];
    ops.cmul_accum(buf, trow.data(), out, static_cast<std::size_t>(N));
    return;
  }
  std::vector<cd> col(N);
  for (int i = 0; i < N; ++i) col[i] = unit[pidx(i, z[n - 1])];
  if (n == 2) {
    for (int i0 = 0; i0 < N; ++i0) {
      cd cc = c * unit[pidx(i0, z[0])];
      for (int i1 = 0; i1 < N; ++i1) trow[i1] = cc * col[i1];
      std::size_t off = static_cast<std::size_t>(i0) * N;
      ops.cmul_accum(buf + off, trow.data(), out + off,
                     static_cast<std::size_t>(N));
    }
    return;
  }
  for (int i0 = 0; i0 < N; ++i0)
    for (int i1 = 0; i1 < N; ++i1) {
      cd cc = c * unit[pidx(i0, z[0])] * unit[pidx(i1, z[1])];
      for (int i2 = 0; i2 < N; ++i2) trow[i2] = cc * col[i2];
      std::size_t off = (static_cast<std::size_t>(i0) * N + i1) * N;
      ops.cmul_accum(buf + off, trow.data(), out + off,
                     static_cast<std::size_t>(N));
    }
}

std::vector<cd> unit_roots(int N) {
  std::vector<cd> unit(N);
  for (int k = 0; k < N; ++k)
    unit[k] = std::polar(1.0, TWO_PI * k / N);
  return unit;
}

}  // namespace

RealField quantize(const Symbol& a, const RealField& f) {
  int n = f.n, N = f.grid_size;
  if (a.grid_size != 0 && (a.n != n || a.grid_size != N))
    throw config_error("quantize: symbol/field grid mismatch");
  std::vector<cd> spec = f.spectrum();
  std::size_t total = f.size();
  if (a.x_independent) {
    Vec x0(n);
    for (std::size_t idx = 0; idx < total; ++idx)
      spec[idx] *= a.eval(x0, bin_freq(n, N, idx));
    return RealField::from_spectrum(n, N, spec);
  }
  if (a.xi_independent) {
    std::vector<cd> vals(total);
    a.eval_lattice(Vec(n), vals.data());
    RealField out(n, N);
    for (std::size_t m = 0; m < total; ++m) out.data[m] = vals[m] * f.data[m];
    return out;
  }
  if (const SeparableData* sd = a.separable(); sd && !sd->terms.empty()) {
    RealField out(n, N);
    std::vector<cd> tspec(total);
    for (const auto& term : sd->terms) {
      bool any = false;
      for (std::size_t idx = 0; idx < total; ++idx) {
        cd v = spec[idx];
        if (v != cd(0)) {
          double h = term.fxi(bin_freq(n, N, idx));
          v *= h;
          any = any || h != 0;
        }
        tspec[idx] = v;
      }
      if (!any) continue;
      fft::inverse(tspec.data(), n, N);
      kernels::active().rmul_accum(term.field->data(), tspec.data(),
                                   out.data.data(), total);
    }
    return out;
  }
  double cost = std::pow(static_cast<double>(N), 2.0 * n);
  if (cost > 1e10)
    throw config_error("quantize: direct lattice sum too large for this grid");
  RealField out(n, N);
  std::vector<cd> buf(total), trow(N);
  std::vector<cd> unit = unit_roots(N);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (spec[idx] == cd(0)) continue;
    Vec zv = bin_freq(n, N, idx);
    int z[MAX_DIM];
    for (int d = 0; d < n; ++d) z[d] = static_cast<int>(zv[d]);
    a.eval_lattice(zv, buf.data());
    direct_accumulate(buf.data(), spec[idx], z, n, N, unit, out.data.data(),
                      trow);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quantizer.

Quantizer::Quantizer(SymbolPtr sym, double zeta_max, bool truncate)
    : sym_(std::move(sym)),
      n_(sym_->n),
      N_(sym_->grid_size),
      zmax_(zeta_max),
      truncate_(truncate) {
  if (N_ <= 0) throw config_error("quantizer: symbol has no grid");
  if (!sym_->real_valued)
    throw config_error("quantizer: cached tables require a real symbol");
  std::size_t total = grid_total(n_, N_);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vec z = bin_freq(n_, N_, idx);
    if (z.norm() > zmax_) continue;
    Active a;
    a.bin = idx;
    for (int d = 0; d < n_; ++d) a.z[d] = static_cast<int>(z[d]);
    active_.push_back(a);
  }
  double bytes = static_cast<double>(active_.size()) * total * sizeof(float);
  if (bytes > 2.5e9)
    throw config_error("quantizer: symbol table exceeds memory budget");
  table_.resize(active_.size() * total);
  std::vector<cd> buf(total);
  for (std::size_t r = 0; r < active_.size(); ++r) {
    Vec z(n_);
    for (int d = 0; d < n_; ++d) z[d] = active_[r].z[d];
    sym_->eval_lattice(z, buf.data());
    float* row = table_.data() + r * total;
    for (std::size_t m = 0; m < total; ++m)
      row[m] = static_cast<float>(buf[m].real());
  }
  unit_ = unit_roots(N_);
}

void Quantizer::accumulate(const std::vector<cd>& spec, RealField& out,
                           double shift, bool inverse) const {
  std::size_t total = out.size();
  const auto& ops = kernels::active();
  auto pidx = [this](long long i, long long z) {
    long long r = (i * z) % N_;
    return static_cast<std::size_t>(r < 0 ? r + N_ : r);
  };
  std::vector<cd> col(N_);
  cd* o = out.data.data();
  for (std::size_t r = 0; r < active_.size(); ++r) {
    cd c = spec[active_[r].bin];
    if (c == cd(0)) continue;
    const int* z = active_[r].z.data();
    const float* row = table_.data() + r * total;
    for (int i = 0; i < N_; ++i) col[i] = unit_[pidx(i, z[n_ - 1])];
    if (n_ == 1) {
      if (inverse)
        ops.rinv_cmul_accum_f32(row, shift, c, col.data(), o,
                                static_cast<std::size_t>(N_));
      else
        ops.rcmul_accum_f32(row, c, col.data(), o,
                            static_cast<std::size_t>(N_));
    } else if (n_ == 2) {
      for (int i0 = 0; i0 < N_; ++i0) {
        cd cc = c * unit_[pidx(i0, z[0])];
        std::size_t off = static_cast<std::size_t>(i0) * N_;
        if (inverse)
          ops.rinv_cmul_accum_f32(row + off, shift, cc, col.data(), o + off,
                                  static_cast<std::size_t>(N_));
        else
          ops.rcmul_accum_f32(row + off, cc, col.data(), o + off,
                              static_cast<std::size_t>(N_));
      }
    } else {
      for (int i0 = 0; i0 < N_; ++i0)
        for (int i1 = 0; i1 < N_; ++i1) {
          cd cc = c * unit_[pidx(i0, z[0])] * unit_[pidx(i1, z[1])];
          std::size_t off = (static_cast<std::size_t>(i0) * N_ + i1) * N_;
          if (inverse)
            ops.rinv_cmul_accum_f32(row + off, shift, cc, col.data(), o + off,
                                    static_cast<std::size_t>(N_));
          else
            ops.rcmul_accum_f32(row + off, cc, col.data(), o + off,
                                static_cast<std::size_t>(N_));
        }
    }
  }
}

RealField Quantizer::truncate_band(RealField f) const {
  if (!truncate_) return f;
  std::vector<cd> spec = f.spectrum();
  for (std::size_t idx = 0; idx < spec.size(); ++idx)
    if (bin_freq(n_, N_, idx).norm() > zmax_) spec[idx] = 0;
  RealField out = RealField::from_spectrum(n_, N_, spec);
  out.band_limit = static_cast<int>(zmax_);
  return out;
}

RealField Quantizer::apply(const RealField& f) const {
  if (f.n != n_ || f.grid_size != N_)
    throw config_error("quantizer: field grid mismatch");
  RealField out(n_, N_);
  accumulate(f.spectrum(), out, 0.0, false);
  return truncate_band(std::move(out));
}

RealField Quantizer::apply_shifted(const RealField& f, double c) const {
  RealField out = apply(f);
  const cd ic(0.0, c);
  for (std::size_t m = 0; m < out.size(); ++m) out.data[m] += ic * f.data[m];
  return out;
}

RealField Quantizer::apply_inverse(const RealField& f, double c) const {
  if (f.n != n_ || f.grid_size != N_)
    throw config_error("quantizer: field grid mismatch");
  RealField out(n_, N_);
  accumulate(f.spectrum(), out, c, true);
  return truncate_band(std::move(out));
}

RealField Quantizer::inv_neumann(const RealField& g, double c,
                                 double* resid) const {
  RealField z = apply_inverse(g, c);
  RealField r = g;
  r -= apply_shifted(z, c);
  RealField corr = apply_inverse(r, c);
  z += corr;
  if (resid) {
    RealField r2 = g;
    r2 -= apply_shifted(z, c);
    double gn = g.l2_norm();
    *resid = gn > 0 ? r2.l2_norm() / gn : 0.0;
  }
  return z;
}

// ---------------------------------------------------------------------------
// WaveOperator.

RealField WaveOperator::apply(const RealField& f) const {
  const CoefficientMatrix& a = *coeffs;
  int n = f.n, N = f.grid_size;
  if (a.n != n || a.grid_size != N)
    throw config_error("operator: coefficient/field grid mismatch");
  std::size_t total = f.size();
  std::vector<cd> spec = f.spectrum();
  int guard = guard_band(N);
  RealField out(n, N);
  if (form == OperatorForm::divergence) {
    // L f = sum_i D_i ( a_ij D_j f ), D = -i d/dx (multiplier zeta).
    std::vector<std::vector<cd>> dj(n, std::vector<cd>(total));
    for (int j = 0; j < n; ++j) {
      for (std::size_t idx = 0; idx < total; ++idx)
        dj[j][idx] = bin_freq(n, N, idx)[j] * spec[idx];
      fft::inverse(dj[j].data(), n, N);
    }
    std::vector<cd> acc(total, cd(0)), h(total);
    for (int i = 0; i < n; ++i) {
      for (std::size_t m = 0; m < total; ++m) {
        cd s = 0;
        for (int j = 0; j < n; ++j) s += a.at(i, j)[m] * dj[j][m];
        h[m] = s;
      }
      fft::forward(h.data(), n, N);
      for (std::size_t idx = 0; idx < total; ++idx)
        acc[idx] += bin_freq(n, N, idx)[i] * h[idx];
    }
    if (dealias)
      for (std::size_t idx = 0; idx < total; ++idx)
        if (bin_freq(n, N, idx).norm() > guard) acc[idx] = 0;
    fft::inverse(acc.data(), n, N);
    out.data.assign(acc.begin(), acc.end());
  } else {
    // L f = sum_ij a_ij(x) (D_i D_j f)(x).
    std::vector<cd> g(total);
    int ci[6], cj[6];
    comp_pairs(n, ci, cj);
    for (int c = 0; c < CoefficientMatrix::comp_count(n); ++c) {
      for (std::size_t idx = 0; idx < total; ++idx)
        g[idx] = quad_basis(ci[c], cj[c], bin_freq(n, N, idx)) * spec[idx];
      fft::inverse(g.data(), n, N);
      kernels::active().rmul_accum(a.comp[c].data(), g.data(),
                                   out.data.data(), total);
    }
    if (dealias) {
      std::vector<cd> os = out.spectrum();
      for (std::size_t idx = 0; idx < total; ++idx)
        if (bin_freq(n, N, idx).norm() > guard) os[idx] = 0;
      out = RealField::from_spectrum(n, N, os);
    }
  }
  out.band_limit = guard;
  return out;
}

double WaveOperator::lambda_max() const {
  const CoefficientMatrix& a = *coeffs;
  int n = a.n;
  std::size_t total = a.grid_total();
  double top = 0;
  for (std::size_t m = 0; m < total; ++m) {
    if (n == 1) {
      top = std::max(top, a.comp[0][m]);
    } else if (n == 2) {
      double a11 = a.at(0, 0)[m], a22 = a.at(1, 1)[m], a12 = a.at(0, 1)[m];
      double mid = 0.5 * (a11 + a22);
      double rad = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
      top = std::max(top, mid + rad);
    } else {
      for (int i = 0; i < n; ++i) {
        double row = a.at(i, i)[m];
        for (int j = 0; j < n; ++j)
          if (j != i) row += std::abs(a.at(i, j)[m]);
        top = std::max(top, row);
      }
    }
  }
  return top;
}

WaveOperator build_operator(std::shared_ptr<const CoefficientMatrix> a,
                            OperatorForm form) {
  WaveOperator op;
  op.form = form;
  op.coeffs = std::move(a);
  return op;
}

// ---------------------------------------------------------------------------
// Diagnostics.

ShiftSearch shift_for_invertibility(const Quantizer& qb, std::uint64_t seed,
                                    double c_max, int nfields,
                                    bool full_trace) {
  const Symbol& b = qb.symbol();
  std::vector<RealField> fields;
  for (int i = 0; i < nfields; ++i)
    fields.push_back(random_band_limited(b.n, b.grid_size, 1.0,
                                         0.9 * qb.zeta_max(), seed,
                                         0x5150ull + i));
  ShiftSearch out;
  bool found = false;
  int extra = 0;
  for (double c = 1.0; c <= c_max; c *= 2.0) {
    double worst = 0;
    for (const auto& f : fields) {
      RealField z = qb.apply_inverse(f, c);
      RealField r = f;
      r -= qb.apply_shifted(z, c);
      worst = std::max(worst, r.l2_norm() / f.l2_norm());
    }
    out.trace.emplace_back(c, worst);
    if (!found && worst <= 0.5) {
      out.c = c;
      found = true;
    }
    if (found) {
      if (!full_trace || ++extra >= 3) break;
    }
  }
  if (!found)
    throw numeric_error("shift search: no dyadic shift reached residual 1/2");
  return out;
}

HomogReport check_asymp_homog(const Symbol& b, std::uint64_t seed,
                              std::vector<double> mags,
                              std::array<double, 3> ray_ts) {
  int n = b.n;
  double m = b.order;
  auto rngx = make_rng(seed, 7001), rngd = make_rng(seed, 7002);
  std::uniform_real_distribution<double> uni(0.0, TWO_PI);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> xs, dirs;
  for (int i = 0; i < 8; ++i) {
    Vec x(n);
    for (int d = 0; d < n; ++d) x[d] = uni(rngx);
    xs.push_back(x);
    Vec v(n);
    double nn = 0;
    do {
      for (int d = 0; d < n; ++d) v[d] = gauss(rngd);
      nn = v.norm();
    } while (nn < 1e-8);
    dirs.push_back(v * (1.0 / nn));
  }
  HomogReport rep;
  // Sup over an octave around each magnitude: shell-weight transitions sit
  // between dyadic radii, so sampling only |xi| = mag can miss them.
  static const double oct[5] = {0.757858283, 0.870550563, 1.0, 1.148698355,
                                1.319507911};
  for (double mag : mags) {
    double sup = 0;
    for (const auto& x : xs)
      for (const auto& nu : dirs)
        for (double f : oct) {
          Vec xi = nu * (mag * f);
          Vec gx(n), gxi(n);
          double val;
          b.eval_grad(x, xi, val, gx, gxi);
          sup = std::max(sup, std::abs(xi.dot(gxi) - m * val));
        }
    rep.sup_g.emplace_back(mag, sup);
  }
  // Least-squares slope of log2(sup) against log2(|xi|).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (auto& [mag, sup] : rep.sup_g) {
    if (sup <= 0) continue;
    double lx = std::log2(mag), ly = std::log2(sup);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  rep.decay_slope =
      cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
  for (int step = 0; step < 2; ++step) {
    double sup = 0;
    for (const auto& x : xs)
      for (const auto& nu : dirs) {
        double t0 = ray_ts[step], t1 = ray_ts[step + 1];
        double h0 = b.eval(x, nu * t0).real() / std::pow(t0, m);
        double h1 = b.eval(x, nu * t1).real() / std::pow(t1, m);
        sup = std::max(sup, std::abs(h1 - h0));
      }
    rep.ray_diff[step] = sup;
  }
  rep.ray_ratio = rep.ray_diff[0] / std::max(rep.ray_diff[1], 1e-300);
  return rep;
}

}  // namespace wpx
