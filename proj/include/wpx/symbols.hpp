#pragma once
// Rough symbols a(x, xi) on the torus and their calculus:
//   - CoefficientMatrix: symmetric a_ij(x) fields (lacunary generator, I/O);
//   - Symbol hierarchy: multiplier (x-independent), pointwise (xi-independent),
//     generic separable sums  a = sum_q c_q(x) h_q(xi), and the metric symbol
//     A(x,xi) = sum a_ij(x) xi_i xi_j with its frequency-localized smoothing;
//   - smooth_split: a = a_sharp + a_flat, where shell k of a_sharp carries
//     coefficients lowpassed at frequency 2^{k/2};
//   - SqrtSymbol: b = chi(|xi|) sqrt(A_sharp), the half-wave Hamiltonian;
//   - quantize / Quantizer: Kohn-Nirenberg quantization a(x,D), with cached
//     float32 symbol tables for the repeated applications inside the solver;
//   - build_operator: exact spectral application of L in divergence or
//     standard form;
//   - shift_for_invertibility, check_asymp_homog diagnostics.
#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wpx/field.hpp"

namespace wpx {

// ---------------------------------------------------------------------------
// Coefficients.

struct CoefficientMatrix {
  int n = 2;
  int grid_size = 0;
  double reg_r = 0;      // Lipschitz-scale decay exponent of the generator
  double amplitude = 0;  // perturbation amplitude (0 = flat metric)
  std::uint64_t seed = 0;
  double kappa0 = 0;  // grid minimum of the smallest eigenvalue
  // Upper-triangular components, row-major grid fields.
  std::vector<std::vector<double>> comp;

  static int comp_count(int n) { return n * (n + 1) / 2; }
  static int comp_index(int n, int i, int j);
  const std::vector<double>& at(int i, int j) const {
    return comp[comp_index(n, i, j)];
  }
  std::size_t grid_total() const;
};

CoefficientMatrix flat_coefficients(int n, int N);
// a_ij = delta_ij (1 + amplitude * sum_j 2^{-j r} cos(kappa_j . x + phi_j))
// with |kappa_j| ~ 2^j drawn per (seed, component, scale). Rejects
// amplitude > amp_bound and coefficients whose ellipticity constant drops
// below 0.05.
CoefficientMatrix gen_rough_coeffs(int n, int N, double r, double amplitude,
                                   std::uint64_t seed,
                                   double amp_bound = 0.3);
void save_coeffs(const CoefficientMatrix& a, const std::string& path);
CoefficientMatrix load_coeffs(const std::string& path);

// ---------------------------------------------------------------------------
// Symbol base.

struct SepTerm {
  const std::vector<double>* field;  // c_q(x), grid field
  std::function<double(const Vec&)> fxi;  // h_q(xi)
};
struct SeparableData {
  std::vector<SepTerm> terms;
};

class Symbol {
 public:
  int n = 2;
  int grid_size = 0;
  double order = 0;
  bool real_valued = true;
  bool x_independent = false;
  bool xi_independent = false;

  virtual cd eval(const Vec& x, const Vec& xi) const = 0;
  // Fill a(x_m, xi) over the grid (row-major, grid_size^n entries).
  virtual void eval_lattice(const Vec& xi, cd* out) const;
  // True partial derivatives (d/dx, d/dxi). Default: centered differences,
  // one grid cell in x and one lattice cell in xi; concrete symbols override
  // with analytic gradients where the flow accuracy requires them.
  virtual void grad(const Vec& x, const Vec& xi, Vec& gx, Vec& gxi) const;
  // Fused value + gradients (hot path of the bicharacteristic flow).
  virtual void eval_grad(const Vec& x, const Vec& xi, double& val, Vec& gx,
                         Vec& gxi) const;
  virtual const SeparableData* separable() const { return nullptr; }

  Symbol() = default;
  Symbol(const Symbol&) = delete;
  Symbol& operator=(const Symbol&) = delete;
  virtual ~Symbol() = default;
};

using SymbolPtr = std::shared_ptr<const Symbol>;

class MultiplierSymbol : public Symbol {
 public:
  MultiplierSymbol(int n, int N, double order,
                   std::function<cd(const Vec&)> f,
                   std::function<Vec(const Vec&)> gradf = nullptr);
  cd eval(const Vec&, const Vec& xi) const override { return f_(xi); }
  void eval_lattice(const Vec& xi, cd* out) const override;
  void grad(const Vec& x, const Vec& xi, Vec& gx, Vec& gxi) const override;

 private:
  std::function<cd(const Vec&)> f_;
  std::function<Vec(const Vec&)> gradf_;
};

class PointwiseSymbol : public Symbol {
 public:
  PointwiseSymbol(int n, int N, std::vector<double> field);
  cd eval(const Vec& x, const Vec&) const override;
  void eval_lattice(const Vec&, cd* out) const override;
  const SeparableData* separable() const override { return &sep_; }
  const std::vector<double>& field() const { return field_; }

 private:
  std::vector<double> field_;
  SeparableData sep_;
};

// Generic separable sum sum_q c_q(x) h_q(xi). Spatial evaluation uses the
// exact sparse Fourier modes of c_q when the field has few of them (the
// lacunary coefficients do), otherwise periodic multilinear interpolation.
class SeparableSymbol : public Symbol {
 public:
  struct TermSpec {
    std::vector<double> field;
    std::function<double(const Vec&)> fxi;
    std::function<Vec(const Vec&)> dfxi;  // optional analytic xi-gradient
  };
  SeparableSymbol(int n, int N, double order, std::vector<TermSpec> terms);
  cd eval(const Vec& x, const Vec& xi) const override;
  void eval_lattice(const Vec& xi, cd* out) const override;
  void grad(const Vec& x, const Vec& xi, Vec& gx, Vec& gxi) const override;
  const SeparableData* separable() const override { return &sep_; }
  std::size_t term_count() const { return terms_.size(); }
  const std::vector<double>& term_field(std::size_t q) const {
    return terms_[q].field;
  }
  double term_fxi(std::size_t q, const Vec& xi) const {
    return terms_[q].fxi(xi);
  }

 private:
  struct Mode {
    Vec freq;
    cd amp;  // value contribution Re(amp e^{i freq.x})
  };
  struct Term {
    std::vector<double> field;
    std::vector<std::vector<double>> gradf;  // spectral d/dx_i fields
    std::function<double(const Vec&)> fxi;
    std::function<Vec(const Vec&)> dfxi;
    std::vector<Mode> modes;
    bool sparse = false;
  };
  double field_value(const Term& t, const Vec& x) const;
  Vec field_grad(const Term& t, const Vec& x) const;
  std::vector<Term> terms_;
  SeparableData sep_;
};

// ---------------------------------------------------------------------------
// Littlewood-Paley machinery.

// Number of dyadic shells tabulated on an N^n grid: the shell-k coefficient
// lowpass cutoff min(2^{k/2}, N/2) saturates beyond this K.
int shell_count(int N);
// Partition of unity in |xi|: w_0 covers |xi| <~ 1, w_k the shell |xi| ~ 2^k,
// w_K the tail; sum_k w_k = 1 for all radii.
double shell_weight(int k, int K, double r);
double shell_weight_deriv(int k, int K, double r);
// Smooth spectral lowpass: multiplier plateau(|zeta| / cutoff) (pass below
// cutoff/2, kill above cutoff).
std::vector<double> lowpass_field(const std::vector<double>& f, int n, int N,
                                  double cutoff);
// Periodic multilinear interpolation of a grid field at x (radians).
double interp_field(const std::vector<double>& f, int n, int N, const Vec& x);

struct SymbolSplit {
  std::shared_ptr<SeparableSymbol> sharp;
  std::shared_ptr<SeparableSymbol> flat;
  int shells = 0;
  bool truncated = false;  // some shell cutoffs hit the spatial Nyquist
};
// Split a separable symbol into its coefficient-smoothed part (shell k of
// the frequency space carries x-content below 2^{k/2}) and the rough
// remainder. Requires a separable representation.
SymbolSplit smooth_split(const Symbol& a);

// ---------------------------------------------------------------------------
// Metric symbol A(x,xi) = sum_ij a_ij(x) xi_i xi_j and friends.

enum class MetricMode { raw, sharp, flat };

class MetricSymbol : public Symbol {
 public:
  MetricSymbol(std::shared_ptr<const CoefficientMatrix> a, MetricMode mode);
  cd eval(const Vec& x, const Vec& xi) const override;
  void eval_lattice(const Vec& xi, cd* out) const override;
  void grad(const Vec& x, const Vec& xi, Vec& gx, Vec& gxi) const override;
  void eval_grad(const Vec& x, const Vec& xi, double& val, Vec& gx,
                 Vec& gxi) const override;
  const SeparableData* separable() const override { return &sep_; }
  int shells() const { return K_; }
  bool truncated() const { return truncated_; }
  bool sparse() const { return sparse_; }
  const CoefficientMatrix& coeffs() const { return *coeffs_; }

 private:
  struct ShellHit {
    int k;
    double w, wd;
  };
  int active_shells(double r, ShellHit* hits) const;  // <= 3 hits
  std::shared_ptr<const CoefficientMatrix> coeffs_;
  MetricMode mode_;
  int K_ = 0;  // 0 for raw mode (single unsmoothed shell)
  int ncomp_ = 0;
  bool truncated_ = false;
  bool sparse_ = true;
  std::vector<Vec> mode_freq_;
  std::vector<cd> amp_;  // [(k*ncomp + c)*M + m]
  std::vector<std::vector<double>> fields_;  // per (k, comp)
  SeparableData sep_;
};

std::shared_ptr<MetricSymbol> make_metric_symbol(
    std::shared_ptr<const CoefficientMatrix> a, MetricMode mode);

// b(x,xi) = chi(|xi|) sqrt(base(x,xi)): chi vanishes below R, is 1 above 2R.
class SqrtSymbol : public Symbol {
 public:
  SqrtSymbol(SymbolPtr base, double R);
  cd eval(const Vec& x, const Vec& xi) const override;
  void eval_lattice(const Vec& xi, cd* out) const override;
  void grad(const Vec& x, const Vec& xi, Vec& gx, Vec& gxi) const override;
  void eval_grad(const Vec& x, const Vec& xi, double& val, Vec& gx,
                 Vec& gxi) const override;
  double cutoff() const { return R_; }
  const Symbol& base() const { return *base_; }

 private:
  double chi(double r, double* deriv) const;
  SymbolPtr base_;
  double R_;
};

// Homogeneous ray limit of a symbol of order m:
//   b_hom(x, xi) = |xi| * b(x, T xihat) / T   (T far out in the last shell).
class RayLimitSymbol : public Symbol {
 public:
  RayLimitSymbol(SymbolPtr base, double ray_t = 8192.0);
  cd eval(const Vec& x, const Vec& xi) const override;
  void grad(const Vec& x, const Vec& xi, Vec& gx, Vec& gxi) const override;
  void eval_grad(const Vec& x, const Vec& xi, double& val, Vec& gx,
                 Vec& gxi) const override;

 private:
  SymbolPtr base_;
  double T_;
};

// ---------------------------------------------------------------------------
// Quantization.

// Kohn-Nirenberg quantization a(x,D)f on the grid. Fast paths: pure
// multiplier, pure x-multiplication, separable sum (one FFT per term);
// otherwise a direct lattice sum (refused when N^{2n} > 1e10).
RealField quantize(const Symbol& a, const RealField& f);

// Cached quantizer for a real symbol: float32 table of a(., zeta) over the
// active lattice |zeta| <= zeta_max, SIMD accumulation, optional band
// truncation of the output (the solver works on the resolved band only).
class Quantizer {
 public:
  Quantizer(SymbolPtr sym, double zeta_max, bool truncate = true);
  RealField apply(const RealField& f) const;
  // (b(x,D) + ic) f
  RealField apply_shifted(const RealField& f, double c) const;
  // ((b + ic)^{-1})(x,D) f
  RealField apply_inverse(const RealField& f, double c) const;
  // One Neumann correction: z = R g; z += R (g - (B + ic) z). Writes the
  // final relative residual ||g - (B+ic)z|| / ||g|| if resid != nullptr.
  RealField inv_neumann(const RealField& g, double c,
                        double* resid = nullptr) const;
  std::size_t active_count() const { return active_.size(); }
  double zeta_max() const { return zmax_; }
  const Symbol& symbol() const { return *sym_; }

 private:
  struct Active {
    std::size_t bin;
    std::array<int, MAX_DIM> z;
  };
  void accumulate(const std::vector<cd>& spec, RealField& out, double shift,
                  bool inverse) const;
  RealField truncate_band(RealField f) const;
  SymbolPtr sym_;
  int n_, N_;
  double zmax_;
  bool truncate_;
  std::vector<Active> active_;
  std::vector<float> table_;  // active x grid
  std::vector<cd> unit_;      // e^{2 pi i k / N}
};

// ---------------------------------------------------------------------------
// The differential operator L.

enum class OperatorForm { divergence, standard };

struct WaveOperator {
  OperatorForm form = OperatorForm::divergence;
  std::shared_ptr<const CoefficientMatrix> coeffs;
  bool dealias = true;  // truncate products back to the guard band
  RealField apply(const RealField& f) const;
  double lambda_max() const;  // upper bound on the top eigenvalue of a(x)
};

WaveOperator build_operator(std::shared_ptr<const CoefficientMatrix> a,
                            OperatorForm form);

// ---------------------------------------------------------------------------
// Diagnostics.

struct ShiftSearch {
  double c = 0;
  std::vector<std::pair<double, double>> trace;  // (c, residual)
};
// Smallest dyadic c with empirical || I - (b+ic)(x,D) ((b+ic)^{-1})(x,D) ||
// <= 1/2 on random band-limited fields. full_trace keeps doubling past the
// first success to expose the residual curve.
ShiftSearch shift_for_invertibility(const Quantizer& qb, std::uint64_t seed,
                                    double c_max = 1048576.0, int nfields = 8,
                                    bool full_trace = false);

struct HomogReport {
  double decay_slope = 0;  // log2 slope of sup |(xi.d_xi - m) b| vs |xi|
  std::vector<std::pair<double, double>> sup_g;  // (|xi|, sup)
  std::array<double, 2> ray_diff{0, 0};  // sup |h_{4t} - h_t| at two scales
  double ray_ratio = 0;                  // first / second (>= ~4 expected)
};
HomogReport check_asymp_homog(const Symbol& b, std::uint64_t seed,
                              std::vector<double> mags = {16, 24, 32, 48, 64},
                              std::array<double, 3> ray_ts = {16, 32, 64});

}  // namespace wpx
