#pragma once
// Flow parametrix for the half-wave factor D_t - b(x,D) and the
// Picard-corrected solver for the second-order equation (D_t^2 - L)u = F.
//
// Leading term: U_t = W* F_t W with F_t the pullback along the
// bicharacteristic flow of b. Corrections are Duhamel integrals evaluated on
// a uniform time grid by phase-space recurrences: the flow group property
// F_s F_dt = F_{s+dt} turns each convolution into one pullback per step
// against the fixed one-step flow map.
#include <map>
#include <memory>

#include "wpx/flow.hpp"

namespace wpx {

struct HalfWaveConfig {
  double chi_cutoff = 8.0;   // Hamiltonian cutoff R (chi = 1 above 2R)
  double shift_c = -1.0;     // Cauchy shift c; < 0 searches dyadically
  double dt = 1.0 / 64;      // time grid of the correction sweeps
  int picard_K = 8;          // max correction levels
  double picard_tol = 1e-6;  // early-stop ratio between level norms
  std::uint64_t seed = 1;
};

class HalfWaveOperator {
 public:
  HalfWaveOperator(const PacketDictionary& dict,
                   std::shared_ptr<const CoefficientMatrix> coeffs,
                   OperatorForm form, HalfWaveConfig cfg = {});

  // U_t f = W* F_t W f.
  RealField apply_U(const RealField& f, double t) const;

  // E_t f = -i (U_{t+h} f - U_{t-h} f) / (2h) - b(x,D) U_t f.
  RealField error_term(const RealField& f, double t,
                       double h = 1.0 / 256) const;

  // Picard-corrected half-wave evolution e_{t_k} f on t_k = k t / T,
  // T = round(|t| / dt), for several inputs sharing the flow sweeps.
  struct EvolveResult {
    std::vector<double> times;
    // e[input][k]
    std::vector<std::vector<RealField>> e;
    // max_k || V_j(t_k) || per level, per input
    std::vector<std::vector<double>> level_norm;
    int levels = 0;
  };
  EvolveResult evolve(const std::vector<RealField>& inputs, double t,
                      int K = -1) const;
  // e_t f at the final time (solves (D_t - b) u = 0, u(0) = f, up to the
  // Picard tail).
  RealField first_order_solve(const RealField& f, double t, int K = -1) const;

  // cs_t f = (e^{-ct} e_t + e^{ct} e_{-t}) f / 2,
  // sn_t g = (e^{-ct} e_t - e^{ct} e_{-t}) (btilde^{-1} g) / (2i).
  RealField cs(const RealField& f, double t) const;
  RealField sn(const RealField& g, double t) const;

  // etilde(x,D) f = (b(x,D) + ic)^2 f - L f.
  RealField apply_etilde(const RealField& f) const;
  // btilde^{-1} g by quantized inverse symbol plus one Neumann correction.
  RealField apply_inv_btilde(const RealField& g, double* resid = nullptr) const;

  const PacketDictionary& dict() const { return *dict_; }
  const Symbol& b() const { return *b_; }
  const Quantizer& quantizer() const { return *qb_; }
  const WaveOperator& L() const { return L_; }
  double shift() const { return c_; }
  const HalfWaveConfig& config() const { return cfg_; }

  const FlowState& one_step_state(double dt) const;  // cached Phi_{dt} map
  const FlowState& identity() const;
  int substeps(double dt) const;

 private:
  const PacketDictionary* dict_;
  std::shared_ptr<const CoefficientMatrix> coeffs_;
  HalfWaveConfig cfg_;
  std::shared_ptr<MetricSymbol> asharp_;
  std::shared_ptr<SqrtSymbol> b_;
  std::unique_ptr<Quantizer> qb_;
  WaveOperator L_;
  double c_ = 0;
  mutable std::map<long long, FlowState> step_cache_;
  mutable std::unique_ptr<FlowState> identity_;
};

struct WaveSolution {
  std::vector<double> times;
  std::vector<RealField> u, ut;
  std::vector<double> residual;     // ||(D_t^2 - L)u - F|| (interior times)
  std::vector<double> level_norm;   // outer Picard iterate norms
  int levels = 0;
  std::uint64_t config_hash = 0;
};

// Cauchy problem (D_t^2 - L)u = F, u(0) = u0, d_t u(0) = u1, solved on the
// grid t_k = k t_final / T by the cs/sn representation plus an outer Picard
// iteration whose Duhamel kernel uses the leading parametrix.
// F may be null (homogeneous) or hold one field per grid time.
WaveSolution second_order_solve(const HalfWaveOperator& op,
                                const RealField& u0, const RealField& u1,
                                const std::vector<RealField>* F,
                                double t_final, int K = -1);

}  // namespace wpx
