#pragma once
// Bicharacteristic flow of the Hamiltonian b(x, xi) and the phase-space
// pullback that transports wave-packet coefficients along it.
#include <cstdint>
#include <vector>

#include "wpx/symbols.hpp"
#include "wpx/transform.hpp"

namespace wpx {

struct PhasePoint {
  Vec x, xi;
};

// Hamilton vector field (dx/dt, dxi/dt) = (d_xi b, -d_x b).
void hamilton_field(const Symbol& b, const PhasePoint& p, Vec& dx, Vec& dxi);

struct FlowDiag {
  double drift = 0;            // |b(end) - b(start)| / max(|b(start)|, 1e-30)
  double jacobian_defect = 0;  // |det DPhi - 1| from a finite-difference cluster
  double sigma_ratio = 0;      // sigma(t)/sigma(0) = |xi_0| / |xi_t|
};

struct FlowResult {
  double t = 0;
  int steps = 0;
  std::vector<PhasePoint> points;
  std::vector<FlowDiag> diag;
};

// RK4 integration of the sources to time t (signed). steps <= 0 picks
// ceil(64 |t|). With adaptive on, the step count is doubled (up to 4x) until
// two consecutive runs agree to 1e-6 in phase space; failure to converge
// throws. diagnostics fills FlowDiag per source (costs 4n extra
// integrations per source for the Jacobian cluster).
FlowResult integrate_flow(const Symbol& b, const std::vector<PhasePoint>& sources,
                          double t, int steps = 0, bool diagnostics = false,
                          bool adaptive = false);

// Normalized flow divergence between paired endpoints (x,omega,sigma) from
// flow `a` and (y,nu,tau) from flow `h`, with sigma = |xi|^{-1}:
//   D = |x-y|^2 + |omegahat-nuhat|^2 + (1 - sigma/tau)^2 + |nuhat.(y-x)|.
struct GronwallRow {
  double d = 0;
  double sigma0 = 0;
};
std::vector<GronwallRow> gronwall_diag(const FlowResult& a,
                                       const FlowResult& h,
                                       const std::vector<PhasePoint>& sources);

// Dense flow state: one phase-space sample per (packet, grid point), stored
// packet-major as structure-of-arrays. n = 2 only.
struct FlowState {
  const PacketDictionary* dict = nullptr;
  double t = 0;
  std::vector<double> px, py, fx, fy;
  std::size_t count() const { return px.size(); }
};

FlowState identity_state(const PacketDictionary& dict);

// Advance every sample by dt (signed) with `steps` RK4 substeps. Samples
// with |xi| <= skip_radius sit below the Hamiltonian cutoff and are fixed
// points; they are skipped.
void advance_state(const Symbol& b, FlowState& s, double dt, int steps,
                   double skip_radius = 0);

// G(x_m, xi_k) = F(Phi(x_m, xi_k)) for the transported samples in `s`:
// position interpolation is 4-point Catmull-Rom per axis on a 2x spectrally
// upsampled, carrier-demodulated copy of each slice; frequency interpolation
// is log-linear across rings and linear in angle. Samples below the
// dictionary floor copy the source cell; samples above the ceiling are
// clipped, and the clipped weighted-energy fraction (written to
// clipped_fraction) must stay below 5%.
PhaseField pullback(const PhaseField& F, const FlowState& s,
                    double* clipped_fraction = nullptr);

// Shared helper: the demodulated upsampled envelopes of every slice
// (complex float, 2N grid) plus the integer carrier per packet. Reused by
// pullback; exposed for reuse across repeated pullbacks of one field.
struct SliceEnvelopes {
  int N2 = 0;
  std::vector<std::vector<std::complex<float>>> env;
  std::vector<std::array<int, 2>> carrier;
};
SliceEnvelopes build_envelopes(const PhaseField& F);
PhaseField pullback(const PhaseField& F, const SliceEnvelopes& E,
                    const FlowState& s, double* clipped_fraction = nullptr);

}  // namespace wpx
