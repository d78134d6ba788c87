#pragma once
// Wave-packet analysis W, synthesis W*, weighted phase-space norms, and the
// WW* kernel-decay probe.
#include <vector>

#include "wpx/field.hpp"
#include "wpx/packets.hpp"

namespace wpx {

// Lifted coefficients Wf(x_m, xi_k): one complex slice per packet plus the
// low-band slice. Memory bound: (P+1) * N^n * 16 bytes.
struct PhaseField {
  const PacketDictionary* dict = nullptr;
  int n = 2, grid_size = 0;
  std::vector<std::vector<cd>> slices;
  std::vector<cd> low;

  PhaseField() = default;
  explicit PhaseField(const PacketDictionary& d);
  std::size_t cells() const { return low.size(); }

  void set_zero();
  PhaseField& operator+=(const PhaseField& o);
  PhaseField& operator*=(cd s);
  void axpy(cd alpha, const PhaseField& o);

  // sqrt( sum_k w_k mean|F_k|^2 + w_low mean|F_low|^2 ): the discrete
  // L2(T*R^n) norm under normalized position measure (matches
  // RealField::l2_norm through the isometry).
  double weighted_l2() const;
};

PhaseField analyze(const RealField& f, const PacketDictionary& dict);
RealField synthesize(const PhaseField& F);

// One sampled pair for the kernel probe.
struct KernelPair {
  Vec x, xi, y, eta;
};

struct DecayRow {
  double dist = 0;      // quasi-metric between (x, xi-hat) and (y, eta-hat)
  double upsilon = 0;   // min(|xi|/|eta|, |eta|/|xi|)
  double envelope = 0;  // Upsilon^N (1 + rho^{-1} d^2)^{-N}
  double absK = 0;
  double ratio = 0;     // |K| / envelope
};

struct DecayReport {
  std::vector<DecayRow> rows;
  double max_ratio = 0;
};

// K(x,xi,y,eta) = (2pi)^{-n} sum_zeta psi_xi(zeta) psi_eta(zeta)
//                 e^{i zeta.(x-y)} over the frequency lattice.
cd ww_star_kernel(const PacketDictionary& dict, const KernelPair& p);

DecayReport ww_star_kernel_probe(const PacketDictionary& dict,
                                 const std::vector<KernelPair>& pairs,
                                 int N_order);

}  // namespace wpx
