#pragma once
// Discrete dyadic-parabolic packet dictionary: frequency centers on
// log-radial shells x quasi-uniform directions, product-quadrature weights,
// the low-frequency packet q, and the lattice partition function Q with an
// optional renormalization that makes the discrete frame exactly Parseval.
#include <cstdint>
#include <string>
#include <vector>

#include "wpx/common.hpp"
#include "wpx/profiles.hpp"

namespace wpx {

enum class DictMode { raw, renormalized };

struct PacketIndex {
  int j = 0;    // dyadic annulus, |xi| in [2^j, 2^{j+1})
  int l = 0;    // radial node within the annulus
  int k = 0;    // direction index
  Vec center;   // frequency center xi
  double w = 0; // quadrature weight (xi-space volume)
};

// Nonzero lattice samples of one packet multiplier.
struct SparseSlice {
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
};

// One radial shell: all packets sharing |xi|; consecutive in `indices`.
struct Ring {
  int j = 0, l = 0;
  double mag = 0;       // shared |xi|
  int ndir = 0;         // direction count on this ring
  double offset = 0;    // angular stagger, angle_d = 2pi (d + offset)/ndir
  int first_packet = 0; // index into `indices` of direction 0
  double cnorm = 0;     // c_{|xi|}
};

struct PacketDictionary {
  int n = 2;
  int grid_size = 0;
  int guard = 0;  // resolved band: lattice |zeta| <= guard
  DictMode mode = DictMode::renormalized;
  double C_ang = 4.0;
  int radial_nodes = 3;  // per annulus

  RadialProfiles profiles;
  std::vector<PacketIndex> indices;
  std::vector<Ring> rings;
  std::vector<SparseSlice> psi;  // per packet; renormalized if mode says so
  SparseSlice q_slice;           // low-band multiplier on the lattice
  double w_low = 0;              // xi-shell weight |B_1 \ B_{1/2}|
  std::vector<double> Q;         // dense partition function on the lattice
  double eps_frame = 0;          // max |Q - 1| over the resolved band

  std::size_t packets() const { return indices.size(); }
  std::size_t lattice_size() const;

  SplineTable q_tab;  // radial profile of q on [0, 2]

  // Un-renormalized closed forms (the defining formulas).
  double psi_eval(const Vec& xi, const Vec& zeta) const;
  double q_radial(double r) const;
  double q_eval(const Vec& zeta) const { return q_radial(zeta.norm()); }

  // Integer frequency vector of a flat lattice index.
  Vec lattice_freq(std::size_t m) const;

  // Ring bracketing for interpolation: log2|xi| of ring r is
  // log2_base + r / radial_nodes.
  double log2_base = 0;
};

PacketDictionary build_dictionary(const RadialProfiles& profiles,
                                  int grid_size, int n, double C_ang,
                                  int radial_nodes, DictMode mode);

// Binary serialization ("PWPK" header + packed packet records) with a JSON
// sidecar carrying parameters and eps_frame. Load rebuilds profiles and
// lattice tables deterministically and cross-checks the stored records.
void save_dictionary(const PacketDictionary& d, const std::string& path);
PacketDictionary load_dictionary(const std::string& path);

}  // namespace wpx
