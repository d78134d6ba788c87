#pragma once
// Contact quasi-metric on the cosphere bundle, Monte-Carlo ball volumes,
// cone functional A_s, tent norms T^p_s (p = infinity via the C_s ball
// supremum), and the aperture-comparability check.
#include <cstdint>
#include <vector>

#include "wpx/common.hpp"
#include "wpx/transform.hpp"

namespace wpx {

struct SpherePoint {
  Vec x;      // position on the torus
  Vec omega;  // unit direction
};

// d(a,b) = (|x-y|^2 + |omega.(x-y)| + |omega-nu|^2)^{1/2}, positions taken
// modulo 2pi (shortest displacement). The omega.(x-y) term uses the first
// argument's direction; symmetry holds up to a fixed equivalence factor.
double quasi_dist(const SpherePoint& a, const SpherePoint& b);

struct BallVolumeTable {
  int n = 2;
  std::vector<double> radii;    // dyadic
  std::vector<double> volumes;  // Monte-Carlo estimates
  std::vector<double> stderrs;

  // |B_tau|, with power-law inter/extrapolation off the table nodes.
  double volume(double tau) const;
  // mu(lambda) = |B_{lambda^{-1/2}}|^{-1}.
  double mu(double lambda) const { return 1.0 / volume(1.0 / std::sqrt(lambda)); }
};

// Volumes are center-independent; the estimator samples the anisotropic
// bounding box around a fixed center in R^n x S^{n-1}.
BallVolumeTable build_ball_table(int n, int J, int K,
                                 std::size_t samples_per_radius,
                                 std::uint64_t seed);
double ball_volume_mc(int n, double tau, std::size_t samples,
                      std::uint64_t seed, double* stderr_out = nullptr);

struct TentWarnings {
  int empty_cones = 0;      // evaluation points whose cone had no samples
  double coverage = 1.0;    // fraction of eval points with nonempty cones
};

// Evaluation grid per the design decision: positions subsampled by `stride`,
// directions from the coarsest ring of the dictionary.
std::vector<SpherePoint> eval_grid(const PacketDictionary& dict, int stride);

std::vector<double> a_functional(const PhaseField& F,
                                 const BallVolumeTable& vols, double s,
                                 double alpha,
                                 const std::vector<SpherePoint>& pts,
                                 TentWarnings* warn = nullptr);

struct TentNormReport {
  double p = 2, s = 0, alpha = 1;
  double value = 0;
  double s_of_p = 0;     // ((n-1)/2)|1/2 - 1/p|
  int eval_points = 0;
  int stride = 4;
  TentWarnings warnings;
};

// p in [1, inf]; pass p = infinity for the C_s ball supremum (computed over
// a center x dyadic-radius ball dictionary; a lower bound by construction).
TentNormReport tent_norm(const PhaseField& F, const BallVolumeTable& vols,
                         double p, double s, double alpha = 1.0,
                         int stride = 4);

struct ApertureReport {
  double norms[3];   // alpha = 1/2, 1, 2
  double max_ratio;  // max over pairs of norm ratios (>= 1)
};

ApertureReport aperture_check(const PhaseField& F, const BallVolumeTable& vols,
                              double s, double p, int stride = 4);

}  // namespace wpx
