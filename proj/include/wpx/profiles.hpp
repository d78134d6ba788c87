#pragma once
// Radial calibration profiles:
//   phi(zeta) = eta(|zeta|), a C-infinity plateau bump: 1 on [0,1/2], 0 on
//     [1,inf), built from the standard exp(-1/t) mollifier;
//   Psi(zeta) = theta(|zeta|)/kappa, supported in 1/2 <= |zeta| <= 2 and
//     normalized so the Calderon integral int_0^inf Psi(s)^2 ds/s = 1.
// Evaluation goes through cubic-Hermite lookup tables (node values and
// derivatives from the closed forms); build_profiles verifies the tables
// reproduce the closed forms to 1e-12 of the profile sup-norm.
#include <functional>
#include <vector>

#include "wpx/common.hpp"

namespace wpx {

// Smooth transition: 0 for t <= 0, 1 for t >= 1, C-infinity.
double smoothstep(double t);
double smoothstep_deriv(double t);
// Plateau bump eta: 1 on [0,1/2], 0 on [1,inf).
double plateau(double u);
double plateau_deriv(double u);
// Raw annular bump theta supported on [1/2,2], peak value 1 at u = 1.
double annular_bump(double u);

// Cubic Hermite table over [0, umax].
struct SplineTable {
  double umax = 0;
  std::vector<double> val, der;
  double eval(double u) const;
  void build(double umax, int resolution,
             const std::function<double(double)>& f);
};

struct RadialProfiles {
  SplineTable phi_tab;   // plateau, domain [0, 1.25]
  SplineTable psi_tab;   // normalized annular profile, domain [0, 2.5]
  double kappa = 0;      // Calderon constant of the raw bump
  int resolution = 0;

  // phi(zeta) and Psi(zeta) as radial functions of |zeta|.
  double phi(double r) const { return r >= 1.0 ? 0.0 : phi_tab.eval(r); }
  double Psi(double r) const {
    return (r <= 0.5 || r >= 2.0) ? 0.0 : psi_tab.eval(r);
  }
  // int_0^inf Psi(s)^2 ds/s, evaluated by quadrature (should be 1).
  double calderon_integral() const;
};

RadialProfiles build_profiles(int table_resolution);

// c_{|xi|} = (int_{S^{n-1}} phi(|xi|^{1/2}(e1 - nu))^2 dnu)^{-1/2}.
double c_norm(const RadialProfiles& p, int n, double magnitude,
              int base_nodes = 256);

}  // namespace wpx
