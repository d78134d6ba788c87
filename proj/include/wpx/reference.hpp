#pragma once
// Brute-force reference solvers used to validate the parametrix:
//   - exact Fourier multipliers for the flat (constant-coefficient) case,
//   - pseudospectral leapfrog for d_t^2 u = -L u - F with an energy monitor,
//   - an independent RK4 first-order-system integrator as a cross-check.
#include <functional>

#include "wpx/symbols.hpp"

namespace wpx {

// Flat-metric multipliers (a = identity, so b(x,D) = |D| above the cutoff):
//   e^{it|zeta|},  cos(t|zeta|),  sin(t|zeta|)/|zeta| (zeta = 0 -> t).
RealField exact_halfwave(const RealField& f, double t);
RealField exact_cs(const RealField& f, double t);
RealField exact_sn(const RealField& g, double t);

// Forcing sampled at arbitrary times; empty function = homogeneous.
using Forcing = std::function<RealField(double)>;

struct ReferenceSolution {
  std::vector<double> times;
  std::vector<RealField> u, ut;
  int internal_steps = 0;        // leapfrog/RK4 steps actually taken
  double energy_drift = 0;       // max |E(t)/E(0) - 1| (homogeneous only)
};

// Leapfrog for d_t^2 u = -L u - F on nout+1 uniform output times in
// [0, t_final]. The internal step satisfies omega_max * dt <= 2 * cfl with
// omega_max = sqrt(lambda_max * n) * N/2. For a homogeneous solve the
// discrete energy ||d_t u||^2 + <a grad u, grad u> is monitored and a drift
// above 1% raises numeric_error.
ReferenceSolution timestep_solve(const WaveOperator& L, const RealField& u0,
                                 const RealField& u1, const Forcing& F,
                                 double t_final, int nout, double cfl = 0.25,
                                 bool monitor_energy = true);

// Same problem integrated as the first-order system (u, v) with classical
// RK4; independent of the leapfrog path.
ReferenceSolution rk4_solve(const WaveOperator& L, const RealField& u0,
                            const RealField& u1, const Forcing& F,
                            double t_final, int nout, double cfl = 0.25);

// Energy ||ut||^2 + <a grad u, grad u> (divergence form) or
// ||ut||^2 + sum Re<a_ij D_j u, D_i u> (standard form).
double wave_energy(const WaveOperator& L, const RealField& u,
                   const RealField& ut);

}  // namespace wpx
