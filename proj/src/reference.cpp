#include "wpx/reference.hpp"

#include <algorithm>
#include <cmath>

#include "wpx/fft.hpp"

namespace wpx {

namespace {

inline double bin_freq(int k, int N) { return k <= N / 2 ? k : k - N; }

// Apply g(|zeta|) as a Fourier multiplier.
RealField radial_multiplier(const RealField& f,
                            const std::function<cd(double)>& g) {
  std::vector<cd> spec = f.spectrum();
  int N = f.grid_size, n = f.n;
  for (std::size_t m = 0; m < spec.size(); ++m) {
    std::size_t rem = m;
    double r2 = 0;
    for (int d = n - 1; d >= 0; --d) {
      double z = bin_freq(static_cast<int>(rem % N), N);
      r2 += z * z;
      rem /= N;
    }
    spec[m] *= g(std::sqrt(r2));
  }
  return RealField::from_spectrum(n, N, spec);
}

double internal_dt(const WaveOperator& L, int N, double cfl) {
  double omega = std::sqrt(L.lambda_max() * L.coeffs->n) * (N / 2);
  return 2.0 * cfl / omega;
}

}  // namespace

RealField exact_halfwave(const RealField& f, double t) {
  return radial_multiplier(
      f, [t](double r) { return std::exp(cd(0, t * r)); });
}

RealField exact_cs(const RealField& f, double t) {
  return radial_multiplier(f, [t](double r) { return cd(std::cos(t * r)); });
}

RealField exact_sn(const RealField& g, double t) {
  return radial_multiplier(g, [t](double r) {
    return cd(r == 0 ? t : std::sin(t * r) / r);
  });
}

double wave_energy(const WaveOperator& L, const RealField& u,
                   const RealField& ut) {
  int n = u.n, N = u.grid_size;
  double e = ut.l2_norm();
  e *= e;
  // gradient components D_d u = -i d_d u as multipliers zeta_d
  std::vector<cd> spec = u.spectrum();
  std::vector<std::vector<cd>> grad(n);
  for (int d = 0; d < n; ++d) {
    grad[d] = spec;
    std::size_t stride = 1;
    for (int q = n - 1; q > d; --q) stride *= N;
    for (std::size_t m = 0; m < spec.size(); ++m) {
      double z = bin_freq(static_cast<int>((m / stride) % N), N);
      grad[d][m] *= z;
    }
    fft::inverse(grad[d].data(), n, N);
  }
  const CoefficientMatrix& a = *L.coeffs;
  double hn = 1.0 / static_cast<double>(u.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::vector<double>& aij = a.at(std::min(i, j), std::max(i, j));
      double s = 0;
      for (std::size_t m = 0; m < spec.size(); ++m)
        s += aij[m] * std::real(std::conj(grad[i][m]) * grad[j][m]);
      e += hn * s;
    }
  return e;
}

ReferenceSolution timestep_solve(const WaveOperator& L, const RealField& u0,
                                 const RealField& u1, const Forcing& F,
                                 double t_final, int nout, double cfl,
                                 bool monitor_energy) {
  if (t_final <= 0 || nout < 1)
    throw config_error("timestep_solve: need t_final > 0 and nout >= 1");
  int n = u0.n, N = u0.grid_size;
  double dt_out = t_final / nout;
  int sub = std::max(1, static_cast<int>(std::ceil(
                            dt_out / internal_dt(L, N, cfl))));
  double dt = dt_out / sub;

  ReferenceSolution sol;
  sol.internal_steps = sub * nout;
  sol.times.resize(nout + 1);
  sol.u.reserve(nout + 1);
  sol.ut.reserve(nout + 1);

  auto rhs = [&](const RealField& u, double t) {
    RealField r = L.apply(u);
    r *= -1.0;
    if (F) r -= F(t);
    return r;
  };

  RealField up = u0;  // u_{m-1}
  RealField uc = up;  // u_m, Taylor start for m = 1
  {
    RealField t1 = u1;
    t1 *= dt;
    uc += t1;
    RealField t2 = rhs(up, 0.0);
    t2 *= dt * dt / 2;
    uc += t2;
  }
  bool homog = !F;
  double e0 = 0;
  if (monitor_energy && homog) e0 = wave_energy(L, u0, u1);

  sol.times[0] = 0;
  sol.u.push_back(u0);
  sol.ut.push_back(u1);
  long total = static_cast<long>(sub) * nout;
  for (long m = 1; m <= total; ++m) {
    // u_{m+1} = 2 u_m - u_{m-1} + dt^2 rhs(u_m)
    RealField un = rhs(uc, m * dt);
    un *= dt * dt;
    {
      RealField tw = uc;
      tw *= 2.0;
      un += tw;
    }
    un -= up;
    if (m % sub == 0) {
      int k = static_cast<int>(m / sub);
      sol.times[k] = k * dt_out;
      sol.u.push_back(uc);
      RealField d = un;
      d -= up;
      d *= 1.0 / (2 * dt);
      sol.ut.push_back(std::move(d));
      if (monitor_energy && homog && e0 > 0) {
        double e = wave_energy(L, sol.u.back(), sol.ut.back());
        sol.energy_drift =
            std::max(sol.energy_drift, std::abs(e / e0 - 1.0));
      }
    }
    up = std::move(uc);
    uc = std::move(un);
  }
  if (monitor_energy && homog && e0 > 0 && sol.energy_drift > 0.01)
    throw numeric_error("timestep_solve: energy drift above 1%");
  return sol;
}

ReferenceSolution rk4_solve(const WaveOperator& L, const RealField& u0,
                            const RealField& u1, const Forcing& F,
                            double t_final, int nout, double cfl) {
  if (t_final <= 0 || nout < 1)
    throw config_error("rk4_solve: need t_final > 0 and nout >= 1");
  int N = u0.grid_size;
  double dt_out = t_final / nout;
  int sub = std::max(1, static_cast<int>(std::ceil(
                            dt_out / internal_dt(L, N, cfl))));
  double dt = dt_out / sub;

  ReferenceSolution sol;
  sol.internal_steps = sub * nout;
  sol.times.resize(nout + 1);

  auto acc = [&](const RealField& u, double t) {
    RealField r = L.apply(u);
    r *= -1.0;
    if (F) r -= F(t);
    return r;
  };
  RealField u = u0, v = u1;
  sol.u.push_back(u);
  sol.ut.push_back(v);
  sol.times[0] = 0;
  long step = 0;
  for (int k = 1; k <= nout; ++k) {
    for (int s = 0; s < sub; ++s) {
      double t = step * dt;
      RealField k1u = v, k1v = acc(u, t);
      RealField u2 = u, v2 = v;
      {
        RealField tmp = k1u;
        tmp *= dt / 2;
        u2 += tmp;
        tmp = k1v;
        tmp *= dt / 2;
        v2 += tmp;
      }
      RealField k2u = v2, k2v = acc(u2, t + dt / 2);
      RealField u3 = u, v3 = v;
      {
        RealField tmp = k2u;
        tmp *= dt / 2;
        u3 += tmp;
        tmp = k2v;
        tmp *= dt / 2;
        v3 += tmp;
      }
      RealField k3u = v3, k3v = acc(u3, t + dt / 2);
      RealField u4 = u, v4 = v;
      {
        RealField tmp = k3u;
        tmp *= dt;
        u4 += tmp;
        tmp = k3v;
        tmp *= dt;
        v4 += tmp;
      }
      RealField k4u = v4, k4v = acc(u4, t + dt);
      auto combine = [&](RealField& y, RealField& a1, RealField& a2,
                         RealField& a3, RealField& a4) {
        a2 *= 2.0;
        a3 *= 2.0;
        a1 += a2;
        a1 += a3;
        a1 += a4;
        a1 *= dt / 6;
        y += a1;
      };
      combine(u, k1u, k2u, k3u, k4u);
      combine(v, k1v, k2v, k3v, k4v);
      ++step;
    }
    sol.times[k] = k * dt_out;
    sol.u.push_back(u);
    sol.ut.push_back(v);
  }
  return sol;
}

}  // namespace wpx
