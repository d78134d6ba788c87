#include "wpx/profiles.hpp"

#include <algorithm>
#include <cmath>

namespace wpx {

namespace {
double mollify(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace

double smoothstep(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  double a = mollify(t), b = mollify(1.0 - t);
  return a / (a + b);
}

double smoothstep_deriv(double t) {
  if (t <= 0 || t >= 1) return 0.0;
  double a = mollify(t), b = mollify(1.0 - t);
  double ap = a / (t * t);
  double bp = -b / ((1.0 - t) * (1.0 - t));
  double s = a + b;
  return (ap * b - a * bp) / (s * s);
}

double plateau(double u) {
  // 1 on [0,1/2], smooth descent, 0 on [1,inf).
  return smoothstep(2.0 - 2.0 * u);
}

double plateau_deriv(double u) { return -2.0 * smoothstep_deriv(2.0 - 2.0 * u); }

double annular_bump(double u) {
  // Rise on [1/2,1], fall on [1,2]; all derivatives vanish at the ends.
  return smoothstep(2.0 * u - 1.0) * smoothstep(2.0 - u);
}

double SplineTable::eval(double u) const {
  if (u <= 0) return val.front();
  if (u >= umax) return val.back();
  double h = umax / static_cast<double>(val.size() - 1);
  double s = u / h;
  auto i = static_cast<std::size_t>(s);
  if (i >= val.size() - 1) i = val.size() - 2;
  double t = s - static_cast<double>(i);
  double t2 = t * t, t3 = t2 * t;
  // Cubic Hermite basis.
  return (2 * t3 - 3 * t2 + 1) * val[i] + (t3 - 2 * t2 + t) * h * der[i] +
         (-2 * t3 + 3 * t2) * val[i + 1] + (t3 - t2) * h * der[i + 1];
}

void SplineTable::build(double umax_, int resolution,
                        const std::function<double(double)>& f) {
  umax = umax_;
  val.resize(resolution + 1);
  der.resize(resolution + 1);
  double h = umax / resolution;
  // Derivatives at the nodes by high-order central differences; the closed
  // forms are smooth so this is accurate far beyond the spline error.
  double dh = h * 0.5;
  for (int i = 0; i <= resolution; ++i) {
    double u = i * h;
    val[i] = f(u);
    der[i] = (8 * (f(u + dh) - f(u - dh)) - (f(u + 2 * dh) - f(u - 2 * dh))) /
             (12 * dh);
  }
}

double RadialProfiles::calderon_integral() const {
  // Substituting s = e^v turns the integral into int Psi(e^v)^2 dv over
  // [log 1/2, log 2]; the integrand vanishes to all orders at the ends so
  // the composite midpoint rule converges superalgebraically.
  const int M = 1 << 14;
  double lo = std::log(0.5), hi = std::log(2.0), h = (hi - lo) / M;
  double s = 0;
  for (int i = 0; i < M; ++i) {
    double p = Psi(std::exp(lo + (i + 0.5) * h));
    s += p * p;
  }
  return s * h;
}

RadialProfiles build_profiles(int table_resolution) {
  if (table_resolution < 256)
    throw config_error("build_profiles: table_resolution must be >= 256");
  RadialProfiles p;
  p.resolution = table_resolution;

  // Calderon constant of the raw bump, by the same log-axis midpoint rule.
  const int M = 1 << 14;
  double lo = std::log(0.5), hi = std::log(2.0), h = (hi - lo) / M;
  double k2 = 0;
  for (int i = 0; i < M; ++i) {
    double t = annular_bump(std::exp(lo + (i + 0.5) * h));
    k2 += t * t;
  }
  k2 *= h;
  p.kappa = std::sqrt(k2);

  p.phi_tab.build(1.25, table_resolution, [](double u) { return plateau(u); });
  double kappa = p.kappa;
  p.psi_tab.build(2.5, table_resolution,
                  [kappa](double u) { return annular_bump(u) / kappa; });

  // Verify the tables reproduce the closed forms (profiles have sup-norm of
  // order 1, so the absolute tolerance doubles as a relative one).
  double err = 0;
  for (int i = 0; i <= 4096; ++i) {
    double u = 2.5 * i / 4096.0;
    err = std::max(err, std::abs(p.phi(std::min(u, 1.2499)) -
                                 (u >= 1.0 ? 0.0 : plateau(u))));
    err = std::max(err, std::abs(p.Psi(u) - ((u <= 0.5 || u >= 2.0)
                                                 ? 0.0
                                                 : annular_bump(u) / p.kappa)));
  }
  if (err > 1e-12)
    throw numeric_error("build_profiles: table resolution too small for the "
                        "1e-12 interpolation tolerance");
  double cal = p.calderon_integral();
  if (std::abs(cal - 1.0) > 1e-10)
    throw numeric_error("build_profiles: Calderon normalization off");
  return p;
}

double c_norm(const RadialProfiles& p, int n, double magnitude,
              int base_nodes) {
  if (magnitude <= 0) throw config_error("c_norm: magnitude must be > 0");
  double rt = std::sqrt(magnitude);
  // phi(rt * |e1 - nu|) concentrates on an angular cap of width ~ 1/rt, so
  // scale the node count with rt to keep the cap resolved.
  int nodes = base_nodes * std::max(1, static_cast<int>(std::ceil(rt)));
  double integral = 0;
  if (n == 2) {
    // nu = (cos a, sin a); |e1 - nu| = 2|sin(a/2)|; trapezoid over the
    // periodic circle is spectrally accurate.
    double h = TWO_PI / nodes;
    for (int i = 0; i < nodes; ++i) {
      double a = -PI + (i + 0.5) * h;
      double chord = 2.0 * std::abs(std::sin(0.5 * a));
      double v = p.phi(rt * chord);
      integral += v * v;
    }
    integral *= h;
  } else if (n == 3) {
    // Polar angle t from e1; chord 2 sin(t/2); measure 2 pi sin t dt.
    double h = PI / nodes;
    for (int i = 0; i < nodes; ++i) {
      double t = (i + 0.5) * h;
      double v = p.phi(rt * 2.0 * std::sin(0.5 * t));
      integral += v * v * std::sin(t);
    }
    integral *= TWO_PI * h;
  } else {
    throw config_error("c_norm: n must be 2 or 3");
  }
  return 1.0 / std::sqrt(integral);
}

}  // namespace wpx
