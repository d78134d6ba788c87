#include "wpx/flow.hpp"

#include <algorithm>
#include <cmath>

#include "wpx/fft.hpp"

namespace wpx {

namespace {

void rk4_point(const Symbol& b, Vec& x, Vec& xi, double dt, int steps) {
  int n = x.n;
  double h = dt / steps;
  for (int s = 0; s < steps; ++s) {
    double val;
    Vec gx(n), gxi(n);
    Vec x0 = x, xi0 = xi;
    b.eval_grad(x0, xi0, val, gx, gxi);
    Vec k1x = gxi, k1f = gx * -1.0;
    Vec xa = x0 + k1x * (h / 2), fa = xi0 + k1f * (h / 2);
    b.eval_grad(xa, fa, val, gx, gxi);
    Vec k2x = gxi, k2f = gx * -1.0;
    Vec xb = x0 + k2x * (h / 2), fb = xi0 + k2f * (h / 2);
    b.eval_grad(xb, fb, val, gx, gxi);
    Vec k3x = gxi, k3f = gx * -1.0;
    Vec xc = x0 + k3x * h, fc = xi0 + k3f * h;
    b.eval_grad(xc, fc, val, gx, gxi);
    Vec k4x = gxi, k4f = gx * -1.0;
    x = x0 + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6);
    xi = xi0 + (k1f + k2f * 2.0 + k3f * 2.0 + k4f) * (h / 6);
  }
}

std::vector<PhasePoint> run_flow(const Symbol& b,
                                 const std::vector<PhasePoint>& src, double t,
                                 int steps) {
  std::vector<PhasePoint> out = src;
  for (auto& p : out) rk4_point(b, p.x, p.xi, t, steps);
  return out;
}

double flow_disagreement(const std::vector<PhasePoint>& a,
                         const std::vector<PhasePoint>& bb) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double dx = torus_diff(a[i].x, bb[i].x).norm();
    double df = (a[i].xi - bb[i].xi).norm() / std::max(1.0, a[i].xi.norm());
    worst = std::max(worst, dx + df);
  }
  return worst;
}

double small_det(double m[6][6], int dim) {
  double d = 1.0;
  for (int c = 0; c < dim; ++c) {
    int piv = c;
    for (int r = c + 1; r < dim; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (piv != c) {
      for (int k = 0; k < dim; ++k) std::swap(m[c][k], m[piv][k]);
      d = -d;
    }
    if (m[c][c] == 0) return 0;
    d *= m[c][c];
    for (int r = c + 1; r < dim; ++r) {
      double f = m[r][c] / m[c][c];
      for (int k = c; k < dim; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return d;
}

}  // namespace

void hamilton_field(const Symbol& b, const PhasePoint& p, Vec& dx, Vec& dxi) {
  double val;
  Vec gx(p.x.n), gxi(p.x.n);
  b.eval_grad(p.x, p.xi, val, gx, gxi);
  dx = gxi;
  dxi = gx * -1.0;
}

FlowResult integrate_flow(const Symbol& b,
                          const std::vector<PhasePoint>& sources, double t,
                          int steps, bool diagnostics, bool adaptive) {
  if (steps <= 0)
    steps = std::max(1, static_cast<int>(std::ceil(64.0 * std::abs(t))));
  FlowResult res;
  res.t = t;
  res.steps = steps;
  if (adaptive) {
    std::vector<PhasePoint> prev = run_flow(b, sources, t, steps);
    int s = steps;
    bool ok = false;
    for (int round = 0; round < 2 && !ok; ++round) {
      s *= 2;
      std::vector<PhasePoint> next = run_flow(b, sources, t, s);
      if (flow_disagreement(prev, next) <= 1e-6) {
        ok = true;
        res.points = std::move(next);
        res.steps = s;
      } else {
        prev = std::move(next);
      }
    }
    if (!ok)
      throw numeric_error(
          "flow: step refinement did not converge to 1e-6 within 4x");
  } else {
    res.points = run_flow(b, sources, t, steps);
  }
  if (!diagnostics) return res;
  int n = sources.empty() ? 2 : sources[0].x.n;
  res.diag.resize(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const PhasePoint& s0 = sources[i];
    const PhasePoint& s1 = res.points[i];
    FlowDiag& dg = res.diag[i];
    double b0 = b.eval(s0.x, s0.xi).real();
    double b1 = b.eval(s1.x, s1.xi).real();
    dg.drift = std::abs(b1 - b0) / std::max(std::abs(b0), 1e-30);
    dg.sigma_ratio = s0.xi.norm() / std::max(s1.xi.norm(), 1e-300);
    // Jacobian by a central-difference cluster around the source.
    int dim = 2 * n;
    double M[6][6];
    double hx = 1e-4, hxi = 1e-4 * std::max(1.0, s0.xi.norm());
    for (int col = 0; col < dim; ++col) {
      PhasePoint pp = s0, pm = s0;
      double hh = col < n ? hx : hxi;
      if (col < n) {
        pp.x[col] += hh;
        pm.x[col] -= hh;
      } else {
        pp.xi[col - n] += hh;
        pm.xi[col - n] -= hh;
      }
      rk4_point(b, pp.x, pp.xi, t, res.steps);
      rk4_point(b, pm.x, pm.xi, t, res.steps);
      for (int row = 0; row < dim; ++row) {
        double diff = row < n ? torus_diff(pp.x[row], pm.x[row])
                              : pp.xi[row - n] - pm.xi[row - n];
        M[row][col] = diff / (2 * hh);
      }
    }
    dg.jacobian_defect = std::abs(small_det(M, dim) - 1.0);
  }
  return res;
}

std::vector<GronwallRow> gronwall_diag(const FlowResult& a,
                                       const FlowResult& h,
                                       const std::vector<PhasePoint>& sources) {
  std::vector<GronwallRow> rows(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const PhasePoint& pa = a.points[i];
    const PhasePoint& ph = h.points[i];
    Vec dxy = torus_diff(ph.x, pa.x);
    Vec om = pa.xi.hat(), nu = ph.xi.hat();
    double sigma = 1.0 / std::max(pa.xi.norm(), 1e-300);
    double tau = 1.0 / std::max(ph.xi.norm(), 1e-300);
    rows[i].d = dxy.dot(dxy) + (om - nu).dot(om - nu) +
                (1.0 - sigma / tau) * (1.0 - sigma / tau) +
                std::abs(nu.dot(dxy));
    rows[i].sigma0 = 1.0 / std::max(sources[i].xi.norm(), 1e-300);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Dense state + pullback.

FlowState identity_state(const PacketDictionary& dict) {
  if (dict.n != 2)
    throw config_error("flow state: only n = 2 is supported");
  FlowState s;
  s.dict = &dict;
  int N = dict.grid_size;
  std::size_t total = static_cast<std::size_t>(N) * N;
  std::size_t cnt = dict.packets() * total;
  s.px.resize(cnt);
  s.py.resize(cnt);
  s.fx.resize(cnt);
  s.fy.resize(cnt);
  double h = TWO_PI / N;
  for (std::size_t k = 0; k < dict.packets(); ++k) {
    const Vec& c = dict.indices[k].center;
    for (std::size_t m = 0; m < total; ++m) {
      std::size_t i = k * total + m;
      s.px[i] = h * static_cast<double>(m / N);
      s.py[i] = h * static_cast<double>(m % N);
      s.fx[i] = c[0];
      s.fy[i] = c[1];
    }
  }
  return s;
}

void advance_state(const Symbol& b, FlowState& s, double dt, int steps,
                   double skip_radius) {
  double r2 = skip_radius * skip_radius;
  std::size_t cnt = s.count();
  for (std::size_t i = 0; i < cnt; ++i) {
    if (s.fx[i] * s.fx[i] + s.fy[i] * s.fy[i] <= r2) continue;
    Vec x(s.px[i], s.py[i]), xi(s.fx[i], s.fy[i]);
    rk4_point(b, x, xi, dt, steps);
    s.px[i] = x[0];
    s.py[i] = x[1];
    s.fx[i] = xi[0];
    s.fy[i] = xi[1];
  }
  s.t += dt;
}

SliceEnvelopes build_envelopes(const PhaseField& F) {
  const PacketDictionary& dict = *F.dict;
  int N = dict.grid_size;
  int N2 = 2 * N;
  std::size_t total = static_cast<std::size_t>(N) * N;
  std::size_t total2 = static_cast<std::size_t>(N2) * N2;
  SliceEnvelopes E;
  E.N2 = N2;
  E.env.resize(dict.packets());
  E.carrier.resize(dict.packets());
  std::vector<cd> spec(total), big(total2);
  for (const auto& ring : dict.rings) {
    // Demodulation carrier: midpoint of the slice's resolved radial support,
    // rounded to the integer lattice so the envelope stays periodic.
    double lo = ring.mag / 2.0;
    double hi = std::min(2.0 * ring.mag, static_cast<double>(dict.guard));
    double mu = 0.5 * (lo + std::max(hi, lo));
    for (int d = 0; d < ring.ndir; ++d) {
      std::size_t k = static_cast<std::size_t>(ring.first_packet) + d;
      Vec ch = dict.indices[k].center.hat() * mu;
      int c0 = static_cast<int>(std::lround(ch[0]));
      int c1 = static_cast<int>(std::lround(ch[1]));
      E.carrier[k] = {c0, c1};
      std::copy(F.slices[k].begin(), F.slices[k].end(), spec.begin());
      fft::forward(spec.data(), 2, N);
      std::fill(big.begin(), big.end(), cd(0));
      for (std::size_t idx = 0; idx < total; ++idx) {
        if (spec[idx] == cd(0)) continue;
        int z0 = fft_freq(static_cast<int>(idx / N), N) - c0;
        int z1 = fft_freq(static_cast<int>(idx % N), N) - c1;
        std::size_t b0 = static_cast<std::size_t>((z0 % N2 + N2) % N2);
        std::size_t b1 = static_cast<std::size_t>((z1 % N2 + N2) % N2);
        big[b0 * N2 + b1] = spec[idx];
      }
      fft::inverse(big.data(), 2, N2);
      auto& e = E.env[k];
      e.resize(total2);
      for (std::size_t i = 0; i < total2; ++i)
        e[i] = std::complex<float>(static_cast<float>(big[i].real()),
                                   static_cast<float>(big[i].imag()));
    }
  }
  return E;
}

namespace {

inline void catmull_weights(double t, double* w) {
  double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

inline cd sample_envelope(const std::vector<std::complex<float>>& env, int N2,
                          double y0, double y1) {
  double h = TWO_PI / N2;
  double u0 = y0 / h, u1 = y1 / h;
  double f0 = std::floor(u0), f1 = std::floor(u1);
  int i0 = static_cast<int>(f0), i1 = static_cast<int>(f1);
  double w0[4], w1[4];
  catmull_weights(u0 - f0, w0);
  catmull_weights(u1 - f1, w1);
  double re = 0, im = 0;
  for (int a = 0; a < 4; ++a) {
    int r = ((i0 + a - 1) % N2 + N2) % N2;
    const std::complex<float>* row = env.data() + static_cast<std::size_t>(r) * N2;
    double rr = 0, ri = 0;
    for (int bcol = 0; bcol < 4; ++bcol) {
      int c = ((i1 + bcol - 1) % N2 + N2) % N2;
      rr += w1[bcol] * row[c].real();
      ri += w1[bcol] * row[c].imag();
    }
    re += w0[a] * rr;
    im += w0[a] * ri;
  }
  return cd(re, im);
}

}  // namespace

PhaseField pullback(const PhaseField& F, const SliceEnvelopes& E,
                    const FlowState& s, double* clipped_fraction) {
  const PacketDictionary& dict = *F.dict;
  if (s.dict != &dict && s.dict->packets() != dict.packets())
    throw config_error("pullback: state/dictionary mismatch");
  int N = dict.grid_size;
  int N2 = E.N2;
  std::size_t total = static_cast<std::size_t>(N) * N;
  int R = static_cast<int>(dict.rings.size());
  int L = dict.radial_nodes;
  PhaseField G(dict);
  G.low = F.low;  // the flow is the identity below the Hamiltonian cutoff
  double totE = F.weighted_l2();
  double totE2 = totE * totE;
  double clipped = 0;

  // Map packet -> ring index.
  std::vector<int> ring_of(dict.packets());
  for (int r = 0; r < R; ++r)
    for (int d = 0; d < dict.rings[r].ndir; ++d)
      ring_of[dict.rings[r].first_packet + d] = r;

  auto packet_value = [&](std::size_t k, double y0, double y1) {
    cd v = sample_envelope(E.env[k], N2, y0, y1);
    double ph = E.carrier[k][0] * y0 + E.carrier[k][1] * y1;
    return v * std::polar(1.0, ph);
  };

  for (std::size_t k = 0; k < dict.packets(); ++k) {
    const double wk = dict.indices[k].w;
    std::vector<cd>& gk = G.slices[k];
    const std::vector<cd>& fk = F.slices[k];
    for (std::size_t m = 0; m < total; ++m) {
      std::size_t i = k * total + m;
      double e0 = s.fx[i], e1 = s.fy[i];
      double rmag = std::hypot(e0, e1);
      if (rmag <= 0) {
        gk[m] = fk[m];
        continue;
      }
      double u = (std::log2(rmag) - dict.log2_base) * L;
      if (u < -0.5) {
        gk[m] = fk[m];
        continue;
      }
      if (u > R - 1 + 0.5) {
        clipped += wk * std::norm(fk[m]) / static_cast<double>(total);
        continue;
      }
      u = std::clamp(u, 0.0, static_cast<double>(R - 1));
      int r0 = std::min(static_cast<int>(u), std::max(R - 2, 0));
      double fr = u - r0;
      double theta = std::atan2(e1, e0);
      if (theta < 0) theta += TWO_PI;
      double y0 = s.px[i], y1 = s.py[i];
      cd value = 0;
      for (int rr = 0; rr < 2; ++rr) {
        int ri = std::min(r0 + rr, R - 1);
        double wr = rr == 0 ? 1.0 - fr : fr;
        if (wr == 0) continue;
        const Ring& ring = dict.rings[ri];
        double dpos = theta / TWO_PI * ring.ndir - ring.offset;
        double fd0 = std::floor(dpos);
        double fd = dpos - fd0;
        int d0 = static_cast<int>(fd0) % ring.ndir;
        if (d0 < 0) d0 += ring.ndir;
        int d1 = (d0 + 1) % ring.ndir;
        cd v0 = packet_value(ring.first_packet + d0, y0, y1);
        cd v1 = packet_value(ring.first_packet + d1, y0, y1);
        value += wr * ((1.0 - fd) * v0 + fd * v1);
      }
      gk[m] = value;
    }
  }
  double fraction = totE2 > 0 ? clipped / totE2 : 0.0;
  if (clipped_fraction) *clipped_fraction = fraction;
  if (fraction > 0.05)
    throw numeric_error("pullback: more than 5% of the energy left the band");
  return G;
}

PhaseField pullback(const PhaseField& F, const FlowState& s,
                    double* clipped_fraction) {
  SliceEnvelopes E = build_envelopes(F);
  return pullback(F, E, s, clipped_fraction);
}

}  // namespace wpx
