#include "wpx/tent.hpp"

#include <algorithm>
#include <cmath>

namespace wpx {

double quasi_dist(const SpherePoint& a, const SpherePoint& b) {
  Vec dx = torus_diff(a.x, b.x);
  double par = std::abs(a.omega.dot(dx));
  double dw2 = (a.omega - b.omega).dot(a.omega - b.omega);
  return std::sqrt(dx.dot(dx) + par + dw2);
}

double ball_volume_mc(int n, double tau, std::size_t samples,
                      std::uint64_t seed, double* stderr_out) {
  if (n != 2 && n != 3) throw config_error("ball_volume: n must be 2 or 3");
  auto rng = make_rng(seed, 0x62616c6cull);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Center (0, e1). The ball {d < tau} is contained in the anisotropic box
  //   |perp| <= tau, |par| <= min(tau, tau^2), |nu - e1| <= tau,
  // sampled exactly, so the hit fraction stays O(1) for small tau.
  double pmax = std::min(tau, tau * tau);
  double meas_pos = std::pow(2.0 * tau, n - 1) * 2.0 * pmax;
  double meas_dir;
  double cos_min = 1.0 - 0.5 * std::min(tau * tau, 4.0);
  if (n == 2) {
    double bmax = tau >= 2.0 ? PI : 2.0 * std::asin(0.5 * tau);
    meas_dir = 2.0 * bmax;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
      double v = (2.0 * unif(rng) - 1.0) * pmax;   // along e1
      double u = (2.0 * unif(rng) - 1.0) * tau;    // perpendicular
      double beta = (2.0 * unif(rng) - 1.0) * bmax;
      double dw2 = 2.0 - 2.0 * std::cos(beta);
      if (v * v + u * u + std::abs(v) + dw2 < tau * tau) ++hits;
    }
    double f = static_cast<double>(hits) / samples;
    double vol = meas_pos * meas_dir * f;
    if (stderr_out)
      *stderr_out = meas_pos * meas_dir * std::sqrt(f * (1.0 - f) / samples);
    return vol;
  }
  // n == 3: spherical cap sampled uniformly in cos(theta).
  meas_dir = TWO_PI * (1.0 - cos_min);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    double v = (2.0 * unif(rng) - 1.0) * pmax;
    double u1 = (2.0 * unif(rng) - 1.0) * tau;
    double u2 = (2.0 * unif(rng) - 1.0) * tau;
    double ct = cos_min + unif(rng) * (1.0 - cos_min);
    double dw2 = 2.0 - 2.0 * ct;
    if (v * v + u1 * u1 + u2 * u2 + std::abs(v) + dw2 < tau * tau) ++hits;
  }
  double f = static_cast<double>(hits) / samples;
  if (stderr_out)
    *stderr_out = meas_pos * meas_dir * std::sqrt(f * (1.0 - f) / samples);
  return meas_pos * meas_dir * f;
}

BallVolumeTable build_ball_table(int n, int J, int K,
                                 std::size_t samples_per_radius,
                                 std::uint64_t seed) {
  BallVolumeTable t;
  t.n = n;
  for (int e = -J; e <= K; ++e) {
    double tau = std::pow(2.0, e);
    double se = 0;
    double vol = ball_volume_mc(n, tau, samples_per_radius,
                                seed + static_cast<std::uint64_t>(e + J), &se);
    t.radii.push_back(tau);
    t.volumes.push_back(vol);
    t.stderrs.push_back(se);
  }
  return t;
}

double BallVolumeTable::volume(double tau) const {
  if (radii.empty()) throw config_error("empty ball table");
  double lt = std::log2(tau);
  double l0 = std::log2(radii.front()), l1 = std::log2(radii.back());
  if (lt <= l0)  // extrapolate by the small-radius power law tau^{2n}
    return volumes.front() * std::pow(tau / radii.front(), 2.0 * n);
  if (lt >= l1)  // large-radius power law tau^n
    return volumes.back() * std::pow(tau / radii.back(), n);
  double pos = lt - l0;
  auto i = static_cast<std::size_t>(pos);
  if (i >= radii.size() - 1) i = radii.size() - 2;
  double fr = pos - static_cast<double>(i);
  return std::exp((1.0 - fr) * std::log(volumes[i]) +
                  fr * std::log(volumes[i + 1]));
}

std::vector<SpherePoint> eval_grid(const PacketDictionary& dict, int stride) {
  const Ring& r0 = dict.rings.front();
  std::vector<Vec> dirs;
  for (int d = 0; d < r0.ndir; ++d)
    dirs.push_back(dict.indices[r0.first_packet + d].center.hat());
  int N = dict.grid_size;
  double h = TWO_PI / N;
  std::vector<SpherePoint> pts;
  if (dict.n == 2) {
    for (int i = 0; i < N; i += stride)
      for (int j = 0; j < N; j += stride)
        for (const Vec& w : dirs) pts.push_back({Vec(i * h, j * h), w});
  } else {
    for (int i = 0; i < N; i += stride)
      for (int j = 0; j < N; j += stride)
        for (int k = 0; k < N; k += stride)
          for (const Vec& w : dirs)
            pts.push_back({Vec(i * h, j * h, k * h), w});
  }
  return pts;
}

namespace {

// Per-ring constants of the cone sum.
struct RingCtx {
  double rho;     // |xi|^{-1/2}
  double factor;  // mu(|xi|) |xi|^{2s} w_k (shared by the ring's packets)
};

}  // namespace

std::vector<double> a_functional(const PhaseField& F,
                                 const BallVolumeTable& vols, double s,
                                 double alpha,
                                 const std::vector<SpherePoint>& pts,
                                 TentWarnings* warn) {
  const PacketDictionary& dict = *F.dict;
  int N = dict.grid_size;
  double h = TWO_PI / N;
  double cell_y = std::pow(h, dict.n);
  std::vector<RingCtx> ctx(dict.rings.size());
  for (std::size_t r = 0; r < dict.rings.size(); ++r) {
    const Ring& ring = dict.rings[r];
    ctx[r].rho = 1.0 / std::sqrt(ring.mag);
    ctx[r].factor = vols.mu(ring.mag) * std::pow(ring.mag, 2.0 * s) *
                    dict.indices[ring.first_packet].w;
  }
  std::vector<double> out;
  out.reserve(pts.size());
  int empty = 0;
  for (const auto& pt : pts) {
    double sum = 0;
    bool any = false;
    for (std::size_t r = 0; r < dict.rings.size(); ++r) {
      const Ring& ring = dict.rings[r];
      double rlim = alpha * ctx[r].rho, rlim2 = rlim * rlim;
      for (int d = 0; d < ring.ndir; ++d) {
        int pk = ring.first_packet + d;
        Vec dir = dict.indices[pk].center.hat();
        double dw2 = (dir - pt.omega).dot(dir - pt.omega);
        if (dw2 >= rlim2) continue;
        double rem2 = rlim2 - dw2;
        double rem = std::sqrt(rem2);
        int B = static_cast<int>(rem / h) + 1;
        const auto& slice = F.slices[pk];
        // Box scan around pt.x (n = 2 or 3 handled uniformly).
        int b2 = dict.n == 3 ? B : 0;
        int base[3] = {0, 0, 0};
        for (int i = 0; i < dict.n; ++i)
          base[i] = static_cast<int>(std::lround(pt.x[i] / h));
        for (int o0 = -B; o0 <= B; ++o0)
          for (int o1 = -B; o1 <= B; ++o1)
            for (int o2 = -b2; o2 <= b2; ++o2) {
              int gi[3] = {base[0] + o0, base[1] + o1, base[2] + o2};
              std::size_t m = 0;
              Vec y(dict.n);
              for (int i = 0; i < dict.n; ++i) {
                int g = ((gi[i] % N) + N) % N;
                m = m * N + static_cast<std::size_t>(g);
                y[i] = g * h;
              }
              Vec dx = torus_diff(y, pt.x);
              double d2 = dx.dot(dx) + std::abs(pt.omega.dot(dx));
              if (d2 > rem2) continue;
              any = true;
              double a2 = std::norm(slice[m]);
              sum += a2 * ctx[r].factor;
            }
      }
    }
    if (!any) ++empty;
    out.push_back(std::sqrt(sum * cell_y));
  }
  if (warn) {
    warn->empty_cones = empty;
    warn->coverage =
        pts.empty() ? 1.0 : 1.0 - static_cast<double>(empty) / pts.size();
  }
  return out;
}

namespace {

// C_s over a dictionary of balls: lower-bound approximation of the sup.
double c_functional_sup(const PhaseField& F, const BallVolumeTable& vols,
                        double s, int stride) {
  const PacketDictionary& dict = *F.dict;
  int N = dict.grid_size;
  double h = TWO_PI / N;
  double cell_y = std::pow(h, dict.n);
  // Max quasi-distance on the torus cross sphere (whole-space shortcut).
  double diam = std::sqrt(dict.n * PI * PI + PI * std::sqrt(dict.n) + 4.0);
  auto centers = eval_grid(dict, std::max(stride, 8));
  std::vector<double> ring_total(dict.rings.size(), 0.0);
  for (std::size_t r = 0; r < dict.rings.size(); ++r) {
    const Ring& ring = dict.rings[r];
    double tot = 0;
    for (int d = 0; d < ring.ndir; ++d)
      for (const auto& v : F.slices[ring.first_packet + d]) tot += std::norm(v);
    ring_total[r] = tot * std::pow(ring.mag, 2.0 * s) *
                    dict.indices[ring.first_packet].w * cell_y;
  }
  double best = 0;
  for (double rad : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    double vol = vols.volume(rad);
    for (const auto& c : centers) {
      double sum = 0;
      for (std::size_t r = 0; r < dict.rings.size(); ++r) {
        const Ring& ring = dict.rings[r];
        double rho = 1.0 / std::sqrt(ring.mag);
        double lim = rad - rho;  // tent condition d(., B^c) >= rho
        if (lim <= 0) continue;
        if (lim >= diam) {  // ball swallows everything at this scale
          sum += ring_total[r];
          continue;
        }
        double wfac = std::pow(ring.mag, 2.0 * s) *
                      dict.indices[ring.first_packet].w * cell_y;
        for (int d = 0; d < ring.ndir; ++d) {
          int pk = ring.first_packet + d;
          Vec dir = dict.indices[pk].center.hat();
          double dw2 = (dir - c.omega).dot(dir - c.omega);
          if (dw2 >= lim * lim) continue;
          double rem2 = lim * lim - dw2;
          double rem = std::sqrt(rem2);
          int B = std::min(static_cast<int>(rem / h) + 1, N / 2);
          int b2 = dict.n == 3 ? B : 0;
          const auto& slice = F.slices[pk];
          int base[3] = {0, 0, 0};
          for (int i = 0; i < dict.n; ++i)
            base[i] = static_cast<int>(std::lround(c.x[i] / h));
          for (int o0 = -B; o0 <= B; ++o0)
            for (int o1 = -B; o1 <= B; ++o1)
              for (int o2 = -b2; o2 <= b2; ++o2) {
                int gi[3] = {base[0] + o0, base[1] + o1, base[2] + o2};
                std::size_t m = 0;
                Vec y(dict.n);
                for (int i = 0; i < dict.n; ++i) {
                  int g = ((gi[i] % N) + N) % N;
                  m = m * N + static_cast<std::size_t>(g);
                  y[i] = g * h;
                }
                Vec dx = torus_diff(y, c.x);
                double d2 = dx.dot(dx) + std::abs(c.omega.dot(dx));
                if (d2 + dw2 > lim * lim) continue;
                sum += std::norm(slice[m]) * wfac;
              }
        }
      }
      best = std::max(best, std::sqrt(sum / vol));
    }
  }
  return best;
}

}  // namespace

TentNormReport tent_norm(const PhaseField& F, const BallVolumeTable& vols,
                         double p, double s, double alpha, int stride) {
  if (p < 1) throw config_error("tent_norm: p must be >= 1");
  const PacketDictionary& dict = *F.dict;
  TentNormReport rep;
  rep.p = p;
  rep.s = s;
  rep.alpha = alpha;
  rep.stride = stride;
  rep.s_of_p = 0.5 * (dict.n - 1) *
               std::abs(0.5 - (std::isinf(p) ? 0.0 : 1.0 / p));
  if (std::isinf(p)) {
    rep.value = c_functional_sup(F, vols, s, stride);
    return rep;
  }
  auto pts = eval_grid(dict, stride);
  rep.eval_points = static_cast<int>(pts.size());
  auto A = a_functional(F, vols, s, alpha, pts, &rep.warnings);
  const Ring& r0 = dict.rings.front();
  // Outer position integral uses the normalized (mean) measure so that the
  // p = 2, s = 0 norm coincides with the weighted-l2 / L2 convention.
  double cell = std::pow(static_cast<double>(stride) / dict.grid_size,
                         dict.n) *
                sphere_measure(dict.n) / r0.ndir;
  double acc = 0;
  for (double a : A) acc += std::pow(a, p) * cell;
  rep.value = std::pow(acc, 1.0 / p);
  return rep;
}

ApertureReport aperture_check(const PhaseField& F, const BallVolumeTable& vols,
                              double s, double p, int stride) {
  ApertureReport rep{};
  double alphas[3] = {0.5, 1.0, 2.0};
  for (int i = 0; i < 3; ++i)
    rep.norms[i] = tent_norm(F, vols, p, s, alphas[i], stride).value;
  rep.max_ratio = 1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (rep.norms[j] > 0)
        rep.max_ratio = std::max(rep.max_ratio, rep.norms[i] / rep.norms[j]);
  return rep;
}

}  // namespace wpx
