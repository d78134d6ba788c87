// Acceptance gate: thirteen end-to-end checks, one PASS/FAIL line each.
// Every tolerance is pinned here; the binary exits nonzero if any check
// fails. Expected total runtime is under 90 minutes on one core.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "wpx/parametrix.hpp"
#include "wpx/reference.hpp"
#include "wpx/tent.hpp"

using namespace wpx;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("C%02d %-24s %s  %s\n", id, name, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

std::vector<PhasePoint> sample_sources(int count, double kmin, double kmax,
                                       std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed, 0xACC);
  std::uniform_real_distribution<double> ux(0, TWO_PI), uu(0, 1);
  std::vector<PhasePoint> src;
  for (int i = 0; i < count; ++i) {
    PhasePoint p;
    p.x = Vec(ux(rng), ux(rng));
    double mag = kmin * std::pow(kmax / kmin, uu(rng));
    double th = ux(rng);
    p.xi = Vec(mag * std::cos(th), mag * std::sin(th));
    src.push_back(p);
  }
  return src;
}

// Lipschitz rate of log sigma along the flow: M = sup |d_x b| / b, the sup
// estimated on a dense phase-space sample.
double measure_M(const Symbol& b, double kmin, double kmax) {
  double M = 0;
  for (int ix = 0; ix < 24; ++ix)
    for (int iy = 0; iy < 24; ++iy)
      for (int id = 0; id < 16; ++id)
        for (double mag : {kmin, std::sqrt(kmin * kmax), kmax}) {
          Vec x(TWO_PI * ix / 24, TWO_PI * iy / 24);
          double th = TWO_PI * id / 16;
          Vec xi(mag * std::cos(th), mag * std::sin(th));
          double val;
          Vec gx, gxi;
          b.eval_grad(x, xi, val, gx, gxi);
          if (val > 1e-12) M = std::max(M, gx.norm() / val);
        }
  return M;
}

}  // namespace

int main() {
  auto wall0 = std::chrono::steady_clock::now();
  RadialProfiles profiles = build_profiles(8192);
  PacketDictionary d64 = build_dictionary(profiles, 64, 2, 4.0, 3,
                                          DictMode::renormalized);
  PacketDictionary d128 = build_dictionary(profiles, 128, 2, 4.0, 3,
                                           DictMode::renormalized);

  // C1: renormalized partition function within 1e-12 of 1 on the resolved
  // band; W*W round-trip within 1e-10 over 20 random band-limited fields.
  try {
    auto t0 = std::chrono::steady_clock::now();
    double rt = 0;
    for (int i = 0; i < 20; ++i) {
      RealField f = random_band_limited(2, 128, 2, d128.guard, 1000 + i);
      rt = std::max(rt, rel_l2_error(synthesize(analyze(f, d128)), f));
    }
    double el = seconds_since(t0);
    bool ok = d128.eps_frame <= 1e-12 && rt <= 1e-10 && el < 60;
    report(1, "frame exactness", ok,
           fmt("partition dev %.2e, roundtrip %.2e, %.1f s", d128.eps_frame,
               rt, el));
  } catch (const std::exception& e) {
    report(1, "frame exactness", false, e.what());
  }

  // C2: isometry of W onto the weighted l2 norm, renormalized within 1e-10
  // and raw within twice the raw frame deviation.
  try {
    PacketDictionary raw =
        build_dictionary(profiles, 128, 2, 4.0, 3, DictMode::raw);
    double dev_ren = 0, dev_raw = 0;
    for (int i = 0; i < 5; ++i) {
      RealField f = random_band_limited(2, 128, 3, d128.guard - 1, 1100 + i);
      double r = analyze(f, d128).weighted_l2() / f.l2_norm();
      dev_ren = std::max(dev_ren, std::abs(r * r - 1.0));
      double q = analyze(f, raw).weighted_l2() / f.l2_norm();
      dev_raw = std::max(dev_raw, std::abs(q * q - 1.0));
    }
    bool ok = dev_ren <= 1e-10 && dev_raw <= 2 * raw.eps_frame;
    report(2, "isometry", ok,
           fmt("renorm dev %.2e, raw dev %.2e vs 2*eps %.2e", dev_ren,
               dev_raw, 2 * raw.eps_frame));
  } catch (const std::exception& e) {
    report(2, "isometry", false, e.what());
  }

  // C3: p=2, s=0 tent norm equals the global weighted l2 norm within 5%
  // quadrature tolerance over 10 random fields.
  try {
    BallVolumeTable vols = build_ball_table(2, 8, 2, 200000, 17);
    double worst = 0;
    for (int i = 0; i < 10; ++i) {
      RealField f = random_band_limited(2, 64, 4, d64.guard - 2, 1200 + i);
      PhaseField F = analyze(f, d64);
      TentNormReport rep = tent_norm(F, vols, 2.0, 0.0);
      worst = std::max(worst, std::abs(rep.value / F.weighted_l2() - 1.0));
    }
    report(3, "tent identity", worst <= 0.05, fmt("max dev %.3f", worst));
  } catch (const std::exception& e) {
    report(3, "tent identity", false, e.what());
  }

  // C4: Monte-Carlo ball-volume slopes 2n in the sub-unit regime and n in
  // the homogeneous regime, n = 2, 1e6 samples per radius.
  try {
    auto t0 = std::chrono::steady_clock::now();
    auto slope_over = [&](std::vector<double> taus) {
      std::vector<double> lx, ly;
      for (double tau : taus) {
        lx.push_back(std::log2(tau));
        ly.push_back(std::log2(ball_volume_mc(2, tau, 1000000, 4242)));
      }
      return ls_slope(lx, ly);
    };
    double s_small = slope_over({1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2});
    double s_large = slope_over({8, 16, 32});
    double el = seconds_since(t0);
    bool ok = std::abs(s_small - 4.0) <= 0.15 &&
              std::abs(s_large - 2.0) <= 0.15 && el < 120;
    report(4, "ball-volume scaling", ok,
           fmt("slopes %.3f (want 4), %.3f (want 2), %.1f s", s_small,
               s_large, el));
  } catch (const std::exception& e) {
    report(4, "ball-volume scaling", false, e.what());
  }

  // C5: the rough remainder of generated r=2 coefficients decays one order
  // below the metric symbol: dyadic slope of sup_x |a_flat| / |xi|^2 at most
  // -0.85 across |xi| in [8, 42].
  try {
    auto coeffs = std::make_shared<CoefficientMatrix>(
        gen_rough_coeffs(2, 128, 2.0, 0.2, 11));
    auto aflat = make_metric_symbol(coeffs, MetricMode::flat);
    std::vector<double> lx, ly;
    for (double mag : {8.0, 16.0, 32.0, 42.0}) {
      Vec xi(mag * std::cos(0.3), mag * std::sin(0.3));
      double sup = 0;
      for (int ix = 0; ix < 16; ++ix)
        for (int iy = 0; iy < 16; ++iy)
          sup = std::max(sup, std::abs(aflat->eval(
                                  Vec(TWO_PI * ix / 16, TWO_PI * iy / 16),
                                  xi)));
      lx.push_back(std::log2(mag));
      ly.push_back(std::log2(sup / (mag * mag)));
    }
    double slope = ls_slope(lx, ly);
    report(5, "symbol smoothing decay", slope <= -0.85,
           fmt("slope %.3f (target -1)", slope));
  } catch (const std::exception& e) {
    report(5, "symbol smoothing decay", false, e.what());
  }

  // C6: flow diagnostics over 1e3 sources, |t| <= 1: Hamiltonian drift
  // <= 1e-8, Jacobian defect <= 1e-4, sigma-ratio inside [e^{-Mt}, e^{Mt}]
  // for the measured Lipschitz rate M; flat-metric flow exact to 1e-10.
  try {
    auto t0 = std::chrono::steady_clock::now();
    auto ca = std::make_shared<CoefficientMatrix>(
        gen_rough_coeffs(2, 64, 2.0, 0.2, 9));
    SqrtSymbol b(make_metric_symbol(ca, MetricMode::sharp), 4.0);
    auto src = sample_sources(1000, 9, 24, 21);
    double M = measure_M(b, 9, 24);
    double drift = 0, jac = 0;
    bool sig_ok = true;
    for (double t : {1.0, -1.0}) {
      FlowResult fr = integrate_flow(b, src, t, 0, true);
      for (const FlowDiag& g : fr.diag) {
        drift = std::max(drift, g.drift);
        jac = std::max(jac, g.jacobian_defect);
        if (g.sigma_ratio < std::exp(-M) * (1 - 1e-9) ||
            g.sigma_ratio > std::exp(M) * (1 + 1e-9))
          sig_ok = false;
      }
    }
    auto cf = std::make_shared<CoefficientMatrix>(flat_coefficients(2, 64));
    SqrtSymbol bf(make_metric_symbol(cf, MetricMode::sharp), 4.0);
    FlowResult fr = integrate_flow(bf, src, 1.0);
    double flat_err = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      Vec want = src[i].x + src[i].xi.hat();
      flat_err = std::max(flat_err,
                          torus_diff(fr.points[i].x, want).norm());
      flat_err = std::max(flat_err, (fr.points[i].xi - src[i].xi).norm() /
                                        src[i].xi.norm());
    }
    bool ok = drift <= 1e-8 && jac <= 1e-4 && sig_ok && flat_err <= 1e-10;
    report(6, "flow diagnostics", ok,
           fmt("drift %.1e, jac %.1e, M %.3f sig %s, flat %.1e, %.0f s",
               drift, jac, M, sig_ok ? "ok" : "out", flat_err,
               seconds_since(t0)));
  } catch (const std::exception& e) {
    report(6, "flow diagnostics", false, e.what());
  }

  // C7: flow divergence between the smoothed Hamiltonian and its
  // homogeneous ray limit: mean D/sigma0 over 250 sources per group stays
  // within 30% as sigma0 halves from 2^-4 to 2^-7, |t| <= 1.
  try {
    auto t0 = std::chrono::steady_clock::now();
    auto ca = std::make_shared<CoefficientMatrix>(
        gen_rough_coeffs(2, 128, 2.0, 0.2, 9));
    auto b = std::make_shared<SqrtSymbol>(
        make_metric_symbol(ca, MetricMode::sharp), 4.0);
    RayLimitSymbol h(b);
    std::vector<double> means;
    bool finite = true;
    for (int g = 0; g < 4; ++g) {
      double mag = std::pow(2.0, 4 + g);  // sigma0 = 2^-(4+g)
      auto src = sample_sources(250, mag, mag, 300 + g);
      std::vector<double> worst(src.size(), 0.0);
      for (double t : {1.0, -1.0}) {
        FlowResult fa = integrate_flow(*b, src, t);
        FlowResult fh = integrate_flow(h, src, t);
        auto rows = gronwall_diag(fa, fh, src);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          double r = rows[i].d / rows[i].sigma0;
          if (!std::isfinite(r)) finite = false;
          worst[i] = std::max(worst[i], r);
        }
      }
      double m = 0;
      for (double w : worst) m += w;
      means.push_back(m / worst.size());
    }
    double lo = means[0], hi = means[0];
    for (double m : means) {
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    bool ok = finite && hi / lo <= 1.3;
    report(7, "gronwall bound", ok,
           fmt("group means %.3g %.3g %.3g %.3g, spread %.2f, %.0f s",
               means[0], means[1], means[2], means[3], hi / lo,
               seconds_since(t0)));
  } catch (const std::exception& e) {
    report(7, "gronwall bound", false, e.what());
  }

  // C8: U_0 = I to reconstruction tolerance; the flat-metric half-wave
  // propagator (leading transport plus Picard corrections) against the
  // exact multiplier within 5e-2 at t = 0.5 on the 128^2 grid.
  try {
    auto t0 = std::chrono::steady_clock::now();
    auto cf = std::make_shared<CoefficientMatrix>(flat_coefficients(2, 128));
    HalfWaveConfig cfg;
    cfg.dt = 1.0 / 32;
    cfg.picard_K = 4;
    HalfWaveOperator op(d128, cf, OperatorForm::divergence, cfg);
    RealField f = random_band_limited(2, 128, 17, 40, 77);
    double id_err = rel_l2_error(op.apply_U(f, 0.0), f);
    double prop_err =
        rel_l2_error(op.first_order_solve(f, 0.5), exact_halfwave(f, 0.5));
    double el = seconds_since(t0);
    bool ok = id_err <= 1e-6 && prop_err <= 5e-2 && el < 300;
    report(8, "parametrix identity/flat", ok,
           fmt("U_0 err %.2e, U_0.5 err %.3f, %.0f s", id_err, prop_err, el));
  } catch (const std::exception& e) {
    report(8, "parametrix identity/flat", false, e.what());
  }

  // C9: error-operator boundedness under refinement: sup over t in
  // {+-0.25, +-0.5, +-1} of ||(D_t - b)U_t f|| / ||f|| changes by at most
  // 2x from grid 64 to 128 (perturbed metric). One incremental flow sweep
  // per sign serves all six times.
  try {
    auto t0 = std::chrono::steady_clock::now();
    const double hfd = 1.0 / 256;
    auto sup_ratio = [&](const PacketDictionary& dict, int N) {
      auto ca = std::make_shared<CoefficientMatrix>(
          gen_rough_coeffs(2, N, 2.0, 0.2, 9));
      HalfWaveOperator op(dict, ca, OperatorForm::divergence);
      RealField f = random_band_limited(2, N, 17, 21, 55);
      PhaseField Wf = analyze(f, dict);
      SliceEnvelopes env = build_envelopes(Wf);
      double sup = 0;
      for (double sgn : {1.0, -1.0}) {
        FlowState s = identity_state(dict);
        double pos = 0;
        RealField um, u0;
        int phase = 0;  // cycles t-h, t, t+h per target time
        for (double tt : {0.25, 0.5, 1.0}) {
          for (double target : {sgn * tt - hfd, sgn * tt, sgn * tt + hfd}) {
            double dlt = target - pos;
            advance_state(op.b(), s, dlt, op.substeps(dlt),
                          op.config().chi_cutoff);
            pos = target;
            RealField u = synthesize(pullback(Wf, env, s));
            if (phase == 0) {
              um = std::move(u);
            } else if (phase == 1) {
              u0 = std::move(u);
            } else {
              u -= um;
              u *= cd(0, -1.0 / (2 * hfd));
              u -= op.quantizer().apply(u0);
              sup = std::max(sup, u.l2_norm() / f.l2_norm());
            }
            phase = (phase + 1) % 3;
          }
        }
      }
      return sup;
    };
    double s64 = sup_ratio(d64, 64);
    double s128 = sup_ratio(d128, 128);
    double change = s128 / s64;
    bool ok = change <= 2.0 && change >= 0.5;
    report(9, "error-operator stability", ok,
           fmt("sup64 %.3f, sup128 %.3f, change %.2fx, %.0f s", s64, s128,
               change, seconds_since(t0)));
  } catch (const std::exception& e) {
    report(9, "error-operator stability", false, e.what());
  }

  // C10: Picard decay at t0 = 0.5: level-norm ratios decrease monotonically
  // for k >= 2 and the K=8 truncation changes the solution by <= 1e-6
  // relative to K=9.
  try {
    auto t0 = std::chrono::steady_clock::now();
    auto ca = std::make_shared<CoefficientMatrix>(
        gen_rough_coeffs(2, 64, 2.0, 0.2, 9));
    HalfWaveConfig cfg;
    cfg.chi_cutoff = 4.0;  // chi = 1 above 8; probe band sits above it
    cfg.dt = 1.0 / 64;
    HalfWaveOperator op(d64, ca, OperatorForm::divergence, cfg);
    RealField f = random_band_limited(2, 64, 9, 14, 88);
    auto r8 = op.evolve({f}, 0.5, 8);
    auto r9 = op.evolve({f}, 0.5, 9);
    const std::vector<double>& v = r8.level_norm[0];
    bool mono = true;
    std::string rs;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      double rk = v[k + 1] / v[k];
      if (k >= 3 && rk > v[k] / v[k - 1]) mono = false;  // r_k vs r_{k-1}
      rs += fmt("%s%.3f", k ? " " : "", rk);
    }
    RealField diff = r9.e[0].back();
    diff -= r8.e[0].back();
    double trunc = diff.l2_norm() / r8.e[0].back().l2_norm();
    bool ok = mono && trunc <= 1e-6;
    report(10, "picard decay", ok,
           fmt("ratios [%s], trunc %.2e, %.0f s", rs.c_str(), trunc,
               seconds_since(t0)));
  } catch (const std::exception& e) {
    report(10, "picard decay", false, e.what());
  }

  // C11/C12: end-to-end equivalence against the pseudospectral reference:
  // rough divergence-form (then standard-form) solve, band-limited u0,
  // u1 = 0, F = 0, within 5e-2 relative L2 at t = 0.5 on 128^2 in <= 15 min,
  // initial conditions reproduced to 1e-2.
  auto oracle_case = [&](int id, const char* name, OperatorForm form) {
    try {
      auto t0 = std::chrono::steady_clock::now();
      auto ca = std::make_shared<CoefficientMatrix>(
          gen_rough_coeffs(2, 128, 2.0, 0.2, 9));
      HalfWaveConfig cfg;
      cfg.dt = 1.0 / 32;
      cfg.picard_K = 4;
      HalfWaveOperator op(d128, ca, form, cfg);
      RealField u0 = random_band_limited(2, 128, 17, 24, 99);
      RealField u1(2, 128);
      WaveSolution sol = second_order_solve(op, u0, u1, nullptr, 0.5);
      ReferenceSolution ref =
          timestep_solve(op.L(), u0, u1, {}, 0.5, 2, 0.1);
      double final_err = rel_l2_error(sol.u.back(), ref.u.back());
      double ic_err = rel_l2_error(sol.u.front(), u0);
      // u1 = 0: compare against the natural velocity scale || |D| u0 ||.
      double vel_scale = 0;
      {
        auto spec = u0.spectrum();
        for (std::size_t m = 0; m < spec.size(); ++m) {
          Vec z(fft_freq(static_cast<int>(m) / 128, 128),
                fft_freq(static_cast<int>(m) % 128, 128));
          vel_scale += z.dot(z) * std::norm(spec[m]);
        }
        vel_scale = std::sqrt(vel_scale / spec.size());
      }
      double ic_vel = sol.ut.front().l2_norm() / vel_scale;
      double el = seconds_since(t0);
      bool ok = final_err <= 5e-2 && ic_err <= 1e-2 && ic_vel <= 1e-2 &&
                el <= 900;
      report(id, name, ok,
             fmt("final err %.3f, u(0) err %.2e, ut(0)/scale %.2e, %.0f s",
                 final_err, ic_err, ic_vel, el));
    } catch (const std::exception& e) {
      report(id, name, false, e.what());
    }
  };
  oracle_case(11, "oracle equivalence (div)", OperatorForm::divergence);
  oracle_case(12, "oracle parity (standard)", OperatorForm::standard);

  // C13: WW* kernel against the N=2 off-singularity envelope: bounded ratio,
  // stable within +-20% from grid 64 to 128, 200 sampled pairs.
  try {
    auto t0 = std::chrono::steady_clock::now();
    auto probe = [&](const PacketDictionary& dict) {
      std::mt19937_64 rng = make_rng(2024, 0xCAFE);
      std::uniform_real_distribution<double> ux(0, TWO_PI), uu(0, 1);
      std::vector<KernelPair> pairs;
      for (int i = 0; i < 200; ++i) {
        KernelPair p;
        p.x = Vec(ux(rng), ux(rng));
        p.y = Vec(ux(rng), ux(rng));
        auto draw = [&] {
          double mag = 4.0 * std::pow(4.0, uu(rng));  // within both guards
          double th = ux(rng);
          return Vec(mag * std::cos(th), mag * std::sin(th));
        };
        p.xi = draw();
        p.eta = draw();
        pairs.push_back(p);
      }
      return ww_star_kernel_probe(dict, pairs, 2).max_ratio;
    };
    double m64 = probe(d64);
    double m128 = probe(d128);
    double change = m128 / m64;
    bool ok = std::isfinite(m64) && std::isfinite(m128) && m64 > 0 &&
              change >= 0.8 && change <= 1.2;
    report(13, "kernel decay probe", ok,
           fmt("max ratio %.3g -> %.3g, change %.2fx, %.0f s", m64, m128,
               change, seconds_since(t0)));
  } catch (const std::exception& e) {
    report(13, "kernel decay probe", false, e.what());
  }

  std::printf("total %.0f s, %d failure%s\n", seconds_since(wall0), failures,
              failures == 1 ? "" : "s");
  return failures ? 1 : 0;
}
