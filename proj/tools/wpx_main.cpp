// wpx: configuration-driven front end for the phase-space wave toolkit.
// Commands: transform, norm, solve, diagnose, compare.
// Exit codes: 0 ok, 1 configuration, 2 I/O, 3 numeric tolerance.
#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "wpx/flow.hpp"
#include "wpx/parametrix.hpp"
#include "wpx/reference.hpp"
#include "wpx/runconfig.hpp"
#include "wpx/tent.hpp"

namespace {

constexpr const char* kVersion = "wpx 1.0.0";

using namespace wpx;

std::ofstream open_csv(const std::filesystem::path& path,
                       const ExperimentConfig& cfg, const char* header) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, cfg.hash);
  out << "# " << kVersion << " config_hash=" << buf << "\n";
  out << header << "\n";
  out.precision(17);
  return out;
}

// Phase-field payload: "WPPF", n, N, slice count, then low + slices as
// interleaved doubles. The dictionary is rebuilt from the config on load.
void save_phase(const PhaseField& F, const ExperimentConfig& cfg,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out.write("WPPF", 4);
  std::uint64_t hdr[4] = {static_cast<std::uint64_t>(F.n),
                          static_cast<std::uint64_t>(F.grid_size),
                          F.slices.size(), cfg.hash};
  out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  auto dump = [&](const std::vector<cd>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(cd)));
  };
  dump(F.low);
  for (const auto& s : F.slices) dump(s);
  if (!out) throw io_error("short write: " + path);
}

PhaseField load_phase(const PacketDictionary& dict, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  char magic[4];
  std::uint64_t hdr[4];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  if (!in || std::string(magic, 4) != "WPPF")
    throw io_error("not a phase-field file: " + path);
  PhaseField F(dict);
  if (hdr[0] != static_cast<std::uint64_t>(F.n) ||
      hdr[1] != static_cast<std::uint64_t>(F.grid_size) ||
      hdr[2] != F.slices.size())
    throw config_error("phase-field file does not match the config: " + path);
  auto slurp = [&](std::vector<cd>& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(cd)));
  };
  slurp(F.low);
  for (auto& s : F.slices) slurp(s);
  if (!in) throw io_error("short read: " + path);
  return F;
}

RealField default_input(const ExperimentConfig& cfg) {
  int guard = guard_band(cfg.grid_size);
  return random_band_limited(cfg.n, cfg.grid_size, 2.0, guard / 2.0,
                             cfg.seed, 0xA0);
}

std::shared_ptr<SqrtSymbol> make_b(const ExperimentConfig& cfg) {
  auto a = make_coefficients(cfg);
  return std::make_shared<SqrtSymbol>(
      make_metric_symbol(std::move(a), MetricMode::sharp), cfg.chi_cutoff);
}

int cmd_transform(const ExperimentConfig& cfg, const std::string& input,
                  const std::filesystem::path& out) {
  PacketDictionary dict = make_dictionary(cfg);
  RealField f = load_field(input);
  if (f.n != cfg.n || f.grid_size != cfg.grid_size)
    throw config_error("input field does not match the config grid");
  PhaseField F = analyze(f, dict);
  save_phase(F, cfg, (out / "phase.bin").string());
  double fl2 = f.l2_norm(), wl2 = F.weighted_l2();
  double iso = fl2 > 0 ? std::abs(wl2 * wl2 / (fl2 * fl2) - 1.0) : 0.0;
  double rt = 0;
  if (cfg.roundtrip) rt = rel_l2_error(synthesize(F), f);
  auto csv = open_csv(out / "transform.csv", cfg,
                      "packets,eps_frame,field_l2,weighted_l2,isometry_dev,"
                      "roundtrip_rel_error");
  csv << dict.packets() << ',' << dict.eps_frame << ',' << fl2 << ',' << wl2
      << ',' << iso << ',' << rt << "\n";
  return EXIT_OK;
}

int cmd_norm(const ExperimentConfig& cfg, const std::string& input,
             const std::filesystem::path& out) {
  PacketDictionary dict = make_dictionary(cfg);
  PhaseField F = load_phase(dict, input);
  BallVolumeTable vols = build_ball_table(cfg.n, 8, 2, 200000, cfg.seed);
  std::vector<NormRequest> reqs = cfg.norms;
  std::sort(reqs.begin(), reqs.end(), [](const NormRequest& a,
                                         const NormRequest& b) {
    return a.p != b.p ? a.p < b.p : a.s < b.s;
  });
  reqs.erase(std::unique(reqs.begin(), reqs.end(),
                         [](const NormRequest& a, const NormRequest& b) {
                           return a.p == b.p && a.s == b.s;
                         }),
             reqs.end());
  auto csv = open_csv(out / "norms.csv", cfg,
                      "p,s,value,s_of_p,eval_points,coverage");
  for (const NormRequest& r : reqs) {
    TentNormReport rep = tent_norm(F, vols, r.p, r.s);
    csv << r.p << ',' << r.s << ',' << rep.value << ',' << rep.s_of_p << ','
        << rep.eval_points << ',' << rep.warnings.coverage << "\n";
  }
  return EXIT_OK;
}

WaveSolution run_parametrix(const ExperimentConfig& cfg,
                            const PacketDictionary& dict,
                            const RealField& u0) {
  HalfWaveConfig hw;
  hw.chi_cutoff = cfg.chi_cutoff;
  hw.shift_c = cfg.shift_c;
  hw.dt = cfg.solver_dt;
  hw.picard_K = cfg.picard_K;
  hw.seed = cfg.seed;
  HalfWaveOperator op(dict, make_coefficients(cfg), parse_form(cfg.form), hw);
  RealField u1(cfg.n, cfg.grid_size);
  WaveSolution sol =
      second_order_solve(op, u0, u1, nullptr, cfg.t_final, cfg.picard_K);
  sol.config_hash = cfg.hash;
  return sol;
}

ReferenceSolution run_reference(const ExperimentConfig& cfg,
                                const RealField& u0, int nout) {
  WaveOperator L =
      build_operator(make_coefficients(cfg), parse_form(cfg.form));
  RealField u1(cfg.n, cfg.grid_size);
  if (cfg.scheme == "rk4")
    return rk4_solve(L, u0, u1, nullptr, cfg.t_final, nout, cfg.cfl);
  return timestep_solve(L, u0, u1, nullptr, cfg.t_final, nout, cfg.cfl);
}

int cmd_solve(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  RealField u0 = default_input(cfg);
  if (cfg.solver == "parametrix") {
    PacketDictionary dict = make_dictionary(cfg);
    WaveSolution sol = run_parametrix(cfg, dict, u0);
    save_field(sol.u.back(), (out / "u_final.bin").string());
    auto csv = open_csv(out / "solve.csv", cfg, "k,t,residual");
    for (std::size_t k = 0; k < sol.times.size(); ++k)
      csv << k << ',' << sol.times[k] << ',' << sol.residual[k] << "\n";
    auto lv = open_csv(out / "levels.csv", cfg, "level,norm");
    for (std::size_t j = 0; j < sol.level_norm.size(); ++j)
      lv << j << ',' << sol.level_norm[j] << "\n";
  } else {
    int nout = cfg.nout > 0
                   ? cfg.nout
                   : std::max(1, static_cast<int>(std::lround(
                                     cfg.t_final / cfg.solver_dt)));
    ReferenceSolution sol = run_reference(cfg, u0, nout);
    save_field(sol.u.back(), (out / "u_final.bin").string());
    auto csv = open_csv(out / "solve.csv", cfg,
                        "k,t,internal_steps,energy_drift");
    for (std::size_t k = 0; k < sol.times.size(); ++k)
      csv << k << ',' << sol.times[k] << ',' << sol.internal_steps << ','
          << sol.energy_drift << "\n";
  }
  return EXIT_OK;
}

int cmd_compare(const ExperimentConfig& cfg,
                const std::filesystem::path& out) {
  RealField u0 = default_input(cfg);
  PacketDictionary dict = make_dictionary(cfg);
  WaveSolution sol = run_parametrix(cfg, dict, u0);
  int nout = static_cast<int>(sol.times.size()) - 1;
  ReferenceSolution ref = run_reference(cfg, u0, nout);
  auto csv = open_csv(out / "compare.csv", cfg,
                      "k,t,rel_error,parametrix_residual,ref_energy_drift");
  for (int k = 0; k <= nout; ++k)
    csv << k << ',' << sol.times[k] << ','
        << rel_l2_error(sol.u[k], ref.u[k]) << ',' << sol.residual[k] << ','
        << ref.energy_drift << "\n";
  return EXIT_OK;
}

int cmd_diagnose(const ExperimentConfig& cfg,
                 const std::filesystem::path& out) {
  for (const std::string& d : cfg.diagnostics) {
    if (d == "flow" || d == "gronwall") {
      auto b = make_b(cfg);
      int guard = guard_band(cfg.grid_size);
      std::mt19937_64 rng = make_rng(cfg.seed, 0xD1A6);
      std::uniform_real_distribution<double> ux(0, TWO_PI), uu(0, 1);
      std::vector<PhasePoint> src;
      for (int i = 0; i < 100; ++i) {
        PhasePoint p;
        p.x = Vec(ux(rng), ux(rng));
        double mag = 8.0 * std::pow(guard / 8.0, uu(rng));
        double th = ux(rng);
        p.xi = Vec(mag * std::cos(th), mag * std::sin(th));
        src.push_back(p);
      }
      double t = std::min(cfg.t_final, 1.0);
      FlowResult fr = integrate_flow(*b, src, t, 0, true);
      if (d == "flow") {
        auto csv = open_csv(out / "flow.csv", cfg,
                            "i,drift,jacobian_defect,sigma_ratio");
        for (std::size_t i = 0; i < src.size(); ++i)
          csv << i << ',' << fr.diag[i].drift << ','
              << fr.diag[i].jacobian_defect << ','
              << fr.diag[i].sigma_ratio << "\n";
      } else {
        ExperimentConfig flat = cfg;
        flat.coeff_kind = "flat";
        auto bf = make_b(flat);
        FlowResult hr = integrate_flow(*bf, src, t);
        auto rows = gronwall_diag(fr, hr, src);
        auto csv = open_csv(out / "gronwall.csv", cfg, "i,d,sigma0,ratio");
        for (std::size_t i = 0; i < rows.size(); ++i)
          csv << i << ',' << rows[i].d << ',' << rows[i].sigma0 << ','
              << rows[i].d / rows[i].sigma0 << "\n";
      }
    } else if (d == "volume") {
      BallVolumeTable t = build_ball_table(cfg.n, 8, 2, 1000000, cfg.seed);
      auto csv = open_csv(out / "volume.csv", cfg,
                          "tau,volume,stderr,log2_slope");
      for (std::size_t i = 0; i < t.radii.size(); ++i) {
        double slope =
            i ? std::log2(t.volumes[i] / t.volumes[i - 1]) /
                    std::log2(t.radii[i] / t.radii[i - 1])
              : 0.0;
        csv << t.radii[i] << ',' << t.volumes[i] << ',' << t.stderrs[i]
            << ',' << slope << "\n";
      }
    } else if (d == "kernel") {
      PacketDictionary dict = make_dictionary(cfg);
      std::mt19937_64 rng = make_rng(cfg.seed, 0xD1A7);
      std::uniform_real_distribution<double> ux(0, TWO_PI), uu(0, 1);
      int guard = dict.guard;
      std::vector<KernelPair> pairs;
      for (int i = 0; i < 50; ++i) {
        KernelPair p;
        p.x = Vec(ux(rng), ux(rng));
        p.y = Vec(ux(rng), ux(rng));
        auto draw = [&] {
          double mag = 8.0 * std::pow(guard / 16.0, uu(rng));
          double th = ux(rng);
          return Vec(mag * std::cos(th), mag * std::sin(th));
        };
        p.xi = draw();
        p.eta = draw();
        pairs.push_back(p);
      }
      DecayReport rep = ww_star_kernel_probe(dict, pairs, 2);
      auto csv = open_csv(out / "kernel.csv", cfg,
                          "dist,upsilon,envelope,absK,ratio");
      for (const DecayRow& r : rep.rows)
        csv << r.dist << ',' << r.upsilon << ',' << r.envelope << ','
            << r.absK << ',' << r.ratio << "\n";
    } else if (d == "aperture") {
      PacketDictionary dict = make_dictionary(cfg);
      PhaseField F = analyze(default_input(cfg), dict);
      BallVolumeTable vols = build_ball_table(cfg.n, 8, 2, 200000, cfg.seed);
      ApertureReport rep = aperture_check(F, vols, 0.0, 2.0);
      auto csv = open_csv(out / "aperture.csv", cfg,
                          "alpha_half,alpha_one,alpha_two,max_ratio");
      csv << rep.norms[0] << ',' << rep.norms[1] << ',' << rep.norms[2]
          << ',' << rep.max_ratio << "\n";
    } else {
      throw config_error("unknown diagnostic \"" + d + "\"");
    }
  }
  return EXIT_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-space wave toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, input_path, out_dir = ".";
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int threads = 1;
  app.add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed_override, "override the config seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", threads, "worker threads (currently 1)");

  CLI::App* c_transform = app.add_subcommand("transform");
  c_transform->add_option("--input", input_path, "field file")->required();
  CLI::App* c_norm = app.add_subcommand("norm");
  c_norm->add_option("--input", input_path, "phase field file")->required();
  app.add_subcommand("solve");
  app.add_subcommand("diagnose");
  app.add_subcommand("compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? EXIT_OK : EXIT_CONFIG;
  }

  try {
    if (threads < 1) throw wpx::config_error("--threads must be >= 1");
    wpx::ExperimentConfig cfg = wpx::parse_config(config_path);
    if (seed_set) {
      cfg.seed = seed_override;
      cfg.hash = wpx::fnv1a(wpx::canonical_dump(cfg));
    }
    std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    if (c_transform->parsed()) return cmd_transform(cfg, input_path, out);
    if (c_norm->parsed()) return cmd_norm(cfg, input_path, out);
    if (app.get_subcommand("solve")->parsed()) return cmd_solve(cfg, out);
    if (app.get_subcommand("compare")->parsed()) return cmd_compare(cfg, out);
    return cmd_diagnose(cfg, out);
  } catch (const wpx::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return wpx::EXIT_CONFIG;
  } catch (const wpx::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return wpx::EXIT_IO;
  } catch (const wpx::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return wpx::EXIT_NUMERIC;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wpx::EXIT_NUMERIC;
  }
}
