#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wpx/transform.hpp"

using namespace wpx;

namespace {

const PacketDictionary& dict64() {
  static PacketDictionary d =
      build_dictionary(build_profiles(8192), 64, 2, 4.0, 3,
                       DictMode::renormalized);
  return d;
}

}  // namespace

TEST_CASE("W*W round-trip on band-limited fields") {
  const PacketDictionary& d = dict64();
  for (int i = 0; i < 5; ++i) {
    RealField f = random_band_limited(2, 64, 2, d.guard, 100 + i);
    RealField g = synthesize(analyze(f, d));
    CHECK(rel_l2_error(g, f) <= 1e-10);
  }
}

TEST_CASE("analyze is an isometry onto the weighted l2 norm") {
  const PacketDictionary& d = dict64();
  RealField f = random_band_limited(2, 64, 3, d.guard - 1, 7);
  PhaseField F = analyze(f, d);
  double ratio = F.weighted_l2() / f.l2_norm();
  CHECK(std::abs(ratio * ratio - 1.0) <= 1e-10);
}

TEST_CASE("analyze is linear") {
  const PacketDictionary& d = dict64();
  RealField f = random_band_limited(2, 64, 2, 15, 1);
  RealField g = random_band_limited(2, 64, 2, 15, 2);
  cd a(0.7, -0.3);
  RealField h = f;
  h *= a;
  h += g;
  PhaseField Fh = analyze(h, d);
  PhaseField Ff = analyze(f, d);
  Ff *= a;
  Ff.axpy(1.0, analyze(g, d));
  Ff.axpy(-1.0, Fh);
  CHECK(Ff.weighted_l2() < 1e-12 * Fh.weighted_l2() + 1e-14);
}

TEST_CASE("phase field algebra") {
  const PacketDictionary& d = dict64();
  PhaseField F(d);
  CHECK(F.weighted_l2() == 0.0);
  RealField f = random_band_limited(2, 64, 2, 15, 3);
  PhaseField G = analyze(f, d);
  F.axpy(2.0, G);
  F *= 0.5;
  F.axpy(-1.0, G);
  CHECK(F.weighted_l2() < 1e-14);
}

TEST_CASE("kernel probe: ratios bounded by the envelope") {
  const PacketDictionary& d = dict64();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ux(0, TWO_PI), uu(0, 1);
  std::vector<KernelPair> pairs;
  for (int i = 0; i < 40; ++i) {
    KernelPair p;
    p.x = Vec(ux(rng), ux(rng));
    p.y = Vec(ux(rng), ux(rng));
    auto draw = [&] {
      double mag = 4.0 * std::pow(4.0, uu(rng));
      double th = ux(rng);
      return Vec(mag * std::cos(th), mag * std::sin(th));
    };
    p.xi = draw();
    p.eta = draw();
    pairs.push_back(p);
  }
  DecayReport rep = ww_star_kernel_probe(d, pairs, 2);
  REQUIRE(rep.rows.size() == pairs.size());
  CHECK(rep.max_ratio > 0);
  CHECK(std::isfinite(rep.max_ratio));
  for (const DecayRow& r : rep.rows) {
    CHECK(r.envelope > 0);
    CHECK(r.upsilon <= 1.0 + 1e-12);
    CHECK(r.ratio == doctest::Approx(r.absK / r.envelope));
  }
}

TEST_CASE("synthesize of a single unit slice stays band-limited") {
  const PacketDictionary& d = dict64();
  PhaseField F(d);
  std::fill(F.slices[d.packets() / 2].begin(),
            F.slices[d.packets() / 2].end(), cd(1.0));
  RealField f = synthesize(F);
  auto spec = f.spectrum();
  for (std::size_t m = 0; m < spec.size(); ++m)
    if (d.lattice_freq(m).norm() > d.guard + 1e-9)
      CHECK(std::abs(spec[m]) < 1e-13);
}
