#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "wpx/packets.hpp"

using namespace wpx;

namespace {

PacketDictionary small_dict(DictMode mode) {
  return build_dictionary(build_profiles(8192), 64, 2, 4.0, 3, mode);
}

}  // namespace

TEST_CASE("renormalized partition function is exactly 1 on the band") {
  PacketDictionary d = small_dict(DictMode::renormalized);
  CHECK(d.eps_frame <= 1e-12);
  int N = d.grid_size;
  for (std::size_t m = 0; m < d.Q.size(); ++m) {
    Vec z = d.lattice_freq(m);
    if (z.norm() <= d.guard) CHECK(std::abs(d.Q[m] - 1.0) <= 1e-12);
  }
  (void)N;
}

TEST_CASE("raw partition deviation is small but nonzero") {
  PacketDictionary d = small_dict(DictMode::raw);
  CHECK(d.eps_frame > 1e-12);
  CHECK(d.eps_frame < 1.0);
}

TEST_CASE("ring geometry: radii, stagger, direction counts") {
  PacketDictionary d = small_dict(DictMode::renormalized);
  CHECK(!d.rings.empty());
  for (const Ring& r : d.rings) {
    CHECK(r.mag ==
          doctest::Approx(std::pow(2.0, r.j + (r.l + 0.5) / d.radial_nodes)));
    CHECK(r.offset == ((r.j % 2) ? 0.5 : 0.25));
    // parabolic scaling: ndir ~ C_ang * 2^{j/2}, within a factor of 2
    double want = d.C_ang * std::pow(2.0, r.j / 2.0);
    CHECK(r.ndir >= want / 2);
    CHECK(r.ndir <= want * 2 + 1);
    CHECK(r.cnorm > 0);
  }
}

TEST_CASE("packet slices are band-limited to the guard") {
  PacketDictionary d = small_dict(DictMode::renormalized);
  for (const SparseSlice& s : d.psi)
    for (std::uint32_t idx : s.idx)
      CHECK(d.lattice_freq(idx).norm() <= d.guard + 1e-9);
}

TEST_CASE("low-band multiplier matches the radial profile") {
  PacketDictionary d = small_dict(DictMode::raw);
  CHECK(d.q_radial(0.0) > 0);
  CHECK(d.q_eval(Vec(0.0, 0.0)) == doctest::Approx(d.q_radial(0.0)));
  CHECK(d.q_radial(100.0) == 0.0);
}

TEST_CASE("grid too small is rejected") {
  CHECK_THROWS_AS(build_dictionary(build_profiles(4096), 16, 2, 4.0, 3,
                                   DictMode::renormalized),
                  config_error);
}

TEST_CASE("save/load round-trips bit-exactly") {
  PacketDictionary d = small_dict(DictMode::renormalized);
  std::string path = "dict_test.bin";
  save_dictionary(d, path);
  PacketDictionary e = load_dictionary(path);
  REQUIRE(e.packets() == d.packets());
  CHECK(e.eps_frame == d.eps_frame);
  for (std::size_t i = 0; i < d.psi.size(); ++i) {
    REQUIRE(e.psi[i].idx == d.psi[i].idx);
    REQUIRE(e.psi[i].val == d.psi[i].val);
  }
  CHECK(e.Q == d.Q);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}
