#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wpx/profiles.hpp"

using namespace wpx;

TEST_CASE("smoothstep endpoints, monotonicity, derivative") {
  CHECK(smoothstep(-0.5) == 0.0);
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(2.0) == 1.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5));
  double prev = 0;
  for (int i = 0; i <= 100; ++i) {
    double v = smoothstep(i / 100.0);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  for (double t : {0.1, 0.3, 0.5, 0.77, 0.9}) {
    double h = 1e-6;
    double fd = (smoothstep(t + h) - smoothstep(t - h)) / (2 * h);
    CHECK(smoothstep_deriv(t) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("plateau is 1 on [0,1/2] and 0 beyond 1") {
  CHECK(plateau(0.0) == 1.0);
  CHECK(plateau(0.5) == 1.0);
  CHECK(plateau(1.0) == 0.0);
  CHECK(plateau(3.0) == 0.0);
  CHECK(plateau(0.75) > 0.0);
  CHECK(plateau(0.75) < 1.0);
  for (double u : {0.55, 0.6, 0.8, 0.95}) {
    double h = 1e-6;
    double fd = (plateau(u + h) - plateau(u - h)) / (2 * h);
    CHECK(plateau_deriv(u) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("profile tables match closed forms and Calderon normalization") {
  RadialProfiles p = build_profiles(4096);
  // phi = plateau of |zeta|; Psi supported in [1/2, 2]
  CHECK(p.phi(0.3) == doctest::Approx(1.0));
  CHECK(p.phi(1.2) == doctest::Approx(0.0));
  CHECK(p.Psi(0.25) == doctest::Approx(0.0));
  CHECK(p.Psi(2.5) == doctest::Approx(0.0));
  // int_0^inf Psi(s)^2 ds/s = 1 (Calderon); midpoint rule on log grid
  int M = 20000;
  double lo = std::log(0.25), hi = std::log(4.0), sum = 0;
  for (int i = 0; i < M; ++i) {
    double s = std::exp(lo + (hi - lo) * (i + 0.5) / M);
    double v = p.Psi(s);
    sum += v * v * (hi - lo) / M;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("table below minimum resolution is rejected") {
  CHECK_THROWS_AS(build_profiles(64), config_error);
}
