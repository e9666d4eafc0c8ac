#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dsel/population.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("derive_scales closed cases", "[population]") {
  // Pure-ability weighting ignores sigma_f.
  for (double sf : {0.3, 1.0, 7.0}) {
    const dsel::QualityScales s = dsel::derive_scales(
        dsel::PopulationParams(sf, 2.0, 0.0, 0.0), dsel::PrincipalPrefs(0.0, 0.1, 1.0));
    CHECK(s.sigma_t == 2.0);
    CHECK(s.sigma_t_tilde == 2.0);
  }

  const dsel::PopulationParams pop(1.0, 1.5, 0.5, 0.5);
  const dsel::QualityScales s =
      dsel::derive_scales(pop, dsel::PrincipalPrefs(0.5, 0.1, 1.0));
  CHECK_THAT(s.sigma_t, WithinRel(std::sqrt(0.25 + 0.5625), 1e-15));
  CHECK_THAT(s.sigma_t_tilde,
             WithinRel(std::sqrt(0.25 * 1.25 + 0.25 * 2.5), 1e-15));
}

TEST_CASE("signal-SD parameterization inverts the noise decomposition",
          "[population]") {
  const dsel::PopulationParams pop =
      dsel::PopulationParams::from_signal_sds(1.0, 2.0, 1.12, 2.06);
  CHECK_THAT(pop.sigma_f_tilde(), WithinRel(1.12, 1e-12));
  CHECK_THAT(pop.sigma_s_tilde(), WithinRel(2.06, 1e-12));
  CHECK(pop.sigma_ef > 0.0);
  CHECK(pop.sigma_es > 0.0);

  CHECK_THROWS_AS(dsel::PopulationParams::from_signal_sds(1.0, 2.0, 0.9, 2.06),
                  std::domain_error);
  CHECK_THROWS_AS(dsel::PopulationParams::from_signal_sds(1.0, 2.0, 1.12, 1.9),
                  std::domain_error);
}

TEST_CASE("quality_bias is the ability-weighted mean shift", "[population]") {
  const dsel::PopulationParams unbiased(1.0, 1.0, 0.0, 0.0, 0.0);
  CHECK(dsel::quality_bias(unbiased, dsel::PrincipalPrefs(0.3, 0.1, 1.0)) ==
        0.0);

  const dsel::PopulationParams biased(1.0, 1.0, 0.0, 0.0, 5.0);
  CHECK(dsel::quality_bias(biased, dsel::PrincipalPrefs(1.0, 0.1, 1.0)) == 0.0);

  const dsel::PopulationParams biased1(1.0, 1.0, 0.0, 0.0, 1.0);
  CHECK(dsel::quality_bias(biased1, dsel::PrincipalPrefs(0.5, 0.1, 1.0)) ==
        0.5);
}

TEST_CASE("quality_bias is nonincreasing in alpha", "[population]") {
  const dsel::PopulationParams pop(1.0, 1.0, 0.0, 0.0, 0.8);
  double prev = dsel::quality_bias(pop, dsel::PrincipalPrefs(0.0, 0.1, 1.0));
  for (int i = 1; i <= 100; ++i) {
    const double cur =
        dsel::quality_bias(pop, dsel::PrincipalPrefs(i / 100.0, 0.1, 1.0));
    REQUIRE(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("sigma_t is convex in alpha with an interior minimum",
          "[population]") {
  const dsel::PopulationParams pop(1.0, 1.5, 0.0, 0.0);
  double v[101];
  for (int i = 0; i <= 100; ++i) {
    v[i] = dsel::derive_scales(pop, dsel::PrincipalPrefs(i / 100.0, 0.1, 1.0))
               .sigma_t;
  }
  int argmin = 0;
  for (int i = 1; i <= 100; ++i) {
    if (v[i] < v[argmin]) argmin = i;
  }
  CHECK(argmin > 0);
  CHECK(argmin < 100);
  // Convexity: second differences nonnegative up to rounding.
  for (int i = 1; i < 100; ++i) {
    REQUIRE(v[i - 1] - 2.0 * v[i] + v[i + 1] >= -1e-12);
  }
  // Analytic minimizer alpha* = sigma_s^2 / (sigma_f^2 + sigma_s^2), found
  // within half a grid step.
  CHECK_THAT(0.01 * argmin, WithinAbs(2.25 / 3.25, 0.005 + 1e-12));
}

TEST_CASE("noiseless signals collapse the observed scale", "[population]") {
  const dsel::PopulationParams pop(0.7, 2.2, 0.0, 0.0);
  for (int i = 0; i <= 10; ++i) {
    const dsel::QualityScales s =
        dsel::derive_scales(pop, dsel::PrincipalPrefs(i / 10.0, 0.1, 1.0));
    REQUIRE(s.sigma_t_tilde == s.sigma_t);
  }
}

TEST_CASE("parameter validation", "[population]") {
  CHECK_THROWS_AS(dsel::PopulationParams(0.0, 1.0, 0.0, 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(dsel::PopulationParams(1.0, -1.0, 0.0, 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(dsel::PopulationParams(1.0, 1.0, -0.1, 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(dsel::PopulationParams(1.0, 1.0, 0.0, 0.0, -0.5),
                  std::domain_error);

  CHECK_THROWS_AS(dsel::PrincipalPrefs(-0.1, 0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(dsel::PrincipalPrefs(1.1, 0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(dsel::PrincipalPrefs(0.5, -0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(dsel::PrincipalPrefs(0.5, 0.1, 0.0), std::domain_error);

  CHECK_THROWS_AS(dsel::QualityScales(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(dsel::QualityScales(1.0, 0.9), std::domain_error);
  CHECK_NOTHROW(dsel::QualityScales(1.0, 1.0));
}
