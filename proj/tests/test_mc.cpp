#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "dsel/mc.hpp"
#include "oracle.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

dsel::McConfig small_cfg(std::uint64_t seed, std::size_t n_samples) {
  dsel::McConfig cfg;
  cfg.seed = seed;
  cfg.n_samples = n_samples;
  return cfg;
}

bool same_estimate(const dsel::McEstimate& a, const dsel::McEstimate& b) {
  return a.mean == b.mean && a.std_error == b.std_error &&
         a.n_effective == b.n_effective;
}

}  // namespace

TEST_CASE("normal quantile inverts the tail probability", "[mc]") {
  CHECK(dsel::detail::normal_quantile(0.5) == 0.0);

  // cdf_c(-q(p)) recovers p across twelve orders of magnitude.
  for (double p : {1e-12, 1e-9, 1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.25,
                   0.4, 0.45, 0.5}) {
    const double q = dsel::detail::normal_quantile(p);
    CHECK_THAT(dsel::cdf_c(-q), WithinRel(p, 1e-12));
  }

  // Symmetry around the median.
  for (double p : {0.01, 0.1, 0.25, 0.4, 0.45}) {
    const double lo = dsel::detail::normal_quantile(p);
    const double hi = dsel::detail::normal_quantile(1.0 - p);
    CHECK_THAT(hi, WithinRel(-lo, 1e-12));
  }

  // Known fixed points.
  CHECK_THAT(dsel::detail::normal_quantile(0.975),
             WithinAbs(1.959963984540054, 1e-12));
  CHECK_THAT(dsel::detail::normal_quantile(0.84134474606854293),
             WithinAbs(1.0, 1e-12));
}

TEST_CASE("stream rng is reproducible and stream-separated", "[mc]") {
  CHECK(dsel::detail::splitmix64(0) == 0xE220A8397B1DCDAFULL);

  dsel::StreamRng a(42, 0);
  dsel::StreamRng b(42, 0);
  dsel::StreamRng c(42, 1);
  dsel::StreamRng d(43, 0);
  bool c_differs = false;
  bool d_differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(b.uniform() == u);
    if (c.uniform() != u) c_differs = true;
    if (d.uniform() != u) d_differs = true;
  }
  CHECK(c_differs);
  CHECK(d_differs);
}

TEST_CASE("applicant draws have the configured law", "[mc]") {
  // Noiseless, unbiased: observed quality is true quality, bit for bit.
  {
    const dsel::PopulationParams pop(1.0, 1.5, 0.0, 0.0);
    const dsel::PrincipalPrefs prefs(0.35, 0.1, 1.0);
    dsel::StreamRng rng(7, 0);
    for (int i = 0; i < 1000; ++i) {
      const dsel::ApplicantDraw d = dsel::sample_applicant(pop, prefs, rng);
      REQUIRE(d.t_tilde == d.t);
    }
  }

  // Moments at one million draws.
  const dsel::PopulationParams pop(1.0, 2.0, 0.5, 0.75, 0.6);
  const dsel::PrincipalPrefs prefs(0.4, 0.1, 1.0);
  const dsel::QualityScales scales = dsel::derive_scales(pop, prefs);
  dsel::StreamRng rng(123, 0);
  const std::size_t n = 1'000'000;
  double sum_t = 0.0, sum_tt = 0.0, sumsq_tt = 0.0, sum_s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const dsel::ApplicantDraw d = dsel::sample_applicant(pop, prefs, rng);
    sum_t += d.t;
    sum_tt += d.t_tilde;
    sumsq_tt += d.t_tilde * d.t_tilde;
    sum_s += d.s_tilde;
  }
  const double nn = static_cast<double>(n);
  const double mean_t = sum_t / nn;
  const double mean_tt = sum_tt / nn;
  const double sd_tt =
      std::sqrt((sumsq_tt - sum_tt * sum_tt / nn) / (nn - 1.0));
  const double mean_s = sum_s / nn;
  const double bias = dsel::quality_bias(pop, prefs);

  CHECK_THAT(mean_t, WithinAbs(0.0, 3.0 * scales.sigma_t / std::sqrt(nn)));
  CHECK_THAT(mean_tt,
             WithinAbs(-bias, 3.0 * scales.sigma_t_tilde / std::sqrt(nn)));
  CHECK_THAT(mean_s,
             WithinAbs(-0.6, 3.0 * pop.sigma_s_tilde() / std::sqrt(nn)));
  CHECK_THAT(sd_tt, WithinAbs(scales.sigma_t_tilde,
                              3.0 * scales.sigma_t_tilde / std::sqrt(2.0 * nn)));
}

TEST_CASE("delegated estimator conditions correctly", "[mc]") {
  const dsel::PopulationParams pop(1.0, 1.5, 0.0, 0.5);
  const dsel::PrincipalPrefs prefs(0.5, 0.1, 1.0);

  // A vacuous screen accepts everybody and the unconditional mean is zero.
  {
    const dsel::McEstimate est = dsel::estimate_delegated(
        pop, prefs, dsel::DelegatedPolicy(-40.0 * pop.sigma_s_tilde()),
        small_cfg(11, 500'000));
    REQUIRE(est.n_effective == 500'000);
    CHECK_THAT(est.mean, WithinAbs(0.0, 3.0 * est.std_error));
  }

  // alpha = 1: the screen keys on a signal orthogonal to what the principal
  // values, so conditioning moves nothing.
  {
    const dsel::PrincipalPrefs pure(1.0, 0.1, 1.0);
    const dsel::McEstimate est =
        dsel::estimate_delegated(pop, pure, dsel::DelegatedPolicy(1.0),
                                 small_cfg(12, 500'000));
    CHECK_THAT(est.mean, WithinAbs(0.0, 3.0 * est.std_error));
  }
}

TEST_CASE("delegated estimator is deterministic", "[mc]") {
  const dsel::PopulationParams pop(1.0, 1.5, 0.3, 0.5, 0.4);
  const dsel::PrincipalPrefs prefs(0.45, 0.1, 1.0);
  const dsel::DelegatedPolicy pol(0.8);
  const dsel::McConfig cfg = small_cfg(2024, 400'000);

  const dsel::McEstimate first = dsel::estimate_delegated(pop, prefs, pol, cfg);
  const dsel::McEstimate again = dsel::estimate_delegated(pop, prefs, pol, cfg);
  const dsel::McEstimate one = dsel::estimate_delegated(pop, prefs, pol, cfg, 1);
  const dsel::McEstimate three =
      dsel::estimate_delegated(pop, prefs, pol, cfg, 3);
  CHECK(same_estimate(first, again));
  CHECK(same_estimate(first, one));
  CHECK(same_estimate(first, three));

  const dsel::McEstimate other =
      dsel::estimate_delegated(pop, prefs, pol, small_cfg(2025, 400'000));
  CHECK(other.mean != first.mean);
}

TEST_CASE("delegated estimator guards its conditioning", "[mc]") {
  const dsel::PopulationParams pop(1.0, 1.0, 0.0, 0.0);
  const dsel::PrincipalPrefs prefs(0.5, 0.1, 1.0);

  // Tail below 1e-4.
  CHECK_THROWS_AS(
      dsel::estimate_delegated(pop, prefs, dsel::DelegatedPolicy(10.0),
                               small_cfg(1, 100'000)),
      dsel::insufficient_conditioning_error);

  // Too few accepted draws even though the tail is healthy.
  CHECK_THROWS_AS(
      dsel::estimate_delegated(pop, prefs, dsel::DelegatedPolicy(0.84),
                               small_cfg(1, 200)),
      dsel::insufficient_conditioning_error);

  CHECK_THROWS_AS(
      dsel::estimate_delegated(pop, prefs, dsel::DelegatedPolicy(0.0),
                               small_cfg(1, 0)),
      std::invalid_argument);
}

TEST_CASE("direct estimator matches its closed forms", "[mc]") {
  // Everybody passes: the pass indicator is constant one.
  {
    const dsel::PopulationParams pop(1.0, 1.5, 0.2, 0.2);
    const dsel::PrincipalPrefs prefs(0.5, 0.1, 1.0);
    const double tau = -40.0 * dsel::derive_scales(pop, prefs).sigma_t_tilde;
    const dsel::DirectEstimate est =
        dsel::estimate_direct(pop, prefs, tau, small_cfg(5, 300'000));
    CHECK(est.accept_prob.mean == 1.0);
    CHECK(est.accept_prob.std_error == 0.0);
    REQUIRE(est.quality.n_effective == 300'000);
    CHECK_THAT(est.quality.mean, WithinAbs(0.0, 3.0 * est.quality.std_error));
  }

  // Noiseless screen at zero: mean of the upper half-normal.
  {
    const dsel::PopulationParams pop(1.0, 1.5, 0.0, 0.0);
    const dsel::PrincipalPrefs prefs(0.5, 0.1, 1.0);
    const double sigma_t = dsel::derive_scales(pop, prefs).sigma_t;
    const dsel::DirectEstimate est =
        dsel::estimate_direct(pop, prefs, 0.0, small_cfg(6, 1'000'000));
    CHECK_THAT(est.quality.mean,
               WithinAbs(dsel::truncated_mean(0.0, sigma_t, 0.0),
                         3.0 * est.quality.std_error));
    CHECK_THAT(est.accept_prob.mean,
               WithinAbs(0.5, 3.0 * est.accept_prob.std_error));
  }

  // Determinism across runs and thread counts.
  {
    const dsel::PopulationParams pop(1.0, 1.5, 0.3, 0.4, 0.2);
    const dsel::PrincipalPrefs prefs(0.35, 0.05, 1.0);
    const dsel::McConfig cfg = small_cfg(77, 400'000);
    const dsel::DirectEstimate a = dsel::estimate_direct(pop, prefs, 0.7, cfg);
    const dsel::DirectEstimate b = dsel::estimate_direct(pop, prefs, 0.7, cfg);
    const dsel::DirectEstimate c =
        dsel::estimate_direct(pop, prefs, 0.7, cfg, 1);
    const dsel::DirectEstimate d =
        dsel::estimate_direct(pop, prefs, 0.7, cfg, 3);
    CHECK(same_estimate(a.quality, b.quality));
    CHECK(same_estimate(a.quality, c.quality));
    CHECK(same_estimate(a.quality, d.quality));
    CHECK(same_estimate(a.accept_prob, d.accept_prob));
  }

  // Guard: pass probability below 1e-4.
  {
    const dsel::PopulationParams pop(1.0, 1.0, 0.0, 0.0);
    const dsel::PrincipalPrefs prefs(0.5, 0.1, 1.0);
    CHECK_THROWS_AS(
        dsel::estimate_direct(pop, prefs, 10.0, small_cfg(1, 100'000)),
        dsel::insufficient_conditioning_error);
  }
}

TEST_CASE("fairness simulation matches the closed-form disparity", "[mc]") {
  const dsel::PopulationParams pop_a(1.0, 1.0, 0.0, 0.3, 0.0, "a");
  const dsel::PopulationParams pop_b(1.0, 1.0, 0.0, 0.3, 1.0, "b");
  const dsel::GroupMix mix(0.65, pop_a, pop_b);
  const dsel::DelegatedPolicy pol(0.5);

  dsel::McConfig cfg;
  cfg.seed = 314;
  cfg.n_trials = 3000;
  cfg.k_hires = 100;

  const dsel::FairnessEstimate est = dsel::estimate_fairness(mix, pol, cfg);
  const dsel::FairnessStats closed = dsel::fairness_stats(mix, pol);

  REQUIRE(est.e_d.n_effective == 3000);
  CHECK_THAT(est.e_d.mean, WithinAbs(closed.e_d, 3.0 * est.e_d.std_error));
  CHECK(est.e_abs_d.mean >=
        closed.e_abs_d_lower - 3.0 * est.e_abs_d.std_error);
  CHECK(est.e_abs_d.mean <=
        closed.e_abs_d_upper + 3.0 * est.e_abs_d.std_error);
}

TEST_CASE("fairness simulation of identical groups centers on zero", "[mc]") {
  const dsel::PopulationParams pop(1.0, 1.0, 0.0, 0.4);
  const dsel::GroupMix mix(0.5, pop, pop);
  dsel::McConfig cfg;
  cfg.seed = 99;
  cfg.n_trials = 2000;
  cfg.k_hires = 50;

  const dsel::FairnessEstimate est =
      dsel::estimate_fairness(mix, dsel::DelegatedPolicy(1.0), cfg);
  CHECK_THAT(est.e_d.mean, WithinAbs(0.0, 3.0 * est.e_d.std_error));
}

TEST_CASE("fairness simulation is deterministic", "[mc]") {
  const dsel::PopulationParams pop_a(1.0, 1.0, 0.0, 0.2, 0.0, "a");
  const dsel::PopulationParams pop_b(1.0, 1.0, 0.0, 0.9, 0.0, "b");
  const dsel::GroupMix mix(0.5, pop_a, pop_b);
  dsel::McConfig cfg;
  cfg.seed = 4096;
  cfg.n_trials = 256;
  cfg.k_hires = 40;

  const dsel::FairnessEstimate a =
      dsel::estimate_fairness(mix, dsel::DelegatedPolicy(0.8), cfg);
  const dsel::FairnessEstimate b =
      dsel::estimate_fairness(mix, dsel::DelegatedPolicy(0.8), cfg);
  const dsel::FairnessEstimate c =
      dsel::estimate_fairness(mix, dsel::DelegatedPolicy(0.8), cfg, 1);
  const dsel::FairnessEstimate d =
      dsel::estimate_fairness(mix, dsel::DelegatedPolicy(0.8), cfg, 3);
  CHECK(same_estimate(a.e_d, b.e_d));
  CHECK(same_estimate(a.e_d, c.e_d));
  CHECK(same_estimate(a.e_d, d.e_d));
  CHECK(same_estimate(a.e_abs_d, d.e_abs_d));

  cfg.seed = 4097;
  const dsel::FairnessEstimate e =
      dsel::estimate_fairness(mix, dsel::DelegatedPolicy(0.8), cfg);
  CHECK(e.e_d.mean != a.e_d.mean);
}

TEST_CASE("fairness simulation guards degenerate configurations", "[mc]") {
  const dsel::PopulationParams pop(1.0, 1.0, 0.0, 0.0);
  const dsel::GroupMix mix(0.5, pop, pop);
  dsel::McConfig cfg;
  cfg.n_trials = 100;
  cfg.k_hires = 10;

  CHECK_THROWS_AS(
      dsel::estimate_fairness(mix, dsel::DelegatedPolicy(10.0), cfg),
      dsel::insufficient_conditioning_error);

  cfg.n_trials = 0;
  CHECK_THROWS_AS(dsel::estimate_fairness(mix, dsel::DelegatedPolicy(0.5), cfg),
                  std::invalid_argument);
  cfg.n_trials = 100;
  cfg.k_hires = 0;
  CHECK_THROWS_AS(dsel::estimate_fairness(mix, dsel::DelegatedPolicy(0.5), cfg),
                  std::invalid_argument);
}
