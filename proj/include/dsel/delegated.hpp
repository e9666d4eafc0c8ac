#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "dsel/errors.hpp"
#include "dsel/gauss.hpp"
#include "dsel/population.hpp"

namespace dsel {

// Agent-side screening rule: forward an applicant iff the observed ability
// signal clears tau1.
struct DelegatedPolicy {
  double tau1;

  explicit DelegatedPolicy(double tau1_in) : tau1(tau1_in) {
    detail::check_finite(tau1, "DelegatedPolicy");
  }
};

// Two-group applicant pool. Groups share the true trait distribution and may
// differ only in signal noise and signal-mean bias.
struct GroupMix {
  double lambda_a;
  PopulationParams pop_a;
  PopulationParams pop_b;

  GroupMix(double lambda_a_in, PopulationParams a, PopulationParams b)
      : lambda_a(lambda_a_in), pop_a(std::move(a)), pop_b(std::move(b)) {
    detail::check_finite(lambda_a, "GroupMix");
    if (!(lambda_a > 0.0) || !(lambda_a < 1.0)) {
      throw std::domain_error("GroupMix: lambda_a must lie strictly in (0, 1)");
    }
    if (pop_a.sigma_f != pop_b.sigma_f || pop_a.sigma_s != pop_b.sigma_s) {
      throw std::domain_error(
          "GroupMix: groups must share the true trait distribution");
    }
  }
};

namespace detail {

// P[s_tilde >= tau1] for one group; s_tilde ~ N(-beta, sigma_s_tilde^2).
inline double signal_tail(const PopulationParams& pop, double tau1) {
  return cdf_c((tau1 + pop.beta) / pop.sigma_s_tilde());
}

inline constexpr double kMinMixTail = 1e-300;

}  // namespace detail

// Expected quality of one hire under delegated screening at tau1:
// (1-alpha) * (sigma_s^2 / sigma_s_tilde) * hazard((tau1 + beta) / sigma_s_tilde).
// The alpha*f term of quality averages to zero because the agent's signal is
// independent of f.
inline double delegated_utility_per_hire(const PopulationParams& pop,
                                         const PrincipalPrefs& prefs,
                                         const DelegatedPolicy& pol) {
  const double ss = pop.sigma_s_tilde();
  return (1.0 - prefs.alpha) * (pop.sigma_s * pop.sigma_s / ss) *
         hazard((pol.tau1 + pop.beta) / ss);
}

// Probability that a random forwarded applicant belongs to group A / B.
inline std::pair<double, double> group_select_prob(const GroupMix& mix,
                                                   const DelegatedPolicy& pol) {
  const double tail_a = detail::signal_tail(mix.pop_a, pol.tau1);
  const double tail_b = detail::signal_tail(mix.pop_b, pol.tau1);
  const double tail_m =
      mix.lambda_a * tail_a + (1.0 - mix.lambda_a) * tail_b;
  if (tail_m < detail::kMinMixTail) {
    throw degenerate_threshold_error(
        "group_select_prob: pooled tail probability underflows at this tau1");
  }
  return {mix.lambda_a * tail_a / tail_m,
          (1.0 - mix.lambda_a) * tail_b / tail_m};
}

// comp_* are the hired-cohort compositions normalized by base rates, so
// comp_a = comp_b = 1 means proportional representation. e_d is the expected
// normalized disparity; e_abs_d is only available as a two-sided bound.
struct FairnessStats {
  double comp_a;
  double comp_b;
  double e_d;
  double e_abs_d_lower;
  double e_abs_d_upper;
};

inline FairnessStats fairness_stats(const GroupMix& mix,
                                    const DelegatedPolicy& pol) {
  const double tail_a = detail::signal_tail(mix.pop_a, pol.tau1);
  const double tail_b = detail::signal_tail(mix.pop_b, pol.tau1);
  const double tail_m =
      mix.lambda_a * tail_a + (1.0 - mix.lambda_a) * tail_b;
  if (tail_m < detail::kMinMixTail) {
    throw degenerate_threshold_error(
        "fairness_stats: pooled tail probability underflows at this tau1");
  }
  FairnessStats out{};
  out.comp_a = tail_a / tail_m;
  out.comp_b = tail_b / tail_m;
  out.e_d = (tail_a - tail_b) / tail_m;
  out.e_abs_d_lower = std::fabs(out.e_d);
  out.e_abs_d_upper = (tail_a + tail_b) / tail_m;
  return out;
}

// Sign of the expected disparity without evaluating any tail probability.
// With r = sigma_s_tilde_B / sigma_s_tilde_A, group A is over-selected iff
// (r - 1) * tau1 - (beta_b - r * beta_a) < 0. Returns +1 (A over-selected),
// -1 (B over-selected), or 0.
inline int unfairness_direction(const GroupMix& mix,
                                const DelegatedPolicy& pol) {
  const double r = mix.pop_b.sigma_s_tilde() / mix.pop_a.sigma_s_tilde();
  const double expr =
      (r - 1.0) * pol.tau1 - (mix.pop_b.beta - r * mix.pop_a.beta);
  if (expr < 0.0) return 1;
  if (expr > 0.0) return -1;
  return 0;
}

}  // namespace dsel
