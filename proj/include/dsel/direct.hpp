#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dsel/delegated.hpp"
#include "dsel/errors.hpp"
#include "dsel/gauss.hpp"
#include "dsel/population.hpp"

namespace dsel {

struct SolveDiagnostics {
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

// Optimal review policy for one group. viable means reviewing is worth the
// cost at the optimum, which happens exactly when the optimal standardized
// threshold is positive. When not viable, n_rev_star and v_star are 0 and
// the principal hires nobody through review.
struct DirectPolicy {
  double tau_star = 0.0;    // threshold on observed quality
  double n_rev_star = 0.0;  // applications reviewed per k hires
  bool viable = false;
  double v_star = 0.0;      // net utility per hire at the optimum
  double z_star = 0.0;      // mean-corrected standardized threshold
  double accept_prob = 0.0; // P[review passes] for one applicant
  SolveDiagnostics diag;
};

// Net utility per hire when reviewing at threshold tau (zero-mean group):
// (sigma_t^2 / sigma_t_tilde) * hazard(z) - c_rev / cdf_c(z), z = tau / sigma_t_tilde.
inline double net_value(const QualityScales& scales,
                        const PrincipalPrefs& prefs, double tau) {
  detail::check_finite(tau, "net_value");
  const double z = tau / scales.sigma_t_tilde;
  const double tail = cdf_c(z);
  if (tail < 1e-300) {
    throw degenerate_threshold_error(
        "net_value: acceptance probability underflows at this tau");
  }
  const double a = scales.sigma_t * scales.sigma_t / scales.sigma_t_tilde;
  return a * hazard(z) - prefs.c_rev / tail;
}

// Stationarity function of the standardized threshold:
// g(z) = (sigma_t^2 / sigma_t_tilde) * (pdf(z) - z * cdf_c(z)) - c_rev.
// Strictly decreasing (g'(z) = -(sigma_t^2 / sigma_t_tilde) * cdf_c(z) < 0),
// with limits +inf and -c_rev, so it has a unique root whenever c_rev > 0.
inline double g_fn(const QualityScales& scales, const PrincipalPrefs& prefs,
                   double z) {
  detail::check_finite(z, "g_fn");
  const double a = scales.sigma_t * scales.sigma_t / scales.sigma_t_tilde;
  return a * (pdf(z) - z * cdf_c(z)) - prefs.c_rev;
}

// Solves g(z) = 0 by bisection. The bracket is anchored at z = 0 on the side
// given by the sign of g(0), so sign(z_star) always agrees with the
// viability test g(0) > 0, i.e. c_rev < sigma_t^2 / (sigma_t_tilde * sqrt(2*pi)).
inline DirectPolicy solve_threshold(const QualityScales& scales,
                                    const PrincipalPrefs& prefs) {
  if (prefs.c_rev == 0.0) {
    throw std::domain_error(
        "solve_threshold: costless review is out of model; g(z) > 0 for all "
        "finite z when c_rev = 0, so the optimal threshold is unbounded");
  }
  const double a = scales.sigma_t * scales.sigma_t / scales.sigma_t_tilde;
  const double g0 = a * kInvSqrt2Pi - prefs.c_rev;

  DirectPolicy pol;
  pol.viable = g0 > 0.0;

  double lo = 0.0;
  double hi = 0.0;
  int iters = 0;
  if (g0 != 0.0) {
    if (g0 > 0.0) {
      // Root is positive. g(40) = -c_rev in double precision, so 40 always
      // closes the bracket; the true root never exceeds ~37.6 for
      // representable c_rev.
      lo = 0.0;
      hi = 40.0;
    } else {
      hi = 0.0;
      lo = -8.0;
      int expansions = 0;
      while (g_fn(scales, prefs, lo) <= 0.0) {
        lo *= 2.0;
        if (++expansions > 60) {
          throw solver_error("solve_threshold: bracket expansion failed");
        }
      }
    }
    // Invariant: g(lo) > 0 > g(hi).
    while (hi - lo > 1e-12 && iters < 200) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;  // interval at rounding resolution
      const double gm = g_fn(scales, prefs, mid);
      if (gm > 0.0) {
        lo = mid;
      } else if (gm < 0.0) {
        hi = mid;
      } else {
        lo = hi = mid;
      }
      ++iters;
    }
    if (hi - lo > 1e-9) {
      SolveDiagnostics diag{lo, hi, g_fn(scales, prefs, 0.5 * (lo + hi)),
                            iters};
      throw solver_error("solve_threshold: bisection failed to converge on [" +
                         std::to_string(diag.bracket_lo) + ", " +
                         std::to_string(diag.bracket_hi) + "]");
    }
  }

  const double z_star = 0.5 * (lo + hi);
  pol.z_star = z_star;
  pol.tau_star = scales.sigma_t_tilde * z_star;
  pol.accept_prob = cdf_c(z_star);
  pol.diag = SolveDiagnostics{lo, hi, g_fn(scales, prefs, z_star), iters};
  if (pol.viable) {
    pol.n_rev_star = prefs.k / pol.accept_prob;
    pol.v_star = a * hazard(z_star) - prefs.c_rev / pol.accept_prob;
  }
  return pol;
}

// At the optimum the per-hire value collapses to
// (sigma_t^2 / sigma_t_tilde^2) * tau_star. Only defined for viable policies
// of a zero-mean group (a biased group's tau_star carries the mean shift).
inline double per_hire_utility_identity(const DirectPolicy& pol,
                                        const QualityScales& scales) {
  if (!pol.viable) {
    throw std::logic_error(
        "per_hire_utility_identity: policy is not viable");
  }
  return (scales.sigma_t * scales.sigma_t) /
         (scales.sigma_t_tilde * scales.sigma_t_tilde) * pol.tau_star;
}

// Group-aware optimum. The group's mean shift moves the threshold by
// -(1-alpha)*beta and changes nothing else: z_star, accept_prob, n_rev_star
// and v_star are those of the zero-mean problem with the same scales.
inline DirectPolicy solve_group(const PopulationParams& pop,
                                const PrincipalPrefs& prefs) {
  const QualityScales scales = derive_scales(pop, prefs);
  DirectPolicy pol = solve_threshold(scales, prefs);
  const double bias = quality_bias(pop, prefs);
  if (bias != 0.0) {
    pol.tau_star -= bias;
  }
  return pol;
}

struct JointAllocation {
  double r_a = 0.0;  // review slots (in hires) routed to group A
  double r_b = 0.0;
  DirectPolicy policy_a;
  DirectPolicy policy_b;
};

// Allocates k hires across groups. Per-hire optimal values do not depend on
// the allocation, so the principal sends everything to the strictly better
// group; exact or near ties (relative 1e-9) fall back to a split
// proportional to group shares, which keeps demographic parity.
inline JointAllocation joint_allocate(const GroupMix& mix,
                                      const PrincipalPrefs& prefs) {
  JointAllocation out;
  out.policy_a = solve_group(mix.pop_a, prefs);
  out.policy_b = solve_group(mix.pop_b, prefs);
  if (!out.policy_a.viable && !out.policy_b.viable) {
    return out;
  }
  const double va = out.policy_a.v_star;
  const double vb = out.policy_b.v_star;
  const double tie_tol = 1e-9 * std::max(std::fabs(va), std::fabs(vb));
  if (std::fabs(va - vb) <= tie_tol) {
    out.r_a = mix.lambda_a * prefs.k;
    out.r_b = (1.0 - mix.lambda_a) * prefs.k;
  } else if (va > vb) {
    out.r_a = prefs.k;
  } else {
    out.r_b = prefs.k;
  }
  return out;
}

}  // namespace dsel
