#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsel {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)
inline constexpr double kSqrt2 = 1.4142135623730950488;

namespace detail {

inline void check_finite(double x, const char* where) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(where) + ": non-finite argument");
  }
}

}  // namespace detail

// Standard normal density.
inline double pdf(double z) {
  detail::check_finite(z, "pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// Upper tail P[Z >= z]. Routed through erfc so deep tails keep full relative
// precision; 1 - Phi(z) would cancel to zero around z = 8.
inline double cdf_c(double z) {
  detail::check_finite(z, "cdf_c");
  return 0.5 * std::erfc(z / kSqrt2);
}

// Hazard rate pdf(z) / cdf_c(z), i.e. the mean of a standard normal
// truncated below at z. Past z = 30 numerator and denominator are both
// subnormal-bound, so the ratio switches to the asymptotic expansion
// z + 1/z - 2/z^3, accurate to ~1e-7 relative there and improving with z.
inline double hazard(double z) {
  detail::check_finite(z, "hazard");
  if (z > 30.0) {
    return z + 1.0 / z - 2.0 / (z * z * z);
  }
  return pdf(z) / cdf_c(z);
}

// Mean of N(mu, sigma^2) conditioned on exceeding a.
inline double truncated_mean(double mu, double sigma, double a) {
  detail::check_finite(mu, "truncated_mean");
  detail::check_finite(sigma, "truncated_mean");
  detail::check_finite(a, "truncated_mean");
  if (!(sigma > 0.0)) {
    throw std::domain_error("truncated_mean: sigma must be positive");
  }
  return mu + sigma * hazard((a - mu) / sigma);
}

// Shrinkage factor sigma_true^2 / sigma_obs^2. Maps a threshold exceedance
// on a noisy observation to the conditional mean of the latent variable:
// E[x | x + e >= a] scales the observed truncated mean by this factor.
inline double posterior_scale(double sigma_true, double sigma_obs) {
  detail::check_finite(sigma_true, "posterior_scale");
  detail::check_finite(sigma_obs, "posterior_scale");
  if (!(sigma_true > 0.0)) {
    throw std::domain_error("posterior_scale: sigma_true must be positive");
  }
  if (sigma_obs < sigma_true) {
    throw std::domain_error(
        "posterior_scale: observation SD cannot be below the latent SD");
  }
  return (sigma_true * sigma_true) / (sigma_obs * sigma_obs);
}

}  // namespace dsel
