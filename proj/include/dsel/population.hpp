#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "dsel/gauss.hpp"

namespace dsel {

// Distributional parameters of one applicant group. True fit f and ability s
// are zero-mean normals; observed signals add independent zero-mean noise,
// except that the ability signal mean is shifted down by beta >= 0.
struct PopulationParams {
  double sigma_f;
  double sigma_s;
  double sigma_ef;
  double sigma_es;
  double beta;
  std::string label;

  PopulationParams(double sigma_f_in, double sigma_s_in, double sigma_ef_in,
                   double sigma_es_in, double beta_in = 0.0,
                   std::string label_in = {})
      : sigma_f(sigma_f_in),
        sigma_s(sigma_s_in),
        sigma_ef(sigma_ef_in),
        sigma_es(sigma_es_in),
        beta(beta_in),
        label(std::move(label_in)) {
    detail::check_finite(sigma_f, "PopulationParams");
    detail::check_finite(sigma_s, "PopulationParams");
    detail::check_finite(sigma_ef, "PopulationParams");
    detail::check_finite(sigma_es, "PopulationParams");
    detail::check_finite(beta, "PopulationParams");
    if (!(sigma_f > 0.0) || !(sigma_s > 0.0)) {
      throw std::domain_error("PopulationParams: trait SDs must be positive");
    }
    if (sigma_ef < 0.0 || sigma_es < 0.0) {
      throw std::domain_error("PopulationParams: noise SDs must be nonnegative");
    }
    if (beta < 0.0) {
      throw std::domain_error("PopulationParams: beta must be nonnegative");
    }
  }

  // Alternative parameterization by total signal SDs. Requires
  // sigma_f_tilde >= sigma_f and sigma_s_tilde >= sigma_s.
  static PopulationParams from_signal_sds(double sigma_f_in, double sigma_s_in,
                                          double sigma_f_tilde,
                                          double sigma_s_tilde,
                                          double beta_in = 0.0,
                                          std::string label_in = {}) {
    detail::check_finite(sigma_f_tilde, "PopulationParams::from_signal_sds");
    detail::check_finite(sigma_s_tilde, "PopulationParams::from_signal_sds");
    if (sigma_f_tilde < sigma_f_in || sigma_s_tilde < sigma_s_in) {
      throw std::domain_error(
          "PopulationParams::from_signal_sds: signal SD below trait SD");
    }
    const double ef = std::sqrt(std::max(
        0.0, sigma_f_tilde * sigma_f_tilde - sigma_f_in * sigma_f_in));
    const double es = std::sqrt(std::max(
        0.0, sigma_s_tilde * sigma_s_tilde - sigma_s_in * sigma_s_in));
    return PopulationParams(sigma_f_in, sigma_s_in, ef, es, beta_in,
                            std::move(label_in));
  }

  double sigma_f_tilde() const { return std::hypot(sigma_f, sigma_ef); }
  double sigma_s_tilde() const { return std::hypot(sigma_s, sigma_es); }
};

// Principal's weighting of fit vs. ability, per-application review cost, and
// number of hires.
struct PrincipalPrefs {
  double alpha;
  double c_rev;
  double k;

  PrincipalPrefs(double alpha_in, double c_rev_in, double k_in)
      : alpha(alpha_in), c_rev(c_rev_in), k(k_in) {
    detail::check_finite(alpha, "PrincipalPrefs");
    detail::check_finite(c_rev, "PrincipalPrefs");
    detail::check_finite(k, "PrincipalPrefs");
    if (alpha < 0.0 || alpha > 1.0) {
      throw std::domain_error("PrincipalPrefs: alpha must lie in [0, 1]");
    }
    if (c_rev < 0.0) {
      throw std::domain_error("PrincipalPrefs: c_rev must be nonnegative");
    }
    if (!(k > 0.0)) {
      throw std::domain_error("PrincipalPrefs: k must be positive");
    }
  }
};

// SDs of composite quality t = alpha*f + (1-alpha)*s and of its observed
// counterpart. Always sigma_t_tilde >= sigma_t > 0.
struct QualityScales {
  double sigma_t;
  double sigma_t_tilde;

  QualityScales(double sigma_t_in, double sigma_t_tilde_in)
      : sigma_t(sigma_t_in), sigma_t_tilde(sigma_t_tilde_in) {
    detail::check_finite(sigma_t, "QualityScales");
    detail::check_finite(sigma_t_tilde, "QualityScales");
    if (!(sigma_t > 0.0)) {
      throw std::domain_error("QualityScales: sigma_t must be positive");
    }
    if (sigma_t_tilde < sigma_t) {
      throw std::domain_error(
          "QualityScales: sigma_t_tilde cannot be below sigma_t");
    }
  }
};

inline QualityScales derive_scales(const PopulationParams& pop,
                                   const PrincipalPrefs& prefs) {
  const double a = prefs.alpha;
  const double b = 1.0 - prefs.alpha;
  const double var_t =
      a * a * pop.sigma_f * pop.sigma_f + b * b * pop.sigma_s * pop.sigma_s;
  const double var_tt = var_t + a * a * pop.sigma_ef * pop.sigma_ef +
                        b * b * pop.sigma_es * pop.sigma_es;
  return QualityScales(std::sqrt(var_t), std::sqrt(var_tt));
}

// Mean shift of observed quality: E[t_tilde] = -(1-alpha)*beta.
inline double quality_bias(const PopulationParams& pop,
                           const PrincipalPrefs& prefs) {
  return (1.0 - prefs.alpha) * pop.beta;
}

}  // namespace dsel
