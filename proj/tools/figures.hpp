#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsel/dsel.hpp"
#include "figure_manifest.hpp"

namespace dsel::cli {

namespace detail {

inline std::ofstream open_csv(const std::string& dir,
                              const std::string& name) {
  const std::string path = dir + "/" + name;
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot write " + path);
  }
  return os;
}

// sigma_s stays fixed while total signal noise grows to sigma_s_tilde.
inline PopulationParams pop_with_signal_sd(double sigma_f, double sigma_s,
                                           double sigma_s_tilde, double beta) {
  const double es = std::sqrt(
      std::max(0.0, sigma_s_tilde * sigma_s_tilde - sigma_s * sigma_s));
  return PopulationParams(sigma_f, sigma_s, 0.0, es, beta);
}

}  // namespace detail

inline void write_fig1(const std::string& dir) {
  namespace m = figmanifest;
  auto os = detail::open_csv(dir, "fig1.csv");
  os << "lambda_a,beta,tau1,norm_share_a,norm_share_b\n";
  const PopulationParams pop_a(m::kFig1SigmaF, m::kFig1SigmaS, 0.0, 0.0, 0.0);
  for (double lambda : m::kFig1Lambdas) {
    for (double beta : m::kFig1Betas) {
      const PopulationParams pop_b(m::kFig1SigmaF, m::kFig1SigmaS, 0.0, 0.0,
                                   beta);
      const GroupMix mix(lambda, pop_a, pop_b);
      for (std::size_t i = 0; i < m::kFig1Tau1Count; ++i) {
        const double tau1 = m::kFig1Tau1Lo + double(i) * m::kFig1Tau1Step;
        const FairnessStats fs = fairness_stats(mix, DelegatedPolicy(tau1));
        os << format_double(lambda) << ',' << format_double(beta) << ','
           << format_double(tau1) << ',' << csv_number(fs.comp_a) << ','
           << csv_number(fs.comp_b) << '\n';
      }
    }
  }
}

inline void write_fig2(const std::string& dir) {
  namespace m = figmanifest;
  auto os = detail::open_csv(dir, "fig2.csv");
  os << "lambda_a,r,tau1,norm_share_a,norm_share_b\n";
  const PopulationParams pop_a(m::kFig2SigmaF, m::kFig2SigmaS, 0.0, 0.0, 0.0);
  for (double lambda : m::kFig2Lambdas) {
    for (double r : m::kFig2Ratios) {
      const PopulationParams pop_b = detail::pop_with_signal_sd(
          m::kFig2SigmaF, m::kFig2SigmaS, r * m::kFig2SigmaS, 0.0);
      const GroupMix mix(lambda, pop_a, pop_b);
      for (std::size_t i = 0; i < m::kFig2Tau1Count; ++i) {
        const double tau1 = m::kFig2Tau1Lo + double(i) * m::kFig2Tau1Step;
        const FairnessStats fs = fairness_stats(mix, DelegatedPolicy(tau1));
        os << format_double(lambda) << ',' << format_double(r) << ','
           << format_double(tau1) << ',' << csv_number(fs.comp_a) << ','
           << csv_number(fs.comp_b) << '\n';
      }
    }
  }
}

inline void write_fig3(const std::string& dir) {
  namespace m = figmanifest;
  auto os = detail::open_csv(dir, "fig3.csv");
  os << "panel,x,value\n";
  // (a) v* vs sigma_t, observed quality noise fixed at sigma_e.
  for (std::size_t i = 0; i < m::kFig3SigmaTCount; ++i) {
    const double sigma_t = m::kFig3SigmaTLo + double(i) * m::kFig3SigmaTStep;
    const QualityScales scales(
        sigma_t, std::hypot(sigma_t, m::kFig3SigmaE));
    const PrincipalPrefs prefs(0.5, m::kFig3CRev, 1.0);
    const DirectPolicy pol = solve_threshold(scales, prefs);
    os << "a," << format_double(sigma_t) << ',' << csv_number(pol.v_star)
       << '\n';
  }
  // (b) sigma_t vs alpha.
  const PopulationParams pop_c(m::kFig3SigmaF, m::kFig3SigmaS, m::kFig3SigmaEf,
                               m::kFig3SigmaEs, 0.0);
  for (std::size_t i = 0; i < m::kFig3AlphaCount; ++i) {
    const double alpha = double(i) * m::kFig3AlphaStep;
    const PrincipalPrefs prefs(alpha, m::kFig3CRev, 1.0);
    const QualityScales scales = derive_scales(pop_c, prefs);
    os << "b," << format_double(alpha) << ',' << csv_number(scales.sigma_t)
       << '\n';
  }
  // (c) v* vs alpha.
  for (std::size_t i = 0; i < m::kFig3AlphaCount; ++i) {
    const double alpha = double(i) * m::kFig3AlphaStep;
    const PrincipalPrefs prefs(alpha, m::kFig3CRev, 1.0);
    const DirectPolicy pol = solve_group(pop_c, prefs);
    os << "c," << format_double(alpha) << ',' << csv_number(pol.v_star)
       << '\n';
  }
}

inline PopulationParams fig4_population() {
  namespace m = figmanifest;
  return PopulationParams::from_signal_sds(m::kFig4SigmaF, m::kFig4SigmaS,
                                           m::kFig4SigmaFTilde,
                                           m::kFig4SigmaSTilde);
}

inline void write_fig4(const std::string& dir) {
  namespace m = figmanifest;
  auto os = detail::open_csv(dir, "fig4.csv");
  const PopulationParams pop = fig4_population();
  std::vector<double> alpha_grid;
  for (std::size_t i = 0; i < m::kFig4AlphaCount; ++i) {
    alpha_grid.push_back(double(i) * m::kFig4AlphaStep);
  }
  const std::vector<double> tau1_grid(std::begin(m::kFig4Tau1s),
                                      std::end(m::kFig4Tau1s));
  const PrincipalPrefs base(0.0, m::kFig4CRev, 1.0);
  sweep_grid(pop, base, alpha_grid, tau1_grid).write_csv(os);
}

inline void write_fig5(const std::string& dir) {
  namespace m = figmanifest;
  auto os = detail::open_csv(dir, "fig5.csv");
  const PopulationParams pop = fig4_population();
  std::vector<double> alpha_grid;
  for (std::size_t i = 0; i < m::kFig5AlphaCells; ++i) {
    alpha_grid.push_back((double(i) + 0.5) * m::kFig5AlphaCell);
  }
  std::vector<double> tau1_grid;
  for (std::size_t j = 0; j < m::kFig5Tau1Cells; ++j) {
    tau1_grid.push_back((double(j) + 0.5) * m::kFig5Tau1Cell);
  }
  const PrincipalPrefs base(0.0, m::kFig4CRev, 1.0);
  sweep_grid(pop, base, alpha_grid, tau1_grid).write_csv(os);
}

inline void write_fig7(const std::string& dir) {
  namespace m = figmanifest;
  auto os = detail::open_csv(dir, "fig7.csv");
  os << "alpha,sigma_s_tilde,quality\n";
  for (double alpha : m::kFig7Alphas) {
    const PrincipalPrefs prefs(alpha, 0.1, 1.0);
    for (std::size_t i = 0; i < m::kFig7SigmaSTildeCount; ++i) {
      const double st =
          m::kFig7SigmaSTildeLo + double(i) * m::kFig7SigmaSTildeStep;
      const PopulationParams pop = detail::pop_with_signal_sd(
          m::kFig7SigmaF, m::kFig7SigmaS, st, 0.0);
      const double q = delegated_utility_per_hire(
          pop, prefs, DelegatedPolicy(m::kFig7Tau1));
      os << format_double(alpha) << ',' << format_double(st) << ','
         << csv_number(q) << '\n';
    }
  }
}

inline std::vector<std::string> write_all_figures(const std::string& dir) {
  write_fig1(dir);
  write_fig2(dir);
  write_fig3(dir);
  write_fig4(dir);
  write_fig5(dir);
  write_fig7(dir);
  return {"fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv", "fig5.csv",
          "fig7.csv"};
}

}  // namespace dsel::cli
