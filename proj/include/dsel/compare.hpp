#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsel/delegated.hpp"
#include "dsel/direct.hpp"
#include "dsel/format.hpp"
#include "dsel/population.hpp"

namespace dsel {

// Delegated-minus-direct gaps at one parameter point. delta_quality compares
// expected hire quality only; delta_utility also charges the direct process
// its review cost. When the direct process is not viable it hires nobody, so
// delta_quality has no value (NaN) and delta_utility equals the delegated
// utility alone.
struct DeltaResult {
  double delta_quality = 0.0;
  double delta_utility = 0.0;
  bool delegation_preferred_quality = false;
  bool delegation_preferred_utility = false;
  bool direct_viable = false;
};

inline DeltaResult compare_point(const PopulationParams& pop,
                                 const PrincipalPrefs& prefs,
                                 const DelegatedPolicy& pol) {
  const double delegated = delegated_utility_per_hire(pop, prefs, pol);
  const DirectPolicy direct = solve_group(pop, prefs);

  DeltaResult out;
  out.direct_viable = direct.viable;
  if (direct.viable) {
    const QualityScales scales = derive_scales(pop, prefs);
    const double direct_quality =
        (scales.sigma_t * scales.sigma_t / scales.sigma_t_tilde) *
        hazard(direct.z_star);
    out.delta_quality = delegated - direct_quality;
    out.delta_utility = delegated - direct.v_star;
    out.delegation_preferred_quality = out.delta_quality > 0.0;
    out.delegation_preferred_utility = out.delta_utility > 0.0;
  } else {
    out.delta_quality = std::numeric_limits<double>::quiet_NaN();
    out.delta_utility = delegated;
    out.delegation_preferred_quality = false;
    out.delegation_preferred_utility = out.delta_utility >= 0.0;
  }
  return out;
}

struct SweepCell {
  double alpha = 0.0;
  double tau1 = 0.0;
  DeltaResult result;
  bool ok = false;
  std::string error;
};

// Row-major over (alpha, tau1).
struct SweepTable {
  std::size_t n_alpha = 0;
  std::size_t n_tau1 = 0;
  std::vector<SweepCell> cells;

  const SweepCell& at(std::size_t i_alpha, std::size_t i_tau1) const {
    return cells[i_alpha * n_tau1 + i_tau1];
  }

  void write_csv(std::ostream& os) const {
    os << "alpha,tau1,delta_quality,delta_utility,viable\n";
    for (const SweepCell& c : cells) {
      os << format_double(c.alpha) << ',' << format_double(c.tau1) << ',';
      if (c.ok) {
        os << csv_number(c.result.delta_quality) << ','
           << csv_number(c.result.delta_utility) << ','
           << (c.result.direct_viable ? '1' : '0') << '\n';
      } else {
        os << "NA,NA,NA\n";
      }
    }
  }
};

namespace detail {

inline void check_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) {
    throw std::invalid_argument(std::string("sweep_grid: empty ") + name);
  }
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::invalid_argument(std::string("sweep_grid: unsorted ") + name);
  }
}

}  // namespace detail

// Evaluates compare_point over the cross product of the grids. Cells where
// evaluation fails (e.g. degenerate thresholds) are kept in the table with
// ok = false instead of aborting the sweep.
inline SweepTable sweep_grid(const PopulationParams& pop,
                             const PrincipalPrefs& base_prefs,
                             const std::vector<double>& alpha_grid,
                             const std::vector<double>& tau1_grid) {
  detail::check_grid(alpha_grid, "alpha grid");
  detail::check_grid(tau1_grid, "tau1 grid");

  SweepTable table;
  table.n_alpha = alpha_grid.size();
  table.n_tau1 = tau1_grid.size();
  table.cells.reserve(alpha_grid.size() * tau1_grid.size());
  for (double alpha : alpha_grid) {
    for (double tau1 : tau1_grid) {
      SweepCell cell;
      cell.alpha = alpha;
      cell.tau1 = tau1;
      try {
        const PrincipalPrefs prefs(alpha, base_prefs.c_rev, base_prefs.k);
        cell.result = compare_point(pop, prefs, DelegatedPolicy(tau1));
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace dsel
