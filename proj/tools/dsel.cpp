// Command-line front-end for the selection-model library: closed-form
// evaluations, optimal-threshold solving, fairness sweeps, regime
// comparisons, Monte Carlo validation, and bundled figure datasets.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsel/dsel.hpp"
#include "figures.hpp"
#include "run_config.hpp"

namespace {

using dsel::cli::ConfigError;
using dsel::cli::RunConfig;
using ordered_json = nlohmann::ordered_json;

struct CmdOpts {
  std::string config_path;
  std::string out_path;
  std::string format;  // "", "csv", "json"
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CmdOpts& opts, bool config_required = true) {
  auto* c = cmd->add_option("--config", opts.config_path, "config file path");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out_path,
                  "output file (default: standard output)");
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", opts.seed, "override the [mc] seed");
}

RunConfig load(const CmdOpts& opts) {
  RunConfig cfg = dsel::cli::load_config(opts.config_path);
  if (opts.seed) cfg.mc_seed = *opts.seed;
  return cfg;
}

// CLI flags win over [output] config keys.
std::string pick_format(const CmdOpts& opts, const RunConfig& cfg,
                        const std::string& fallback) {
  if (!opts.format.empty()) return opts.format;
  if (cfg.out_format) return *cfg.out_format;
  return fallback;
}

void emit(const CmdOpts& opts, const RunConfig& cfg, const std::string& text) {
  std::string path = opts.out_path;
  if (path.empty() && cfg.out_path) path = *cfg.out_path;
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

double req(const std::optional<double>& v, const char* what) {
  if (!v) throw ConfigError(std::string("config: missing ") + what);
  return *v;
}

dsel::PrincipalPrefs prefs_from(const RunConfig& cfg) {
  try {
    return dsel::PrincipalPrefs(req(cfg.alpha, "[preferences] alpha"),
                                req(cfg.c_rev, "[preferences] c_rev"),
                                cfg.k.value_or(1.0));
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

dsel::PopulationParams single_pop(const RunConfig& cfg) {
  if (cfg.populations.size() != 1) {
    throw ConfigError("config: this command needs exactly one [population]");
  }
  return cfg.populations[0].to_params();
}

dsel::GroupMix mix_from(const RunConfig& cfg) {
  if (cfg.populations.size() != 2) {
    throw ConfigError(
        "config: this command needs [population.a] and [population.b]");
  }
  try {
    return dsel::GroupMix(req(cfg.lambda_a, "[mix] lambda_a"),
                          cfg.populations[0].to_params(),
                          cfg.populations[1].to_params());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::vector<double> tau1_grid_from(const RunConfig& cfg) {
  if (!cfg.tau1_grid.empty()) return cfg.tau1_grid;
  return {req(cfg.tau1, "[policy] tau1 (or [sweep] tau1)")};
}

unsigned env_threads() {
  const char* v = std::getenv("DSEL_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (end == v || *end != '\0' || n == 0 || n > 4096) {
    throw ConfigError("DSEL_THREADS must be a positive integer");
  }
  return static_cast<unsigned>(n);
}

ordered_json policy_json(const dsel::DirectPolicy& pol) {
  ordered_json j;
  j["viable"] = pol.viable;
  j["tau_star"] = pol.tau_star;
  j["z_star"] = pol.z_star;
  j["v_star"] = pol.v_star;
  j["n_rev_star"] = pol.n_rev_star;
  j["accept_prob"] = pol.accept_prob;
  j["iterations"] = pol.diag.iterations;
  j["residual"] = pol.diag.residual;
  return j;
}

ordered_json estimate_json(const dsel::McEstimate& e) {
  ordered_json j;
  j["estimate"] = e.mean;
  j["std_error"] = e.std_error;
  j["n_effective"] = e.n_effective;
  return j;
}

void set_or_na(ordered_json& j, const char* key, double v) {
  if (std::isfinite(v)) {
    j[key] = v;
  } else {
    j[key] = nullptr;
  }
}

int cmd_delegated(const CmdOpts& opts) {
  const RunConfig cfg = load(opts);
  const dsel::PopulationParams pop = single_pop(cfg);
  const dsel::PrincipalPrefs prefs = prefs_from(cfg);
  const std::vector<double> taus = tau1_grid_from(cfg);
  const std::string fmt =
      pick_format(opts, cfg, taus.size() > 1 ? "csv" : "json");

  if (fmt == "csv") {
    std::ostringstream os;
    os << "tau1,utility_per_hire\n";
    for (double tau1 : taus) {
      os << dsel::format_double(tau1) << ','
         << dsel::csv_number(dsel::delegated_utility_per_hire(
                pop, prefs, dsel::DelegatedPolicy(tau1)))
         << '\n';
    }
    emit(opts, cfg, os.str());
  } else {
    ordered_json j;
    j["alpha"] = prefs.alpha;
    ordered_json rows = ordered_json::array();
    for (double tau1 : taus) {
      ordered_json row;
      row["tau1"] = tau1;
      row["utility_per_hire"] = dsel::delegated_utility_per_hire(
          pop, prefs, dsel::DelegatedPolicy(tau1));
      rows.push_back(row);
    }
    j["rows"] = rows;
    emit(opts, cfg, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_solve(const CmdOpts& opts) {
  const RunConfig cfg = load(opts);
  const dsel::PrincipalPrefs prefs = prefs_from(cfg);

  dsel::DirectPolicy pol;
  double sigma_t = 0.0;
  double sigma_t_tilde = 0.0;
  if (cfg.sigma_t || cfg.sigma_t_tilde) {
    std::optional<dsel::QualityScales> scales;
    try {
      scales.emplace(req(cfg.sigma_t, "[scales] sigma_t"),
                     req(cfg.sigma_t_tilde, "[scales] sigma_t_tilde"));
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    sigma_t = scales->sigma_t;
    sigma_t_tilde = scales->sigma_t_tilde;
    pol = dsel::solve_threshold(*scales, prefs);
  } else {
    const dsel::PopulationParams pop = single_pop(cfg);
    const dsel::QualityScales scales = dsel::derive_scales(pop, prefs);
    sigma_t = scales.sigma_t;
    sigma_t_tilde = scales.sigma_t_tilde;
    pol = dsel::solve_group(pop, prefs);
  }

  const std::string fmt = pick_format(opts, cfg, "json");
  if (fmt == "csv") {
    std::ostringstream os;
    os << "sigma_t,sigma_t_tilde,alpha,c_rev,viable,tau_star,z_star,v_star,"
          "n_rev_star,accept_prob\n";
    os << dsel::format_double(sigma_t) << ','
       << dsel::format_double(sigma_t_tilde) << ','
       << dsel::format_double(prefs.alpha) << ','
       << dsel::format_double(prefs.c_rev) << ',' << (pol.viable ? '1' : '0')
       << ',' << dsel::format_double(pol.tau_star) << ','
       << dsel::format_double(pol.z_star) << ','
       << dsel::format_double(pol.v_star) << ','
       << dsel::format_double(pol.n_rev_star) << ','
       << dsel::format_double(pol.accept_prob) << '\n';
    emit(opts, cfg, os.str());
  } else {
    ordered_json j;
    j["sigma_t"] = sigma_t;
    j["sigma_t_tilde"] = sigma_t_tilde;
    j["alpha"] = prefs.alpha;
    j["c_rev"] = prefs.c_rev;
    j["k"] = prefs.k;
    const ordered_json pj = policy_json(pol);
    for (const auto& [key, value] : pj.items()) j[key] = value;
    emit(opts, cfg, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_fairness(const CmdOpts& opts) {
  const RunConfig cfg = load(opts);
  const dsel::GroupMix mix = mix_from(cfg);
  const std::vector<double> taus = tau1_grid_from(cfg);
  const std::string fmt = pick_format(opts, cfg, "csv");

  if (fmt == "csv") {
    std::ostringstream os;
    os << "tau1,sel_prob_a,sel_prob_b,norm_share_a,norm_share_b,e_d,"
          "e_abs_d_lower,e_abs_d_upper,direction\n";
    for (double tau1 : taus) {
      const dsel::DelegatedPolicy pol(tau1);
      const auto [pa, pb] = dsel::group_select_prob(mix, pol);
      const dsel::FairnessStats fs = dsel::fairness_stats(mix, pol);
      os << dsel::format_double(tau1) << ',' << dsel::csv_number(pa) << ','
         << dsel::csv_number(pb) << ',' << dsel::csv_number(fs.comp_a) << ','
         << dsel::csv_number(fs.comp_b) << ',' << dsel::csv_number(fs.e_d)
         << ',' << dsel::csv_number(fs.e_abs_d_lower) << ','
         << dsel::csv_number(fs.e_abs_d_upper) << ','
         << dsel::unfairness_direction(mix, pol) << '\n';
    }
    emit(opts, cfg, os.str());
  } else {
    ordered_json j;
    j["lambda_a"] = mix.lambda_a;
    ordered_json rows = ordered_json::array();
    for (double tau1 : taus) {
      const dsel::DelegatedPolicy pol(tau1);
      const auto [pa, pb] = dsel::group_select_prob(mix, pol);
      const dsel::FairnessStats fs = dsel::fairness_stats(mix, pol);
      ordered_json row;
      row["tau1"] = tau1;
      row["sel_prob_a"] = pa;
      row["sel_prob_b"] = pb;
      row["norm_share_a"] = fs.comp_a;
      row["norm_share_b"] = fs.comp_b;
      row["e_d"] = fs.e_d;
      row["e_abs_d_lower"] = fs.e_abs_d_lower;
      row["e_abs_d_upper"] = fs.e_abs_d_upper;
      row["direction"] = dsel::unfairness_direction(mix, pol);
      rows.push_back(row);
    }
    j["rows"] = rows;
    emit(opts, cfg, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_joint(const CmdOpts& opts) {
  const RunConfig cfg = load(opts);
  const dsel::GroupMix mix = mix_from(cfg);
  const dsel::PrincipalPrefs prefs = prefs_from(cfg);
  const dsel::JointAllocation alloc = dsel::joint_allocate(mix, prefs);

  ordered_json j;
  j["lambda_a"] = mix.lambda_a;
  j["k"] = prefs.k;
  j["r_a"] = alloc.r_a;
  j["r_b"] = alloc.r_b;
  j["policy_a"] = policy_json(alloc.policy_a);
  j["policy_b"] = policy_json(alloc.policy_b);
  emit(opts, cfg, j.dump(2) + "\n");
  return 0;
}

int cmd_compare(const CmdOpts& opts) {
  const RunConfig cfg = load(opts);
  const dsel::PopulationParams pop = single_pop(cfg);
  const dsel::PrincipalPrefs prefs = prefs_from(cfg);
  const double tau1 = req(cfg.tau1, "[policy] tau1");
  const dsel::DeltaResult res =
      dsel::compare_point(pop, prefs, dsel::DelegatedPolicy(tau1));

  const std::string fmt = pick_format(opts, cfg, "json");
  if (fmt == "csv") {
    std::ostringstream os;
    os << "alpha,tau1,delta_quality,delta_utility,viable\n";
    os << dsel::format_double(prefs.alpha) << ',' << dsel::format_double(tau1)
       << ',' << dsel::csv_number(res.delta_quality) << ','
       << dsel::csv_number(res.delta_utility) << ','
       << (res.direct_viable ? '1' : '0') << '\n';
    emit(opts, cfg, os.str());
  } else {
    ordered_json j;
    j["alpha"] = prefs.alpha;
    j["tau1"] = tau1;
    set_or_na(j, "delta_quality", res.delta_quality);
    j["delta_utility"] = res.delta_utility;
    j["delegation_preferred_quality"] = res.delegation_preferred_quality;
    j["delegation_preferred_utility"] = res.delegation_preferred_utility;
    j["direct_viable"] = res.direct_viable;
    emit(opts, cfg, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_sweep(const CmdOpts& opts) {
  const RunConfig cfg = load(opts);
  const dsel::PopulationParams pop = single_pop(cfg);
  if (cfg.alpha_grid.empty() || cfg.tau1_grid.empty()) {
    throw ConfigError("config: sweep needs [sweep] alpha and tau1 grids");
  }
  dsel::PrincipalPrefs base(0.0, req(cfg.c_rev, "[preferences] c_rev"),
                            cfg.k.value_or(1.0));
  const dsel::SweepTable table =
      dsel::sweep_grid(pop, base, cfg.alpha_grid, cfg.tau1_grid);

  const std::string fmt = pick_format(opts, cfg, "csv");
  if (fmt == "csv") {
    std::ostringstream os;
    table.write_csv(os);
    emit(opts, cfg, os.str());
  } else {
    ordered_json rows = ordered_json::array();
    for (const dsel::SweepCell& c : table.cells) {
      ordered_json row;
      row["alpha"] = c.alpha;
      row["tau1"] = c.tau1;
      if (c.ok) {
        set_or_na(row, "delta_quality", c.result.delta_quality);
        row["delta_utility"] = c.result.delta_utility;
        row["viable"] = c.result.direct_viable;
      } else {
        row["error"] = c.error;
      }
      rows.push_back(row);
    }
    emit(opts, cfg, rows.dump(2) + "\n");
  }
  return 0;
}

int cmd_simulate(const CmdOpts& opts) {
  const RunConfig cfg = load(opts);
  dsel::McConfig mc;
  mc.seed = cfg.mc_seed;
  mc.n_samples = cfg.mc_samples;
  mc.n_trials = cfg.mc_trials;
  mc.k_hires = cfg.mc_hires;
  const unsigned threads = env_threads();

  ordered_json j;
  j["target"] = cfg.mc_target;
  j["seed"] = mc.seed;

  if (cfg.mc_target == "delegated") {
    const dsel::PopulationParams pop = single_pop(cfg);
    const dsel::PrincipalPrefs prefs = prefs_from(cfg);
    const dsel::DelegatedPolicy pol(req(cfg.tau1, "[policy] tau1"));
    j["n_samples"] = mc.n_samples;
    j["tau1"] = pol.tau1;
    j.update(estimate_json(dsel::estimate_delegated(pop, prefs, pol, mc,
                                                    threads)));
    j["closed_form"] = dsel::delegated_utility_per_hire(pop, prefs, pol);
  } else if (cfg.mc_target == "direct") {
    const dsel::PopulationParams pop = single_pop(cfg);
    const dsel::PrincipalPrefs prefs = prefs_from(cfg);
    double tau = 0.0;
    if (cfg.tau_tilde) {
      tau = *cfg.tau_tilde;
    } else {
      tau = dsel::solve_group(pop, prefs).tau_star;
    }
    j["n_samples"] = mc.n_samples;
    j["tau_tilde"] = tau;
    const dsel::DirectEstimate est =
        dsel::estimate_direct(pop, prefs, tau, mc, threads);
    j["quality"] = estimate_json(est.quality);
    j["accept_prob"] = estimate_json(est.accept_prob);
    const dsel::QualityScales scales = dsel::derive_scales(pop, prefs);
    j["closed_form_quality"] =
        (scales.sigma_t * scales.sigma_t / scales.sigma_t_tilde) *
        dsel::hazard((tau + dsel::quality_bias(pop, prefs)) /
                     scales.sigma_t_tilde);
  } else {  // fairness
    const dsel::GroupMix mix = mix_from(cfg);
    const dsel::DelegatedPolicy pol(req(cfg.tau1, "[policy] tau1"));
    j["n_trials"] = mc.n_trials;
    j["k_hires"] = mc.k_hires;
    j["tau1"] = pol.tau1;
    const dsel::FairnessEstimate est =
        dsel::estimate_fairness(mix, pol, mc, threads);
    j["e_d"] = estimate_json(est.e_d);
    j["e_abs_d"] = estimate_json(est.e_abs_d);
    const dsel::FairnessStats fs = dsel::fairness_stats(mix, pol);
    j["closed_form_e_d"] = fs.e_d;
    j["closed_form_e_abs_d_bounds"] =
        ordered_json::array({fs.e_abs_d_lower, fs.e_abs_d_upper});
  }
  emit(opts, cfg, j.dump(2) + "\n");
  return 0;
}

int cmd_repro_figures(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::vector<std::string> files = dsel::cli::write_all_figures(out_dir);
  std::cout << "manifest_version=" << dsel::figmanifest::kManifestVersion
            << "\n";
  for (const std::string& f : files) {
    std::cout << "wrote " << out_dir << "/" << f << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dsel: threshold selection model under noisy signals (delegated vs. "
      "direct review)"};
  app.require_subcommand(1);

  CmdOpts delegated_opts;
  add_common(app.add_subcommand("delegated",
                                "closed-form delegated hire quality"),
             delegated_opts);
  CmdOpts solve_opts;
  add_common(app.add_subcommand("solve", "optimal direct-review threshold"),
             solve_opts);
  CmdOpts fairness_opts;
  add_common(app.add_subcommand("fairness",
                                "two-group selection disparity statistics"),
             fairness_opts);
  CmdOpts joint_opts;
  add_common(app.add_subcommand("joint", "two-group review allocation"),
             joint_opts);
  CmdOpts compare_opts;
  add_common(app.add_subcommand("compare",
                                "delegated-vs-direct gaps at one point"),
             compare_opts);
  CmdOpts sweep_opts;
  add_common(app.add_subcommand("sweep", "delegation gaps over a grid"),
             sweep_opts);
  CmdOpts simulate_opts;
  add_common(app.add_subcommand("simulate", "Monte Carlo validation run"),
             simulate_opts);

  std::string fig_dir = "figures";
  app.add_subcommand("repro-figures", "write the bundled figure datasets")
      ->add_option("--out", fig_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("delegated")) return cmd_delegated(delegated_opts);
    if (app.got_subcommand("solve")) return cmd_solve(solve_opts);
    if (app.got_subcommand("fairness")) return cmd_fairness(fairness_opts);
    if (app.got_subcommand("joint")) return cmd_joint(joint_opts);
    if (app.got_subcommand("compare")) return cmd_compare(compare_opts);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_opts);
    if (app.got_subcommand("simulate")) return cmd_simulate(simulate_opts);
    if (app.got_subcommand("repro-figures")) return cmd_repro_figures(fig_dir);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
