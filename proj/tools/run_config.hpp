#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsel/format.hpp"
#include "dsel/population.hpp"

namespace dsel::cli {

// Bad config content. Callers map this to the usage exit code.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PopulationSection {
  std::string label;
  double sigma_f = 1.0;
  double sigma_s = 1.0;
  double sigma_ef = 0.0;
  double sigma_es = 0.0;
  double beta = 0.0;

  bool operator==(const PopulationSection&) const = default;

  PopulationParams to_params() const {
    try {
      return PopulationParams(sigma_f, sigma_s, sigma_ef, sigma_es, beta,
                              label);
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
};

// Parsed run configuration. Sections map onto the model types; every command
// picks the subset it needs and rejects the rest as missing.
struct RunConfig {
  std::vector<PopulationSection> populations;

  std::optional<double> sigma_t;        // [scales]
  std::optional<double> sigma_t_tilde;

  std::optional<double> alpha;          // [preferences]
  std::optional<double> c_rev;
  std::optional<double> k;

  std::optional<double> tau1;           // [policy]
  std::optional<double> tau_tilde;

  std::optional<double> lambda_a;       // [mix]

  std::vector<double> alpha_grid;       // [sweep]
  std::vector<double> tau1_grid;

  std::uint64_t mc_seed = 1;            // [mc]
  std::size_t mc_samples = 1'000'000;
  std::size_t mc_trials = 10'000;
  std::size_t mc_hires = 100;
  std::string mc_target = "delegated";

  std::optional<std::string> out_path;  // [output]
  std::optional<std::string> out_format;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ConfigError("config: bad number for '" + key + "': " + text);
  }
  return v;
}

inline std::uint64_t parse_uint(const std::string& text,
                                const std::string& key) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ConfigError("config: bad integer for '" + key + "': " + text);
  }
  return v;
}

// Grid values: either an explicit comma list "0.5,1,2.4" or a range
// "lo:step:hi" inclusive of both ends (hi within step*1e-9 slack).
inline std::vector<double> parse_grid(const std::string& text,
                                      const std::string& key) {
  const std::string t = trim(text);
  std::vector<double> out;
  if (std::count(t.begin(), t.end(), ':') == 2) {
    const auto c1 = t.find(':');
    const auto c2 = t.find(':', c1 + 1);
    const double lo = parse_double(t.substr(0, c1), key);
    const double step = parse_double(t.substr(c1 + 1, c2 - c1 - 1), key);
    const double hi = parse_double(t.substr(c2 + 1), key);
    if (!(step > 0.0) || hi < lo) {
      throw ConfigError("config: bad range for '" + key + "': " + text);
    }
    const auto n = static_cast<std::size_t>((hi - lo) / step + 1e-9) + 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = lo + double(i) * step;
      // Rounding in lo + i*step can overshoot hi by a few ulps; snap so the
      // last grid point is exactly the stated endpoint.
      if (std::fabs(v - hi) <= step * 1e-9) v = hi;
      out.push_back(v);
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos <= t.size()) {
    const auto comma = t.find(',', pos);
    const std::string item =
        t.substr(pos, comma == std::string::npos ? std::string::npos
                                                 : comma - pos);
    out.push_back(parse_double(item, key));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) {
    throw ConfigError("config: empty grid for '" + key + "'");
  }
  return out;
}

// Holds a [population*] section until the whole file is read, so the
// signal-SD parameterization can be resolved against the trait SDs.
struct PopBuilder {
  PopulationSection sec;
  bool present = false;
  bool has_sigma_ef = false;
  bool has_sigma_es = false;
  std::optional<double> sigma_f_tilde;
  std::optional<double> sigma_s_tilde;

  void finalize(const std::string& name) {
    if (sigma_f_tilde) {
      if (has_sigma_ef) {
        throw ConfigError("config: [" + name +
                          "] gives both sigma_ef and sigma_f_tilde");
      }
      if (*sigma_f_tilde < sec.sigma_f) {
        throw ConfigError("config: [" + name +
                          "] sigma_f_tilde below sigma_f");
      }
      sec.sigma_ef = std::sqrt(std::max(
          0.0, *sigma_f_tilde * *sigma_f_tilde - sec.sigma_f * sec.sigma_f));
    }
    if (sigma_s_tilde) {
      if (has_sigma_es) {
        throw ConfigError("config: [" + name +
                          "] gives both sigma_es and sigma_s_tilde");
      }
      if (*sigma_s_tilde < sec.sigma_s) {
        throw ConfigError("config: [" + name +
                          "] sigma_s_tilde below sigma_s");
      }
      sec.sigma_es = std::sqrt(std::max(
          0.0, *sigma_s_tilde * *sigma_s_tilde - sec.sigma_s * sec.sigma_s));
    }
  }
};

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  detail::PopBuilder pops[2];
  std::string section;
  std::string line;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("config: unterminated section header at line " +
                          std::to_string(lineno));
      }
      section = detail::trim(t.substr(1, t.size() - 2));
      if (section == "population" || section == "population.a") {
        pops[0].present = true;
      } else if (section == "population.b") {
        pops[1].present = true;
      } else if (section != "scales" && section != "preferences" &&
                 section != "policy" && section != "mix" &&
                 section != "sweep" && section != "mc" &&
                 section != "output") {
        throw ConfigError("config: unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected key = value at line " +
                        std::to_string(lineno));
    }
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("config: key '" + key + "' outside any section");
    }

    if (section == "population" || section == "population.a" ||
        section == "population.b") {
      detail::PopBuilder& b = pops[section == "population.b" ? 1 : 0];
      if (key == "label") {
        b.sec.label = value;
      } else if (key == "sigma_f") {
        b.sec.sigma_f = detail::parse_double(value, key);
      } else if (key == "sigma_s") {
        b.sec.sigma_s = detail::parse_double(value, key);
      } else if (key == "sigma_ef") {
        b.sec.sigma_ef = detail::parse_double(value, key);
        b.has_sigma_ef = true;
      } else if (key == "sigma_es") {
        b.sec.sigma_es = detail::parse_double(value, key);
        b.has_sigma_es = true;
      } else if (key == "sigma_f_tilde") {
        b.sigma_f_tilde = detail::parse_double(value, key);
      } else if (key == "sigma_s_tilde") {
        b.sigma_s_tilde = detail::parse_double(value, key);
      } else if (key == "beta") {
        b.sec.beta = detail::parse_double(value, key);
      } else {
        throw ConfigError("config: unknown key '" + key + "' in [" + section +
                          "]");
      }
    } else if (section == "scales") {
      if (key == "sigma_t") {
        cfg.sigma_t = detail::parse_double(value, key);
      } else if (key == "sigma_t_tilde") {
        cfg.sigma_t_tilde = detail::parse_double(value, key);
      } else {
        throw ConfigError("config: unknown key '" + key + "' in [scales]");
      }
    } else if (section == "preferences") {
      if (key == "alpha") {
        cfg.alpha = detail::parse_double(value, key);
      } else if (key == "c_rev") {
        cfg.c_rev = detail::parse_double(value, key);
      } else if (key == "k") {
        cfg.k = detail::parse_double(value, key);
      } else {
        throw ConfigError("config: unknown key '" + key +
                          "' in [preferences]");
      }
    } else if (section == "policy") {
      if (key == "tau1") {
        cfg.tau1 = detail::parse_double(value, key);
      } else if (key == "tau_tilde") {
        cfg.tau_tilde = detail::parse_double(value, key);
      } else {
        throw ConfigError("config: unknown key '" + key + "' in [policy]");
      }
    } else if (section == "mix") {
      if (key == "lambda_a") {
        cfg.lambda_a = detail::parse_double(value, key);
      } else {
        throw ConfigError("config: unknown key '" + key + "' in [mix]");
      }
    } else if (section == "sweep") {
      if (key == "alpha") {
        cfg.alpha_grid = detail::parse_grid(value, key);
      } else if (key == "tau1") {
        cfg.tau1_grid = detail::parse_grid(value, key);
      } else {
        throw ConfigError("config: unknown key '" + key + "' in [sweep]");
      }
    } else if (section == "mc") {
      if (key == "seed") {
        cfg.mc_seed = detail::parse_uint(value, key);
      } else if (key == "n_samples") {
        cfg.mc_samples = detail::parse_uint(value, key);
      } else if (key == "n_trials") {
        cfg.mc_trials = detail::parse_uint(value, key);
      } else if (key == "k_hires") {
        cfg.mc_hires = detail::parse_uint(value, key);
      } else if (key == "target") {
        if (value != "delegated" && value != "direct" && value != "fairness") {
          throw ConfigError("config: mc target must be delegated, direct, "
                            "or fairness");
        }
        cfg.mc_target = value;
      } else {
        throw ConfigError("config: unknown key '" + key + "' in [mc]");
      }
    } else if (section == "output") {
      if (key == "path") {
        cfg.out_path = value;
      } else if (key == "format") {
        if (value != "csv" && value != "json") {
          throw ConfigError("config: output format must be csv or json");
        }
        cfg.out_format = value;
      } else {
        throw ConfigError("config: unknown key '" + key + "' in [output]");
      }
    }
  }

  if (pops[1].present && !pops[0].present) {
    throw ConfigError("config: [population.b] requires [population.a]");
  }
  for (int i = 0; i < 2; ++i) {
    if (!pops[i].present) continue;
    pops[i].finalize(i == 0 ? "population.a" : "population.b");
    cfg.populations.push_back(pops[i].sec);
  }
  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path);
  }
  return parse_config(in);
}

// Canonical form: fixed section and key order, shortest round-trip decimals,
// grids as explicit comma lists. parse(serialize(cfg)) == cfg.
inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  const auto grid_text = [](const std::vector<double>& g) {
    std::string s;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i) s += ',';
      s += format_double(g[i]);
    }
    return s;
  };

  for (std::size_t i = 0; i < cfg.populations.size(); ++i) {
    const PopulationSection& p = cfg.populations[i];
    if (cfg.populations.size() == 1) {
      os << "[population]\n";
    } else {
      os << (i == 0 ? "[population.a]\n" : "[population.b]\n");
    }
    if (!p.label.empty()) os << "label = " << p.label << '\n';
    os << "sigma_f = " << format_double(p.sigma_f) << '\n';
    os << "sigma_s = " << format_double(p.sigma_s) << '\n';
    os << "sigma_ef = " << format_double(p.sigma_ef) << '\n';
    os << "sigma_es = " << format_double(p.sigma_es) << '\n';
    os << "beta = " << format_double(p.beta) << '\n';
    os << '\n';
  }
  if (cfg.sigma_t || cfg.sigma_t_tilde) {
    os << "[scales]\n";
    if (cfg.sigma_t) os << "sigma_t = " << format_double(*cfg.sigma_t) << '\n';
    if (cfg.sigma_t_tilde) {
      os << "sigma_t_tilde = " << format_double(*cfg.sigma_t_tilde) << '\n';
    }
    os << '\n';
  }
  if (cfg.alpha || cfg.c_rev || cfg.k) {
    os << "[preferences]\n";
    if (cfg.alpha) os << "alpha = " << format_double(*cfg.alpha) << '\n';
    if (cfg.c_rev) os << "c_rev = " << format_double(*cfg.c_rev) << '\n';
    if (cfg.k) os << "k = " << format_double(*cfg.k) << '\n';
    os << '\n';
  }
  if (cfg.tau1 || cfg.tau_tilde) {
    os << "[policy]\n";
    if (cfg.tau1) os << "tau1 = " << format_double(*cfg.tau1) << '\n';
    if (cfg.tau_tilde) {
      os << "tau_tilde = " << format_double(*cfg.tau_tilde) << '\n';
    }
    os << '\n';
  }
  if (cfg.lambda_a) {
    os << "[mix]\n";
    os << "lambda_a = " << format_double(*cfg.lambda_a) << '\n';
    os << '\n';
  }
  if (!cfg.alpha_grid.empty() || !cfg.tau1_grid.empty()) {
    os << "[sweep]\n";
    if (!cfg.alpha_grid.empty()) {
      os << "alpha = " << grid_text(cfg.alpha_grid) << '\n';
    }
    if (!cfg.tau1_grid.empty()) {
      os << "tau1 = " << grid_text(cfg.tau1_grid) << '\n';
    }
    os << '\n';
  }
  os << "[mc]\n";
  os << "seed = " << cfg.mc_seed << '\n';
  os << "n_samples = " << cfg.mc_samples << '\n';
  os << "n_trials = " << cfg.mc_trials << '\n';
  os << "k_hires = " << cfg.mc_hires << '\n';
  os << "target = " << cfg.mc_target << '\n';
  if (cfg.out_path || cfg.out_format) {
    os << '\n' << "[output]\n";
    if (cfg.out_path) os << "path = " << *cfg.out_path << '\n';
    if (cfg.out_format) os << "format = " << *cfg.out_format << '\n';
  }
  return os.str();
}

}  // namespace dsel::cli
