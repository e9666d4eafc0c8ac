#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dsel/delegated.hpp"
#include "dsel/errors.hpp"
#include "dsel/gauss.hpp"
#include "dsel/population.hpp"

namespace dsel {

struct McConfig {
  std::uint64_t seed = 1;
  std::size_t n_samples = 1'000'000;  // applicant draws (per-hire estimators)
  std::size_t n_trials = 10'000;      // hiring rounds (disparity estimator)
  std::size_t k_hires = 100;          // hires per round
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_effective = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Inverse standard normal CDF (Wichura's rational approximations), accurate
// to roughly 1e-16 relative over the full open interval.
inline double normal_quantile(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) *
                 r +
             4.5921953931549871457e4) *
                r +
            1.3731693765509461125e4) *
               r +
           1.9715909503065514427e3) *
              r +
          1.3314166789178437745e2) *
             r +
         3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) *
                 r +
             2.1213794301586595867e4) *
                r +
            5.3941960214247511077e3) *
               r +
           6.8718700749205790830e2) *
              r +
          4.2313330701600911252e1) *
             r +
         1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) *
                  r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e0) *
                r +
            3.64784832476320460504e0) *
               r +
           5.76949722146069140550e0) *
              r +
          4.63033784615654529590e0) *
             r +
         1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) *
                  r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e0) *
              r +
          2.05319162663775882187e0) *
             r +
         1.0);
    v = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) *
                  r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e0) *
              r +
          5.46378491116411436990e0) *
             r +
         6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) *
                  r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    v = num / den;
  }
  return (q < 0.0) ? -v : v;
}

}  // namespace detail

// One reproducible substream. (seed, stream) fully determine the sequence,
// so splitting work across threads cannot change any draw.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : eng_(detail::splitmix64(seed ^
                                (0xA0761D6478BD642FULL * (stream + 1)))) {}

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse CDF; exactly one engine call.
  double normal() { return detail::normal_quantile(uniform()); }

 private:
  std::mt19937_64 eng_;
};

// One applicant: composite quality t, observed ability signal, observed
// composite quality. Consumes exactly four normal draws.
struct ApplicantDraw {
  double t;
  double s_tilde;
  double t_tilde;
};

inline ApplicantDraw sample_applicant(const PopulationParams& pop,
                                      const PrincipalPrefs& prefs,
                                      StreamRng& rng) {
  const double f = pop.sigma_f * rng.normal();
  const double s = pop.sigma_s * rng.normal();
  const double ef = pop.sigma_ef * rng.normal();
  const double es = pop.sigma_es * rng.normal();
  const double a = prefs.alpha;
  const double s_tilde = s + es - pop.beta;
  const double f_tilde = f + ef;
  ApplicantDraw d;
  d.t = a * f + (1.0 - a) * s;
  d.s_tilde = s_tilde;
  d.t_tilde = a * f_tilde + (1.0 - a) * s_tilde;
  return d;
}

namespace detail {

inline constexpr std::size_t kSampleChunk = 1 << 16;
inline constexpr std::size_t kTrialChunk = 64;
inline constexpr double kMinAcceptProb = 1e-4;
inline constexpr std::size_t kMinEffective = 100;

struct MomentAcc {
  std::size_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sumsq += x * x;
  }

  void merge(const MomentAcc& o) {
    n += o.n;
    sum += o.sum;
    sumsq += o.sumsq;
  }
};

inline McEstimate finalize(const MomentAcc& acc) {
  McEstimate e;
  e.n_effective = acc.n;
  if (acc.n > 0) {
    e.mean = acc.sum / static_cast<double>(acc.n);
  }
  if (acc.n > 1) {
    const double n = static_cast<double>(acc.n);
    const double var = std::max(0.0, (acc.sumsq - acc.sum * acc.sum / n) / (n - 1.0));
    e.std_error = std::sqrt(var / n);
  }
  return e;
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc != 0 ? hc : 1;
}

// Runs fn(chunk_index) for every chunk. Results must be written into
// per-chunk slots; the caller folds them in index order afterwards, so the
// outcome is identical for any thread count. Worker exceptions are rethrown
// on the calling thread after all workers join.
template <class Fn>
inline void run_chunks(std::size_t n_chunks, unsigned threads, Fn&& fn) {
  const std::size_t n_workers =
      std::min<std::size_t>(std::max(1u, threads), n_chunks);
  if (n_workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::vector<std::exception_ptr> errors(n_workers);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&fn, &errors, w, n_workers, n_chunks] {
      try {
        for (std::size_t c = w; c < n_chunks; c += n_workers) fn(c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline void check_mc_config(const McConfig& cfg, bool trials) {
  if (!trials && cfg.n_samples == 0) {
    throw std::invalid_argument("mc: n_samples must be positive");
  }
  if (trials && (cfg.n_trials == 0 || cfg.k_hires == 0)) {
    throw std::invalid_argument("mc: n_trials and k_hires must be positive");
  }
}

}  // namespace detail

// Rejection-sampling estimate of expected hire quality under delegated
// screening: mean of t over applicants with s_tilde >= tau1. Deterministic
// for a fixed seed regardless of the thread count.
inline McEstimate estimate_delegated(const PopulationParams& pop,
                                     const PrincipalPrefs& prefs,
                                     const DelegatedPolicy& pol,
                                     const McConfig& cfg,
                                     unsigned threads = 0) {
  detail::check_mc_config(cfg, false);
  const double accept = detail::signal_tail(pop, pol.tau1);
  if (accept < detail::kMinAcceptProb) {
    throw insufficient_conditioning_error(
        "estimate_delegated: acceptance probability below 1e-4");
  }

  const std::size_t n_chunks =
      (cfg.n_samples + detail::kSampleChunk - 1) / detail::kSampleChunk;
  std::vector<detail::MomentAcc> parts(n_chunks);
  detail::run_chunks(n_chunks, detail::resolve_threads(threads),
                     [&](std::size_t c) {
                       StreamRng rng(cfg.seed, c);
                       const std::size_t lo = c * detail::kSampleChunk;
                       const std::size_t hi =
                           std::min(lo + detail::kSampleChunk, cfg.n_samples);
                       detail::MomentAcc acc;
                       for (std::size_t i = lo; i < hi; ++i) {
                         const ApplicantDraw d =
                             sample_applicant(pop, prefs, rng);
                         if (d.s_tilde >= pol.tau1) acc.add(d.t);
                       }
                       parts[c] = acc;
                     });

  detail::MomentAcc total;
  for (const detail::MomentAcc& p : parts) total.merge(p);
  if (total.n < detail::kMinEffective) {
    throw insufficient_conditioning_error(
        "estimate_delegated: fewer than 100 accepted samples");
  }
  return detail::finalize(total);
}

struct DirectEstimate {
  McEstimate quality;      // mean t over reviewed applicants passing tau
  McEstimate accept_prob;  // pass rate of the review threshold
};

inline DirectEstimate estimate_direct(const PopulationParams& pop,
                                      const PrincipalPrefs& prefs, double tau,
                                      const McConfig& cfg,
                                      unsigned threads = 0) {
  detail::check_mc_config(cfg, false);
  detail::check_finite(tau, "estimate_direct");
  const QualityScales scales = derive_scales(pop, prefs);
  const double accept =
      cdf_c((tau + quality_bias(pop, prefs)) / scales.sigma_t_tilde);
  if (accept < detail::kMinAcceptProb) {
    throw insufficient_conditioning_error(
        "estimate_direct: acceptance probability below 1e-4");
  }

  const std::size_t n_chunks =
      (cfg.n_samples + detail::kSampleChunk - 1) / detail::kSampleChunk;
  std::vector<detail::MomentAcc> quality_parts(n_chunks);
  std::vector<detail::MomentAcc> accept_parts(n_chunks);
  detail::run_chunks(
      n_chunks, detail::resolve_threads(threads), [&](std::size_t c) {
        StreamRng rng(cfg.seed, c);
        const std::size_t lo = c * detail::kSampleChunk;
        const std::size_t hi =
            std::min(lo + detail::kSampleChunk, cfg.n_samples);
        detail::MomentAcc q;
        detail::MomentAcc a;
        for (std::size_t i = lo; i < hi; ++i) {
          const ApplicantDraw d = sample_applicant(pop, prefs, rng);
          const bool pass = d.t_tilde >= tau;
          a.add(pass ? 1.0 : 0.0);
          if (pass) q.add(d.t);
        }
        quality_parts[c] = q;
        accept_parts[c] = a;
      });

  detail::MomentAcc quality_total;
  detail::MomentAcc accept_total;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    quality_total.merge(quality_parts[c]);
    accept_total.merge(accept_parts[c]);
  }
  if (quality_total.n < detail::kMinEffective) {
    throw insufficient_conditioning_error(
        "estimate_direct: fewer than 100 accepted samples");
  }
  DirectEstimate out;
  out.quality = detail::finalize(quality_total);
  out.accept_prob = detail::finalize(accept_total);
  return out;
}

struct FairnessEstimate {
  McEstimate e_d;      // mean normalized disparity over hiring rounds
  McEstimate e_abs_d;  // mean absolute normalized disparity
};

// Simulates n_trials hiring rounds of k_hires forwarded applicants each and
// averages the normalized group-share disparity. One substream per trial;
// trials are grouped into fixed chunks so the reduction order is independent
// of threading.
inline FairnessEstimate estimate_fairness(const GroupMix& mix,
                                          const DelegatedPolicy& pol,
                                          const McConfig& cfg,
                                          unsigned threads = 0) {
  detail::check_mc_config(cfg, true);
  const double tail_a = detail::signal_tail(mix.pop_a, pol.tau1);
  const double tail_b = detail::signal_tail(mix.pop_b, pol.tau1);
  const double tail_m = mix.lambda_a * tail_a + (1.0 - mix.lambda_a) * tail_b;
  if (tail_m < detail::kMinAcceptProb) {
    throw insufficient_conditioning_error(
        "estimate_fairness: pooled acceptance probability below 1e-4");
  }

  const double sd_a = mix.pop_a.sigma_s_tilde();
  const double sd_b = mix.pop_b.sigma_s_tilde();
  const std::size_t max_draws_per_trial =
      static_cast<std::size_t>(1e7) * cfg.k_hires;

  const std::size_t n_chunks =
      (cfg.n_trials + detail::kTrialChunk - 1) / detail::kTrialChunk;
  std::vector<detail::MomentAcc> d_parts(n_chunks);
  std::vector<detail::MomentAcc> abs_parts(n_chunks);
  detail::run_chunks(
      n_chunks, detail::resolve_threads(threads), [&](std::size_t c) {
        const std::size_t lo = c * detail::kTrialChunk;
        const std::size_t hi =
            std::min(lo + detail::kTrialChunk, cfg.n_trials);
        detail::MomentAcc acc_d;
        detail::MomentAcc acc_abs;
        for (std::size_t trial = lo; trial < hi; ++trial) {
          StreamRng rng(cfg.seed, trial);
          std::size_t hired = 0;
          std::size_t hired_a = 0;
          std::size_t draws = 0;
          while (hired < cfg.k_hires) {
            if (++draws > max_draws_per_trial) {
              throw insufficient_conditioning_error(
                  "estimate_fairness: draw budget exhausted");
            }
            const bool is_a = rng.uniform() < mix.lambda_a;
            const double s_tilde =
                is_a ? (sd_a * rng.normal() - mix.pop_a.beta)
                     : (sd_b * rng.normal() - mix.pop_b.beta);
            if (s_tilde >= pol.tau1) {
              ++hired;
              if (is_a) ++hired_a;
            }
          }
          const double k = static_cast<double>(cfg.k_hires);
          const double share_a = static_cast<double>(hired_a) / k;
          const double share_b =
              static_cast<double>(cfg.k_hires - hired_a) / k;
          const double d =
              share_a / mix.lambda_a - share_b / (1.0 - mix.lambda_a);
          acc_d.add(d);
          acc_abs.add(std::fabs(d));
        }
        d_parts[c] = acc_d;
        abs_parts[c] = acc_abs;
      });

  detail::MomentAcc d_total;
  detail::MomentAcc abs_total;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    d_total.merge(d_parts[c]);
    abs_total.merge(abs_parts[c]);
  }
  FairnessEstimate out;
  out.e_d = detail::finalize(d_total);
  out.e_abs_d = detail::finalize(abs_total);
  return out;
}

}  // namespace dsel
