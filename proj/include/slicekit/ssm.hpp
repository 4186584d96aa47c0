#pragma once
// Truncated local-level state-space model: unconstrained Kalman filter,
// backward-sampling parameters, a filter-based cascade pseudo-target over the
// latent path, a block quantile-slice update, and a sampler comparison demo.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slicekit/diagnostics.hpp"
#include "slicekit/dist.hpp"
#include "slicekit/kernels.hpp"
#include "slicekit/rng.hpp"
#include "slicekit/special.hpp"

namespace slicekit {

// Local-level model with a lower-truncated latent path:
//   alpha_1 ~ N(init_mean, init_var) 1{alpha_1 > lower_bound}
//   alpha_t | alpha_{t-1} ~ N(alpha_{t-1}, evo_rate * (s_t - s_{t-1})) 1{alpha_t > lower_bound}
//   y_t = alpha_t + e_t,  e_t ~ N(0, obs_var)
// lower_bound = -inf gives the untruncated model. Default obs_var and
// evo_rate keep the posterior pressed against the boundary at zero.
struct TruncDLM {
  std::vector<double> times;  // strictly increasing s_1..s_T
  std::vector<double> obs;    // y_1..y_T
  double obs_var = 0.25;
  double init_mean = 0.5;
  double init_var = 1.0;
  double evo_rate = 0.1875;   // evolution variance per unit time
  double lower_bound = 0.0;

  std::size_t T() const { return times.size(); }

  // Evolution variance of the transition into state t (0-based, t >= 1).
  double evo_var(std::size_t t) const { return evo_rate * (times[t] - times[t - 1]); }

  void validate() const {
    if (times.size() < 2) throw std::invalid_argument("TruncDLM: need at least two time points");
    if (obs.size() != times.size()) throw std::invalid_argument("TruncDLM: obs and times lengths differ");
    for (std::size_t t = 1; t < times.size(); ++t)
      if (!(times[t] > times[t - 1])) throw std::invalid_argument("TruncDLM: times must be strictly increasing");
    if (!(obs_var > 0.0)) throw std::domain_error("TruncDLM: obs_var must be positive");
    if (!(init_var > 0.0)) throw std::domain_error("TruncDLM: init_var must be positive");
    if (!(evo_rate >= 0.0)) throw std::domain_error("TruncDLM: evo_rate must be nonnegative");
  }
};

// Filtered moments plus backward-sampling parameters, all ignoring the
// truncation. bs_gain[t] and bs_sd[t] (t = 0..T-2) define the conditional of
// state t given state t+1:
//   N(ff_mean[t] + bs_gain[t] * (alpha_next - ff_mean[t]), bs_sd[t]^2).
// The bs arrays stay empty when any evolution variance is zero, where the
// backward conditional degenerates to a point mass.
struct FFBSParams {
  std::vector<double> ff_mean;
  std::vector<double> ff_sd;
  std::vector<double> bs_gain;
  std::vector<double> bs_sd;

  double bs_mean(std::size_t t, double alpha_next) const {
    return ff_mean[t] + bs_gain[t] * (alpha_next - ff_mean[t]);
  }
};

// Standard linear-Gaussian Kalman recursion on the untruncated model. The
// first state's prior is N(init_mean, init_var) directly; transitions add
// evo_var between observation times.
inline FFBSParams forward_filter(const TruncDLM& m) {
  m.validate();
  const std::size_t T = m.T();
  FFBSParams f;
  f.ff_mean.resize(T);
  f.ff_sd.resize(T);
  std::vector<double> filt_var(T);
  double a = m.init_mean;
  double P = m.init_var;
  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0) {
      a = f.ff_mean[t - 1];
      P = filt_var[t - 1] + m.evo_var(t);
    }
    const double K = P / (P + m.obs_var);
    f.ff_mean[t] = a + K * (m.obs[t] - a);
    filt_var[t] = P * m.obs_var / (P + m.obs_var);
    f.ff_sd[t] = std::sqrt(filt_var[t]);
  }
  bool evo_positive = true;
  for (std::size_t t = 1; t < T; ++t) evo_positive = evo_positive && m.evo_var(t) > 0.0;
  if (evo_positive) {
    f.bs_gain.resize(T - 1);
    f.bs_sd.resize(T - 1);
    for (std::size_t t = 0; t + 1 < T; ++t) {
      const double W = m.evo_var(t + 1);
      const double C = filt_var[t];
      f.bs_gain[t] = C / (C + W);
      f.bs_sd[t] = std::sqrt(C * W / (C + W));
    }
  }
  return f;
}

// Backward-smoothing conditional of state t (0-based, t < T-1) given the
// next state's value.
inline std::pair<double, double> backward_params(const TruncDLM& m, const FFBSParams& ffbs,
                                                 double alpha_next, std::size_t t) {
  if (t + 1 >= m.T()) throw std::out_of_range("backward_params: t must be below T - 1");
  if (ffbs.bs_sd.size() + 1 != m.T())
    throw std::domain_error("backward_params: filter lacks backward scales (zero evolution variance)");
  return {ffbs.bs_mean(t, alpha_next), ffbs.bs_sd[t]};
}

// Log joint density of the latent path (natural time order) up to a constant:
// initial, evolution, and observation terms. The evolution densities are
// normalized truncated normals, so each contributes its own normalizer
// depending on the previous state; the initial state's normalizer is constant
// in the path and dropped. Assumes the path lies inside the support box and
// all evolution variances are positive.
inline double ssm_log_density(const TruncDLM& m, const std::vector<double>& alpha) {
  const std::size_t T = m.T();
  const double obs_sd = std::sqrt(m.obs_var);
  const double init_sd = std::sqrt(m.init_var);
  double lp = log_normal_pdf((alpha[0] - m.init_mean) / init_sd) - std::log(init_sd);
  for (std::size_t t = 1; t < T; ++t) {
    const double sd = std::sqrt(m.evo_var(t));
    lp += log_normal_pdf((alpha[t] - alpha[t - 1]) / sd) - std::log(sd);
    if (std::isfinite(m.lower_bound))
      lp -= std::log(normal_cdf((alpha[t - 1] - m.lower_bound) / sd));
  }
  for (std::size_t t = 0; t < T; ++t)
    lp += log_normal_pdf((m.obs[t] - alpha[t]) / obs_sd) - std::log(obs_sd);
  return lp;
}

// Path posterior as a multivariate target, coordinates in natural time order.
inline VecTarget make_ssm_target(const TruncDLM& m) {
  m.validate();
  for (std::size_t t = 1; t < m.T(); ++t)
    if (!(m.evo_var(t) > 0.0)) throw std::domain_error("ssm target: evolution variances must be positive");
  VecTarget tg;
  tg.log_g = [m](const std::vector<double>& a) { return ssm_log_density(m, a); };
  tg.lo.assign(m.T(), m.lower_bound);
  tg.hi.assign(m.T(), kInf);
  tg.name = "truncated local-level path";
  return tg;
}

namespace detail {

inline std::vector<double> reversed(const std::vector<double>& v) {
  return std::vector<double>(v.rbegin(), v.rend());
}

}  // namespace detail

// Same target with coordinates reversed to the cascade order (last state
// first), matching the pseudo-target below.
inline VecTarget make_ssm_target_cascade(const TruncDLM& m) {
  VecTarget tg = make_ssm_target(m);
  const TruncDLM mc = m;
  tg.log_g = [mc](const std::vector<double>& ac) { return ssm_log_density(mc, detail::reversed(ac)); };
  return tg;
}

// Cascade pseudo-target over the latent path in reverse time order: the
// first coordinate is the filtered marginal of the last state, and each
// later coordinate d conditions on the already-inverted state t+1 through the
// backward-sampling location and scale. Every component is truncated at the
// model's lower bound (untruncated when that is -inf).
inline MultiPseudo cascade_pseudo_from_ffbs(const TruncDLM& m, const FFBSParams& ffbs,
                                            Family family, double df = 5.0) {
  m.validate();
  if (family != Family::Normal && family != Family::StudentT)
    throw std::invalid_argument("cascade pseudo: family must be Normal or StudentT");
  if (!(df > 0.0)) throw std::domain_error("cascade pseudo: df must be positive");
  const std::size_t T = m.T();
  if (ffbs.ff_mean.size() != T || ffbs.bs_sd.size() + 1 != T)
    throw std::domain_error("cascade pseudo: filter output incomplete for this model");
  const double lb = m.lower_bound;
  const FFBSParams f = ffbs;
  return cascade_pseudo(T, [f, T, lb, family, df](const std::vector<double>& prefix, std::size_t d) {
    const std::size_t t = T - 1 - d;
    double loc, sd;
    if (d == 0) {
      loc = f.ff_mean[T - 1];
      sd = f.ff_sd[T - 1];
    } else {
      loc = f.bs_mean(t, prefix[d - 1]);
      sd = f.bs_sd[t];
    }
    return family == Family::Normal ? ScalarDist::normal(loc, sd, lb, kInf)
                                    : ScalarDist::student_t(loc, sd, df, lb, kInf);
  });
}

// Block update of the whole latent path: rebuilds the filter at the current
// hyperparameters, forms the cascade pseudo, and runs one multivariate
// quantile-slice step. alpha_in and the returned state are in natural time
// order; psi[t] is the unit-cube coordinate of state t+1.
template <class RngT>
VecStepRecord qslice_tvp_update(const TruncDLM& m, const std::vector<double>& alpha_in,
                                Family family, RngT& rng, double df = 5.0) {
  m.validate();
  if (alpha_in.size() != m.T())
    throw std::invalid_argument("qslice_tvp_update: state dimension mismatch");
  for (double a : alpha_in)
    if (!(a > m.lower_bound))
      throw std::invalid_argument("qslice_tvp_update: state must lie above the lower bound");
  const FFBSParams ffbs = forward_filter(m);
  const MultiPseudo pseudo = cascade_pseudo_from_ffbs(m, ffbs, family, df);
  const VecTarget target = make_ssm_target_cascade(m);
  VecStepRecord rec = mqslice_step(target, pseudo, detail::reversed(alpha_in), rng);
  std::reverse(rec.state.begin(), rec.state.end());
  std::reverse(rec.psi.begin(), rec.psi.end());
  return rec;
}

// Synthetic data drawn from the model itself with a fixed seed, times 1..T.
inline TruncDLM make_demo_dlm(std::size_t T = 20, std::uint64_t seed = 71) {
  if (T < 2) throw std::invalid_argument("make_demo_dlm: need T >= 2");
  TruncDLM m;
  m.times.resize(T);
  for (std::size_t t = 0; t < T; ++t) m.times[t] = static_cast<double>(t + 1);
  m.obs.resize(T);
  Rng rng(seed, 0);
  const double obs_sd = std::sqrt(m.obs_var);
  double a = ScalarDist::normal(m.init_mean, std::sqrt(m.init_var), m.lower_bound, kInf).sample(rng);
  for (std::size_t t = 0; t < T; ++t) {
    if (t > 0) a = ScalarDist::normal(a, std::sqrt(m.evo_var(t)), m.lower_bound, kInf).sample(rng);
    m.obs[t] = a + obs_sd * rng.normal();
  }
  return m;
}

struct SsmConfig {
  std::size_t T = 20;
  std::int64_t n_iter = 4000;
  std::int64_t burnin = 1000;
  std::size_t n_chains = 2;
  std::uint64_t seed = 71;
  double mslice_width = 1.5;
  double t_df = 5.0;
  // Optional filters ("" = keep all). Variate streams are numbered by the
  // full sampler table, so a filtered run reproduces the unfiltered draws.
  std::string only_sampler;
  std::string only_family;
};

// One comparison row: convergence and efficiency summaries over all chains
// of one sampler configuration, plus pooled posterior means with ESS-based
// standard errors for cross-sampler agreement checks.
struct SsmRow {
  std::string sampler;
  std::string settings;
  double psrf_max = std::numeric_limits<double>::quiet_NaN();
  double esps_mean = 0.0;
  double esps_min = 0.0;
  double mean_evals = 0.0;
  std::vector<double> alpha_hat;
  std::vector<double> alpha_se;
};

struct SsmDemoResult {
  TruncDLM model;
  std::vector<SsmRow> rows;
};

namespace detail {

inline SsmRow summarize_ssm_chains(const std::vector<VecChainResult>& chains,
                                   std::string sampler, std::string settings) {
  SsmRow row;
  row.sampler = std::move(sampler);
  row.settings = std::move(settings);
  const std::size_t T = chains.front().draws.front().size();
  row.alpha_hat.assign(T, 0.0);
  row.alpha_se.assign(T, 0.0);
  double esps_sum = 0.0;
  double esps_low = kInf;
  std::size_t esps_cnt = 0;
  double psrf_high = -kInf;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<std::vector<double>> cols(chains.size());
    double ess_total = 0.0;
    double sum = 0.0;
    double n_all = 0.0;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      cols[c].resize(chains[c].draws.size());
      for (std::size_t i = 0; i < cols[c].size(); ++i) cols[c][i] = chains[c].draws[i][t];
      const double e = ess(cols[c]);
      const double r = esps(e, std::max(chains[c].cpu_seconds, 1e-9));
      ess_total += e;
      esps_sum += r;
      esps_low = std::min(esps_low, r);
      ++esps_cnt;
      for (double v : cols[c]) sum += v;
      n_all += static_cast<double>(cols[c].size());
    }
    if (chains.size() >= 2) psrf_high = std::max(psrf_high, psrf(cols));
    const double mu = sum / n_all;
    double ss = 0.0;
    for (const auto& col : cols)
      for (double v : col) ss += (v - mu) * (v - mu);
    row.alpha_hat[t] = mu;
    row.alpha_se[t] = std::sqrt(ss / (n_all - 1.0)) / std::sqrt(std::max(ess_total, 1.0));
  }
  row.esps_mean = esps_sum / static_cast<double>(esps_cnt);
  row.esps_min = esps_low;
  if (chains.size() >= 2) row.psrf_max = psrf_high;
  double ev = 0.0;
  for (const auto& ch : chains) ev += ch.mean_evals();
  row.mean_evals = ev / static_cast<double>(chains.size());
  return row;
}

}  // namespace detail

// Runs the block samplers against each other on one synthetic data set:
// quantile slice and independence Metropolis-Hastings, each with Normal and
// Student-t cascade pseudos, plus the plain hyperrectangle slice sampler.
// Chains share the data but use distinct variate streams.
inline SsmDemoResult run_ssm_demo(const SsmConfig& cfg) {
  if (cfg.T < 2) throw std::invalid_argument("run_ssm_demo: need T >= 2");
  if (cfg.n_iter < 50) throw std::invalid_argument("run_ssm_demo: need at least 50 kept iterations");
  if (cfg.burnin < 0) throw std::invalid_argument("run_ssm_demo: burnin must be nonnegative");
  if (cfg.n_chains < 1) throw std::invalid_argument("run_ssm_demo: need at least one chain");
  if (!(cfg.mslice_width > 0.0)) throw std::invalid_argument("run_ssm_demo: slice width must be positive");
  SsmDemoResult out;
  out.model = make_demo_dlm(cfg.T, cfg.seed);
  const TruncDLM& m = out.model;
  const std::size_t T = m.T();

  std::vector<double> x_init(T);
  for (std::size_t t = 0; t < T; ++t)
    x_init[t] = std::isfinite(m.lower_bound) ? std::max(m.obs[t], m.lower_bound + 0.25) : m.obs[t];

  const FFBSParams ffbs = forward_filter(m);
  const VecTarget natural = make_ssm_target(m);
  const VecTarget cascade_order = make_ssm_target_cascade(m);

  char width_buf[32];
  std::snprintf(width_buf, sizeof width_buf, "width=%g", cfg.mslice_width);
  enum class Alg { qslice, imh, hyperrect };
  struct Entry {
    std::string sampler;
    std::string settings;
    Alg alg;
    Family family;
  };
  const std::vector<Entry> entries = {
      {"mqslice", "pseudo=normal", Alg::qslice, Family::Normal},
      {"mqslice", "pseudo=t5", Alg::qslice, Family::StudentT},
      {"imh", "pseudo=normal", Alg::imh, Family::Normal},
      {"imh", "pseudo=t5", Alg::imh, Family::StudentT},
      {"mslice", width_buf, Alg::hyperrect, Family::Normal},
  };
  if (!cfg.only_sampler.empty() && cfg.only_sampler != "mqslice" && cfg.only_sampler != "imh" &&
      cfg.only_sampler != "mslice")
    throw std::invalid_argument("run_ssm_demo: unknown sampler '" + cfg.only_sampler +
                                "' (expected mqslice, imh, or mslice)");
  if (!cfg.only_family.empty() && cfg.only_family != "normal" && cfg.only_family != "t5")
    throw std::invalid_argument("run_ssm_demo: unknown pseudo family '" + cfg.only_family +
                                "' (expected normal or t5)");
  auto selected = [&](const Entry& e) {
    if (!cfg.only_sampler.empty() && e.sampler != cfg.only_sampler) return false;
    if (cfg.only_family.empty()) return true;
    const std::string tag = e.alg == Alg::hyperrect ? "" : (e.family == Family::Normal ? "normal" : "t5");
    return tag == cfg.only_family;
  };
  bool any = false;
  for (const Entry& e : entries) any = any || selected(e);
  if (!any)
    throw std::invalid_argument("run_ssm_demo: the sampler/family filters select no configuration");

  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Entry& e = entries[k];
    if (!selected(e)) continue;
    const std::string label = e.sampler + "[" + e.settings + "]";
    std::vector<VecChainResult> chains;
    chains.reserve(cfg.n_chains);
    for (std::size_t c = 0; c < cfg.n_chains; ++c) {
      const std::uint64_t stream = 1 + k * cfg.n_chains + c;
      if (e.alg == Alg::qslice) {
        auto kern = [&m, &e, &cfg](const std::vector<double>& x, Rng& rng) {
          return qslice_tvp_update(m, x, e.family, rng, cfg.t_df);
        };
        chains.push_back(run_chain(kern, x_init, cfg.n_iter, cfg.burnin, cfg.seed, stream, label));
      } else if (e.alg == Alg::imh) {
        const MultiPseudo pseudo = cascade_pseudo_from_ffbs(m, ffbs, e.family, cfg.t_df);
        auto kern = [&cascade_order, pseudo](const std::vector<double>& x, Rng& rng) {
          VecStepRecord rec = mimh_step(cascade_order, pseudo, detail::reversed(x), rng);
          std::reverse(rec.state.begin(), rec.state.end());
          return rec;
        };
        chains.push_back(run_chain(kern, x_init, cfg.n_iter, cfg.burnin, cfg.seed, stream, label));
      } else {
        const std::vector<double> widths(T, cfg.mslice_width);
        auto kern = [&natural, widths](const std::vector<double>& x, Rng& rng) {
          return mslice_hyperrect_step(natural, widths, x, rng);
        };
        chains.push_back(run_chain(kern, x_init, cfg.n_iter, cfg.burnin, cfg.seed, stream, label));
      }
    }
    out.rows.push_back(detail::summarize_ssm_chains(chains, e.sampler, e.settings));
  }
  return out;
}

}  // namespace slicekit
