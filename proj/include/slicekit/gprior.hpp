#pragma once
// Bayesian linear regression with the hyper-g shrinkage prior: conjugate
// Gibbs updates for the coefficients and error variance, a pluggable kernel
// for the shrinkage weight gamma (natural or log scale), an analytic
// Laplace pseudo-target, and an adaptive tuning race that picks scalar
// kernel parameters by measured effective samples per second.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slicekit/diagnostics.hpp"
#include "slicekit/dist.hpp"
#include "slicekit/kernels.hpp"
#include "slicekit/linalg.hpp"
#include "slicekit/pseudo.hpp"
#include "slicekit/rng.hpp"

namespace slicekit {

// Motor Trend road-test table: 32 cars, fuel economy (mpg) plus ten design
// and performance covariates. Embedded so the example needs no external
// data files.
inline constexpr const char* kRoadTestCsv =
    "model,mpg,cyl,disp,hp,drat,wt,qsec,vs,am,gear,carb\n"
    "Mazda RX4,21.0,6,160.0,110,3.90,2.620,16.46,0,1,4,4\n"
    "Mazda RX4 Wag,21.0,6,160.0,110,3.90,2.875,17.02,0,1,4,4\n"
    "Datsun 710,22.8,4,108.0,93,3.85,2.320,18.61,1,1,4,1\n"
    "Hornet 4 Drive,21.4,6,258.0,110,3.08,3.215,19.44,1,0,3,1\n"
    "Hornet Sportabout,18.7,8,360.0,175,3.15,3.440,17.02,0,0,3,2\n"
    "Valiant,18.1,6,225.0,105,2.76,3.460,20.22,1,0,3,1\n"
    "Duster 360,14.3,8,360.0,245,3.21,3.570,15.84,0,0,3,4\n"
    "Merc 240D,24.4,4,146.7,62,3.69,3.190,20.00,1,0,4,2\n"
    "Merc 230,22.8,4,140.8,95,3.92,3.150,22.90,1,0,4,2\n"
    "Merc 280,19.2,6,167.6,123,3.92,3.440,18.30,1,0,4,4\n"
    "Merc 280C,17.8,6,167.6,123,3.92,3.440,18.90,1,0,4,4\n"
    "Merc 450SE,16.4,8,275.8,180,3.07,4.070,17.40,0,0,3,3\n"
    "Merc 450SL,17.3,8,275.8,180,3.07,3.730,17.60,0,0,3,3\n"
    "Merc 450SLC,15.2,8,275.8,180,3.07,3.780,18.00,0,0,3,3\n"
    "Cadillac Fleetwood,10.4,8,472.0,205,2.93,5.250,17.98,0,0,3,4\n"
    "Lincoln Continental,10.4,8,460.0,215,3.00,5.424,17.82,0,0,3,4\n"
    "Chrysler Imperial,14.7,8,440.0,230,3.23,5.345,17.42,0,0,3,4\n"
    "Fiat 128,32.4,4,78.7,66,4.08,2.200,19.47,1,1,4,1\n"
    "Honda Civic,30.4,4,75.7,52,4.93,1.615,18.52,1,1,4,2\n"
    "Toyota Corolla,33.9,4,71.1,65,4.22,1.835,19.90,1,1,4,1\n"
    "Toyota Corona,21.5,4,120.1,97,3.70,2.465,20.01,1,0,3,1\n"
    "Dodge Challenger,15.5,8,318.0,150,2.76,3.520,16.87,0,0,3,2\n"
    "AMC Javelin,15.2,8,304.0,150,3.15,3.435,17.30,0,0,3,2\n"
    "Camaro Z28,13.3,8,350.0,245,3.73,3.840,15.41,0,0,3,4\n"
    "Pontiac Firebird,19.2,8,400.0,175,3.08,3.845,17.05,0,0,3,2\n"
    "Fiat X1-9,27.3,4,79.0,66,4.08,1.935,18.90,1,1,4,1\n"
    "Porsche 914-2,26.0,4,120.3,91,4.43,2.140,16.70,0,1,5,2\n"
    "Lotus Europa,30.4,4,95.1,113,3.77,1.513,16.90,1,1,5,2\n"
    "Ford Pantera L,15.8,8,351.0,264,4.22,3.170,14.50,0,1,5,4\n"
    "Ferrari Dino,19.7,6,145.0,175,3.62,2.770,15.50,0,1,5,6\n"
    "Maserati Bora,15.0,8,301.0,335,3.54,3.570,14.60,0,1,5,8\n"
    "Volvo 142E,21.4,4,121.0,109,4.11,2.780,18.60,1,1,4,2\n";

struct GPriorModel {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> X;  // n x p, row-major, columns centered and scaled
  std::vector<double> y;  // centered and scaled response
  double a = 3.0;         // hyper-g exponent
  double ig_shape = 2.5;  // sigma^2 inverse-gamma prior shape
  double ig_scale = 0.4;  // sigma^2 inverse-gamma prior scale
  double gamma_bound = 0.0;  // truncation 3 p^2
  long extra_cost = 0;       // superfluous p x p matrix products per target eval

  std::vector<double> xtx;       // X^T X, p x p
  std::vector<double> xtx_chol;  // lower Cholesky factor of X^T X
  std::vector<double> beta_hat;  // least-squares coefficients

  // Workspace for the artificial cost loop; the sink keeps the products
  // observable so the loop cannot be optimized away.
  mutable std::vector<double> cost_a, cost_b, cost_c;
  mutable double cost_sink = 0.0;
};

inline GPriorModel make_gprior_model(long extra_cost = 0) {
  std::vector<std::vector<double>> cols(11);
  std::istringstream in(kRoadTestCsv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');  // model name
    for (auto& col : cols) {
      if (!std::getline(row, field, ',')) throw std::runtime_error("road-test table: short row");
      col.push_back(std::stod(field));
    }
  }
  const std::size_t n = cols[0].size();
  const std::size_t p = cols.size() - 1;
  for (auto& col : cols) {
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= double(n);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / double(n - 1));
    if (!(sd > 0.0)) throw std::runtime_error("road-test table: constant column");
    for (double& v : col) v = (v - mean) / sd;
  }

  GPriorModel m;
  m.n = n;
  m.p = p;
  m.extra_cost = extra_cost;
  m.gamma_bound = 3.0 * double(p) * double(p);
  m.y = cols[0];
  m.X.resize(n * p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) m.X[i * p + j] = cols[j + 1][i];

  m.xtx.assign(p * p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = j; k < p; ++k) m.xtx[j * p + k] += m.X[i * p + j] * m.X[i * p + k];
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) m.xtx[j * p + k] = m.xtx[k * p + j];
  m.xtx_chol = detail::cholesky_lower(m.xtx, p);

  std::vector<double> xty(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) xty[j] += m.X[i * p + j] * m.y[i];
  m.beta_hat = detail::chol_solve(m.xtx_chol, p, std::move(xty));

  m.cost_a.resize(p * p);
  m.cost_b.resize(p * p);
  m.cost_c.assign(p * p, 0.0);
  for (std::size_t i = 0; i < p * p; ++i) {
    m.cost_a[i] = 0.25 + 1e-3 * double(i);
    m.cost_b[i] = 0.75 - 1e-3 * double(i);
  }
  return m;
}

inline double quad_form(const GPriorModel& m, const std::vector<double>& beta) {
  if (beta.size() != m.p) throw std::invalid_argument("quad_form: beta has wrong length");
  double s = 0.0;
  for (std::size_t i = 0; i < m.p; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.p; ++j) row += m.xtx[i * m.p + j] * beta[j];
    s += beta[i] * row;
  }
  return s;
}

namespace detail {

inline void burn_extra_cost(const GPriorModel& m) {
  const std::size_t p = m.p;
  for (long k = 0; k < m.extra_cost; ++k) {
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < p; ++l) s += m.cost_a[i * p + l] * m.cost_b[l * p + j];
        m.cost_c[i * p + j] = s;
      }
    }
    // Feeding the product back into the next input defeats loop hoisting.
    m.cost_a[std::size_t(k) % (p * p)] += 1e-300 * m.cost_c[std::size_t(k) % (p * p)];
  }
  if (m.extra_cost > 0) m.cost_sink += m.cost_c[0];
}

}  // namespace detail

// Log full conditional of gamma: -(p/2) log g - (a/2) log(1+g) - B/(2 s2 g)
// on 0 < g < 3p^2 with B = beta' X'X beta, minus infinity outside.
inline double log_fc_gamma(const GPriorModel& m, const std::vector<double>& beta, double sigma2,
                           double gamma) {
  if (!(sigma2 > 0.0)) throw std::domain_error("log_fc_gamma: sigma2 must be positive");
  if (!(gamma > 0.0 && gamma < m.gamma_bound)) return -kInf;
  detail::burn_extra_cost(m);
  const double B = quad_form(m, beta);
  return -0.5 * double(m.p) * std::log(gamma) - 0.5 * m.a * std::log1p(gamma) -
         B / (2.0 * sigma2 * gamma);
}

// First two derivatives of the log full conditional in gamma.
inline double fc_gamma_d1(const GPriorModel& m, const std::vector<double>& beta, double sigma2,
                          double gamma) {
  const double B = quad_form(m, beta);
  return B / (2.0 * sigma2 * gamma * gamma) - 0.5 * m.a / (1.0 + gamma) -
         0.5 * double(m.p) / gamma;
}

inline double fc_gamma_d2(const GPriorModel& m, const std::vector<double>& beta, double sigma2,
                          double gamma) {
  const double B = quad_form(m, beta);
  return -B / (sigma2 * gamma * gamma * gamma) + 0.5 * m.a / ((1.0 + gamma) * (1.0 + gamma)) +
         0.5 * double(m.p) / (gamma * gamma);
}

template <class RngT>
std::vector<double> gibbs_beta(const GPriorModel& m, double sigma2, double gamma, RngT& rng) {
  if (!(sigma2 > 0.0) || !(gamma > 0.0))
    throw std::domain_error("gibbs_beta: sigma2 and gamma must be positive");
  const double shrink = gamma / (1.0 + gamma);
  const double sd = std::sqrt(shrink * sigma2);
  std::vector<double> z(m.p);
  for (auto& v : z) v = rng.normal();
  std::vector<double> w = detail::upper_solve(m.xtx_chol, m.p, std::move(z));
  std::vector<double> beta(m.p);
  for (std::size_t i = 0; i < m.p; ++i) beta[i] = shrink * m.beta_hat[i] + sd * w[i];
  return beta;
}

template <class RngT>
double gibbs_sigma2(const GPriorModel& m, const std::vector<double>& beta, double gamma,
                    RngT& rng) {
  if (!(gamma > 0.0)) throw std::domain_error("gibbs_sigma2: gamma must be positive");
  double rss = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    double fit = 0.0;
    for (std::size_t j = 0; j < m.p; ++j) fit += m.X[i * m.p + j] * beta[j];
    const double e = m.y[i] - fit;
    rss += e * e;
  }
  const double shape = m.ig_shape + 0.5 * double(m.n + m.p);
  const double rate = m.ig_scale + 0.5 * rss + quad_form(m, beta) / (2.0 * gamma);
  return 1.0 / rng.gamma(shape, rate);
}

// Analytic Laplace pseudo-target for gamma: the stationary point solves
// (a+p) g^2 - (b-p) g - b = 0 with b = B / sigma2 (the larger root), and the
// scale is the inverse square root of the negated curvature there. The wide
// variant inflates the scale by 50%.
inline ScalarDist laplace_gamma(const GPriorModel& m, const std::vector<double>& beta,
                                double sigma2, double df = 1.0, bool wide = false) {
  if (!(sigma2 > 0.0)) throw std::domain_error("laplace_gamma: sigma2 must be positive");
  const double B = quad_form(m, beta);
  if (!(B > 0.0)) throw std::invalid_argument("laplace_gamma: beta'X'X beta must be positive");
  const double b = B / sigma2;
  const double p = double(m.p);
  const double qa = m.a + p;
  const double qb = -(b - p);
  const double qc = -b;
  const double disc = qb * qb - 4.0 * qa * qc;
  const double ghat = (-qb + std::sqrt(disc)) / (2.0 * qa);
  if (!(ghat > 0.0)) throw std::runtime_error("laplace_gamma: no positive stationary point");
  const double ldd = fc_gamma_d2(m, beta, sigma2, ghat);
  if (!(ldd < 0.0)) throw std::runtime_error("laplace_gamma: stationary point is not a maximum");
  double scale = 1.0 / std::sqrt(-ldd);
  if (wide) scale *= 1.5;
  return ScalarDist::student_t(ghat, scale, df, 0.0, m.gamma_bound);
}

// Laplace pseudo-target for log(gamma). The Jacobian-adjusted stationary
// point solves (a+p-2) g^2 - (b-p+2) g - b = 0 in g = exp(location); the
// wide variant inflates the scale by 20%.
inline ScalarDist laplace_log_gamma(const GPriorModel& m, const std::vector<double>& beta,
                                    double sigma2, double df = 1.0, bool wide = false) {
  if (!(sigma2 > 0.0)) throw std::domain_error("laplace_log_gamma: sigma2 must be positive");
  const double B = quad_form(m, beta);
  if (!(B > 0.0)) throw std::invalid_argument("laplace_log_gamma: beta'X'X beta must be positive");
  const double b = B / sigma2;
  const double p = double(m.p);
  const double qa = m.a + p - 2.0;
  if (!(qa > 0.0)) throw std::runtime_error("laplace_log_gamma: needs a + p > 2");
  const double qb = -(b - p + 2.0);
  const double qc = -b;
  const double ghat = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
  if (!(ghat > 0.0)) throw std::runtime_error("laplace_log_gamma: no positive stationary point");
  const double d2 = -0.5 * b / ghat - 0.5 * m.a * ghat / ((1.0 + ghat) * (1.0 + ghat));
  double scale = 1.0 / std::sqrt(-d2);
  if (wide) scale *= 1.2;
  return ScalarDist::student_t(std::log(ghat), scale, df, -kInf, std::log(m.gamma_bound));
}

enum class GammaKernel { rwm, stepout, latent, gess, imh, qslice };
enum class GammaPseudo { none, laplace, laplace_wide, auc_samples };

inline const char* to_string(GammaKernel k) {
  switch (k) {
    case GammaKernel::rwm: return "rwm";
    case GammaKernel::stepout: return "stepout";
    case GammaKernel::latent: return "latent";
    case GammaKernel::gess: return "gess";
    case GammaKernel::imh: return "imh";
    case GammaKernel::qslice: return "qslice";
  }
  return "?";
}

inline const char* to_string(GammaPseudo p) {
  switch (p) {
    case GammaPseudo::none: return "none";
    case GammaPseudo::laplace: return "laplace";
    case GammaPseudo::laplace_wide: return "laplace-wide";
    case GammaPseudo::auc_samples: return "auc-samples";
  }
  return "?";
}

struct TuneRound {
  std::array<double, 5> values{};
  std::array<double, 5> esps{};
  std::size_t winner = 0;
};

struct GPriorConfig {
  GammaKernel kernel = GammaKernel::stepout;
  GammaPseudo pseudo = GammaPseudo::none;
  bool log_scale = false;
  std::int64_t n_iter = 50000;
  std::int64_t burnin = 10000;
  double laplace_df = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

struct GPriorRun {
  std::vector<double> gamma;  // timing-phase draws, natural scale
  std::vector<double> psi;    // probability-scale draws where the kernel has them
  double cpu_seconds = 0.0;
  double mean_evals = 0.0;
  double ess_value = 0.0;
  double esps_value = 0.0;
  double tuned_param = 0.0;                // winning c / w / r after the race
  std::optional<ScalarDist> pseudo_dist;   // fixed pseudo on the sampled scale
  std::vector<TuneRound> tune_trace;
  std::string kernel_label;
};

namespace detail {

struct GibbsState {
  std::vector<double> beta;
  double sigma2 = 1.0;
  double gamma = 10.0;
};

inline UnnormTarget gamma_fc_target(const GPriorModel& m, const GibbsState& st, bool log_scale) {
  if (log_scale) {
    return UnnormTarget{[&m, &st](double ups) {
                          return log_fc_gamma(m, st.beta, st.sigma2, std::exp(ups)) + ups;
                        },
                        -kInf, std::log(m.gamma_bound), "log-gamma-fc"};
  }
  return UnnormTarget{[&m, &st](double g) { return log_fc_gamma(m, st.beta, st.sigma2, g); }, 0.0,
                      m.gamma_bound, "gamma-fc"};
}

// One gamma transition under the configured kernel. x0 is on the sampled
// scale (gamma or log gamma).
struct GammaStepper {
  const GPriorModel* model = nullptr;
  GammaKernel kernel = GammaKernel::stepout;
  GammaPseudo pseudo = GammaPseudo::none;
  bool log_scale = false;
  double param = 0.0;      // rwm c / stepout w / latent r
  double aux_width = 1.0;  // latent slice carried state
  double laplace_df = 1.0;
  std::optional<ScalarDist> fixed_pseudo;

  ScalarDist current_pseudo(const GibbsState& st) const {
    ScalarDist d = [&] {
      switch (pseudo) {
        case GammaPseudo::auc_samples:
          return *fixed_pseudo;
        case GammaPseudo::laplace:
        case GammaPseudo::laplace_wide: {
          const bool wide = pseudo == GammaPseudo::laplace_wide;
          return log_scale ? laplace_log_gamma(*model, st.beta, st.sigma2, laplace_df, wide)
                           : laplace_gamma(*model, st.beta, st.sigma2, laplace_df, wide);
        }
        default:
          throw std::logic_error("gamma stepper: kernel needs a pseudo-target");
      }
    }();
    // The elliptical kernel requires an untruncated t; off-support candidates
    // are rejected through the slice instead.
    if (kernel == GammaKernel::gess) return ScalarDist::student_t(d.location, d.scale, d.df);
    return d;
  }

  template <class RngT>
  StepRecord step(const GibbsState& st, double x0, RngT& rng) {
    const UnnormTarget t = gamma_fc_target(*model, st, log_scale);
    switch (kernel) {
      case GammaKernel::rwm: return rwm_step(t, param, x0, rng);
      case GammaKernel::stepout: return stepout_slice_step(t, param, x0, rng);
      case GammaKernel::latent: return latent_slice_step(t, param, aux_width, x0, rng);
      case GammaKernel::gess: return gess_step(t, current_pseudo(st), x0, rng);
      case GammaKernel::imh: return imh_step(t, current_pseudo(st), x0, rng);
      case GammaKernel::qslice: return qslice_step(t, current_pseudo(st), x0, rng);
    }
    throw std::logic_error("gamma stepper: unknown kernel");
  }
};

}  // namespace detail

// Full Gibbs run: 10k-style burn-in with a stepping-out gamma update, then
// either an adaptive five-round tuning race (scalar-parameter kernels) or a
// pseudo-target fit from the final 2000 burn-in draws (sample-based route),
// then the timed phase with the configured kernel.
inline GPriorRun run_gprior(const GPriorModel& m, const GPriorConfig& cfg) {
  const bool needs_pseudo = cfg.kernel == GammaKernel::gess || cfg.kernel == GammaKernel::imh ||
                            cfg.kernel == GammaKernel::qslice;
  if (needs_pseudo && cfg.pseudo == GammaPseudo::none)
    throw std::invalid_argument("run_gprior: this kernel requires a pseudo-target method");
  if (!needs_pseudo && cfg.pseudo != GammaPseudo::none)
    throw std::invalid_argument("run_gprior: pseudo-target method given for a kernel that takes none");
  if (cfg.n_iter <= 0 || cfg.burnin <= 0)
    throw std::invalid_argument("run_gprior: iteration counts must be positive");

  Rng rng(cfg.seed, cfg.stream);
  detail::GibbsState st;
  st.beta.assign(m.p, 0.0);
  st.sigma2 = 1.0;
  st.gamma = 10.0;

  GPriorRun out;
  out.kernel_label = std::string(to_string(cfg.kernel)) +
                     (needs_pseudo ? std::string("(") + to_string(cfg.pseudo) + ")" : "") +
                     (cfg.log_scale ? " log" : "");

  auto sweep_conjugate = [&](std::int64_t iter) {
    try {
      st.beta = gibbs_beta(m, st.sigma2, st.gamma, rng);
      st.sigma2 = gibbs_sigma2(m, st.beta, st.gamma, rng);
    } catch (const std::exception& e) {
      throw KernelError("gprior conjugate update failed at iteration " + std::to_string(iter) +
                        ": " + e.what());
    }
  };

  // Burn-in: stepping-out update for gamma, wide enough to traverse the
  // truncation region on either scale.
  const double burn_w = cfg.log_scale ? 2.0 : 10.0;
  const std::int64_t tail_len = std::min<std::int64_t>(2000, cfg.burnin);
  std::vector<double> tail;
  tail.reserve(std::size_t(tail_len));
  double x = cfg.log_scale ? std::log(st.gamma) : st.gamma;
  for (std::int64_t i = 0; i < cfg.burnin; ++i) {
    sweep_conjugate(i);
    const UnnormTarget t = detail::gamma_fc_target(m, st, cfg.log_scale);
    try {
      x = stepout_slice_step(t, burn_w, x, rng).state;
    } catch (const std::exception& e) {
      throw KernelError("gprior burn-in failed at iteration " + std::to_string(i) + ": " +
                        e.what());
    }
    st.gamma = cfg.log_scale ? std::exp(x) : x;
    if (i >= cfg.burnin - tail_len) tail.push_back(x);
  }

  detail::GammaStepper stepper;
  stepper.model = &m;
  stepper.kernel = cfg.kernel;
  stepper.pseudo = cfg.pseudo;
  stepper.log_scale = cfg.log_scale;
  stepper.laplace_df = cfg.laplace_df;

  if (cfg.pseudo == GammaPseudo::auc_samples) {
    std::vector<double> sorted(tail);
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double u) { return sorted[std::size_t(u * double(sorted.size() - 1))]; };
    const double iqr = std::max(q(0.75) - q(0.25), 1e-6);
    StudentTGrid grid;
    grid.loc_lo = q(0.05);
    grid.loc_hi = q(0.95);
    grid.scale_lo = 0.1 * iqr;
    grid.scale_hi = 5.0 * iqr;
    grid.trunc_lo = cfg.log_scale ? -kInf : 0.0;
    grid.trunc_hi = cfg.log_scale ? std::log(m.gamma_bound) : m.gamma_bound;
    const PseudoFit fit = optimize_pseudo(tail, grid, Criterion::auc);
    stepper.fixed_pseudo = fit.dist;
    out.pseudo_dist = fit.dist;
  }

  // Adaptive tuning race for scalar-parameter kernels: five rounds of five
  // candidate values, 1000 iterations each; the winner seeds the next round
  // and the surviving values span half the previous round's (log) range.
  const bool scalar_kernel = cfg.kernel == GammaKernel::rwm ||
                             cfg.kernel == GammaKernel::stepout ||
                             cfg.kernel == GammaKernel::latent;
  if (scalar_kernel) {
    double center = [&] {
      switch (cfg.kernel) {
        case GammaKernel::rwm: return cfg.log_scale ? 1.0 : 5.0;
        case GammaKernel::stepout: return cfg.log_scale ? 2.0 : 10.0;
        default: return cfg.log_scale ? 0.5 : 0.05;  // latent rate
      }
    }();
    double span = std::log(8.0);
    for (int round = 0; round < 5; ++round) {
      TuneRound tr;
      for (int v = 0; v < 5; ++v)
        tr.values[std::size_t(v)] = center * std::exp(span * (double(v) - 2.0) / 2.0);
      for (int v = 0; v < 5; ++v) {
        stepper.param = tr.values[std::size_t(v)];
        std::vector<double> block;
        block.reserve(1000);
        const double t0 = thread_cpu_seconds();
        for (std::int64_t i = 0; i < 1000; ++i) {
          sweep_conjugate(i);
          x = stepper.step(st, x, rng).state;
          st.gamma = cfg.log_scale ? std::exp(x) : x;
          block.push_back(st.gamma);
        }
        const double dt = std::max(thread_cpu_seconds() - t0, 1e-9);
        double block_ess = 0.0;
        try {
          block_ess = ess(block);
        } catch (const std::exception&) {
          block_ess = 0.0;  // stuck chain: zero effective draws
        }
        tr.esps[std::size_t(v)] = block_ess / dt;
        if (tr.esps[std::size_t(v)] > tr.esps[tr.winner]) tr.winner = std::size_t(v);
      }
      center = tr.values[tr.winner];
      span *= 0.5;
      out.tune_trace.push_back(tr);
    }
    stepper.param = center;
    out.tuned_param = center;
  }

  // Timed phase.
  out.gamma.reserve(std::size_t(cfg.n_iter));
  std::vector<std::int64_t> evals;
  evals.reserve(std::size_t(cfg.n_iter));
  const double t0 = thread_cpu_seconds();
  for (std::int64_t i = 0; i < cfg.n_iter; ++i) {
    sweep_conjugate(i);
    StepRecord rec;
    try {
      rec = stepper.step(st, x, rng);
    } catch (const std::exception& e) {
      throw KernelError("gprior kernel '" + out.kernel_label + "' failed at timing iteration " +
                        std::to_string(i) + ": " + e.what());
    }
    x = rec.state;
    st.gamma = cfg.log_scale ? std::exp(x) : x;
    out.gamma.push_back(st.gamma);
    if (rec.has_psi) out.psi.push_back(rec.psi);
    evals.push_back(rec.n_target_evals);
  }
  out.cpu_seconds = thread_cpu_seconds() - t0;

  double esum = 0.0;
  for (std::int64_t e : evals) esum += double(e);
  out.mean_evals = evals.empty() ? 0.0 : esum / double(evals.size());
  out.ess_value = ess(out.gamma);
  out.esps_value = esps(out.ess_value, std::max(out.cpu_seconds, 1e-9));
  return out;
}

}  // namespace slicekit
