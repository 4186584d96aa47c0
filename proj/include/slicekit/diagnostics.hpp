#pragma once
// Chain quality metrics: effective sample size from an AR spectral fit,
// effective samples per second, Kolmogorov-Smirnov goodness of fit, and the
// Gelman-Rubin potential scale reduction factor (upper 95% bound).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicekit/special.hpp"

namespace slicekit {

struct KsResult {
  double D = 0.0;
  double p = 1.0;
};

struct DiagnosticsReport {
  double ess = 0.0;
  double esps = 0.0;
  double ks_D = 0.0;
  double ks_p = 1.0;
  double psrf_upper95 = std::numeric_limits<double>::quiet_NaN();  // multi-chain only
  std::size_t n = 0;
  std::string kernel_label;
};

// Effective sample size S * Var / v0 where v0 is the AR spectral density at
// frequency zero: sigma2 / (1 - sum phi)^2.  The AR order is chosen by AIC
// (S * log sigma2_R + 2(R+1)) over R in [0, 10*log10(S)], with coefficients
// from the Levinson-Durbin recursion on the sample autocovariances.
inline double ess(const std::vector<double>& series) {
  const std::size_t S = series.size();
  if (S < 50) throw std::invalid_argument("ess: need at least 50 points, got " + std::to_string(S));
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= double(S);

  const auto r_max = std::min(std::size_t(10.0 * std::log10(double(S))), S / 2 - 1);
  std::vector<double> c(r_max + 1, 0.0);
  for (std::size_t k = 0; k <= r_max; ++k) {
    double s = 0.0;
    for (std::size_t t = k; t < S; ++t) s += (series[t] - mean) * (series[t - k] - mean);
    c[k] = s / double(S);
  }
  if (!(c[0] > 0.0)) throw std::runtime_error("ess: series is constant");
  const double var = c[0] * double(S) / double(S - 1);

  std::vector<double> phi, best_phi, prev;
  double sigma2 = c[0];
  double best_sigma2 = sigma2;
  double best_aic = double(S) * std::log(sigma2) + 2.0;
  for (std::size_t k = 1; k <= r_max; ++k) {
    double num = c[k];
    for (std::size_t j = 1; j < k; ++j) num -= phi[j - 1] * c[k - j];
    const double kappa = num / sigma2;
    prev = phi;
    phi.resize(k);
    phi[k - 1] = kappa;
    for (std::size_t j = 0; j + 1 < k; ++j) phi[j] = prev[j] - kappa * prev[k - 2 - j];
    sigma2 *= (1.0 - kappa * kappa);
    if (!(sigma2 > 0.0)) break;
    const double aic = double(S) * std::log(sigma2) + 2.0 * double(k + 1);
    if (aic < best_aic) {
      best_aic = aic;
      best_sigma2 = sigma2;
      best_phi = phi;
    }
  }

  double phi_sum = 0.0;
  for (double p : best_phi) phi_sum += p;
  const double denom = (1.0 - phi_sum) * (1.0 - phi_sum);
  if (!(denom > 0.0)) return 0.0;
  const double v0 = best_sigma2 / denom;
  return double(S) * var / v0;
}

inline double esps(double ess_value, double cpu_seconds) {
  if (!(cpu_seconds > 0.0)) throw std::domain_error("esps: cpu_seconds must be positive");
  return ess_value / cpu_seconds;
}

// One-sided sweep over the sorted samples gives the exact one-sample
// sup-distance.  P-values: exact finite-n null below n = 35, the asymptotic
// Kolmogorov series (100 terms) at sqrt(n)*D from there up.
template <class Cdf>
KsResult ks_test(const std::vector<double>& samples, Cdf&& cdf) {
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("ks_test: need at least one sample");
  std::vector<double> xs(samples);
  for (double x : xs) {
    if (std::isnan(x)) throw std::domain_error("ks_test: NaN sample");
  }
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(xs[i]);
    if (std::isnan(f)) throw std::domain_error("ks_test: cdf returned NaN");
    d = std::max(d, std::max(double(i + 1) / double(n) - f, f - double(i) / double(n)));
  }
  KsResult out;
  out.D = d;
  out.p = n >= 35 ? kolmogorov_q(std::sqrt(double(n)) * d) : 1.0 - ks_exact_cdf(int(n), d);
  return out;
}

// Gelman-Rubin potential scale reduction factor, upper bound of the 95%
// interval, with the degrees-of-freedom adjustment for sampling variability
// of the pooled variance estimate.
inline double psrf(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw std::invalid_argument("psrf: need at least 2 chains");
  const std::size_t n = chains.front().size();
  for (const auto& ch : chains) {
    if (ch.size() != n) throw std::invalid_argument("psrf: chains must have equal length");
  }
  if (n < 50) throw std::invalid_argument("psrf: chains must have at least 50 draws");

  std::vector<double> xbar(m), s2(m);
  for (std::size_t j = 0; j < m; ++j) {
    double mu = 0.0;
    for (double x : chains[j]) mu += x;
    mu /= double(n);
    double ss = 0.0;
    for (double x : chains[j]) ss += (x - mu) * (x - mu);
    xbar[j] = mu;
    s2[j] = ss / double(n - 1);
  }
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
  };
  auto cov_of = [&](const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean_of(a), mb = mean_of(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / double(a.size() - 1);
  };

  const double W = mean_of(s2);
  if (!(W > 0.0)) throw std::runtime_error("psrf: all chains are constant");
  const double B = double(n) * cov_of(xbar, xbar);
  const double muhat = mean_of(xbar);
  const double sig2 = (double(n) - 1.0) / double(n) * W + B / double(n);
  const double Vhat = sig2 + B / double(m * n);

  const double var_w = cov_of(s2, s2) / double(m);
  const double var_b = 2.0 * B * B / double(m - 1);
  std::vector<double> xbar2(m);
  for (std::size_t j = 0; j < m; ++j) xbar2[j] = xbar[j] * xbar[j];
  const double cov_wb =
      (double(n) / double(m)) * (cov_of(s2, xbar2) - 2.0 * muhat * cov_of(s2, xbar));
  const double var_V = ((double(n) - 1.0) * (double(n) - 1.0) * var_w +
                        std::pow((1.0 + 1.0 / double(m)), 2) * var_b +
                        2.0 * (double(n) - 1.0) * (1.0 + 1.0 / double(m)) * cov_wb) /
                       (double(n) * double(n));

  double df_adj = 1.0;
  if (var_V > 0.0 && std::isfinite(var_V)) {
    const double df_V = 2.0 * Vhat * Vhat / var_V;
    df_adj = (df_V + 3.0) / (df_V + 1.0);
  }
  const double r2_fixed = (double(n) - 1.0) / double(n);
  const double r2_random = (1.0 + 1.0 / double(m)) * B / (double(n) * W);
  // W_df grows without bound as the chain variances agree; the F quantile is
  // flat in that regime, so cap it to keep the inverse incomplete beta stable.
  const double w_df = var_w > 0.0 ? std::min(2.0 * W * W / var_w, 1e6) : 1e6;
  const double r2_upper = r2_fixed + f_quantile(0.975, double(m - 1), w_df) * r2_random;
  return std::sqrt(df_adj * r2_upper);
}

// Per-chain report: spectral ESS on the full series, K-S on a thinned copy.
template <class Cdf>
DiagnosticsReport diagnose(const std::vector<double>& series, double cpu_seconds, Cdf&& cdf,
                           const std::string& kernel_label, std::size_t thin = 10) {
  if (thin == 0) throw std::invalid_argument("diagnose: thin must be positive");
  DiagnosticsReport rep;
  rep.n = series.size();
  rep.kernel_label = kernel_label;
  rep.ess = ess(series);
  rep.esps = esps(rep.ess, cpu_seconds);
  std::vector<double> thinned;
  thinned.reserve(series.size() / thin);
  for (std::size_t i = thin - 1; i < series.size(); i += thin) thinned.push_back(series[i]);
  const KsResult ks = ks_test(thinned, cdf);
  rep.ks_D = ks.D;
  rep.ks_p = ks.p;
  return rep;
}

}  // namespace slicekit
