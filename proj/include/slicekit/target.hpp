#pragma once

// Benchmark targets with ground truth attached: exact CDF for K-S checks,
// an exact sampler for reference draws, and analytic moments where finite.

#include <cmath>
#include <string>
#include <vector>

#include "slicekit/dist.hpp"
#include "slicekit/rng.hpp"

namespace slicekit {

struct TargetSpec {
  UnnormTarget target;
  std::function<double(double)> true_cdf;
  std::function<double(Rng&)> exact_sample;
  double mean = kNaN;  // NaN when the moment does not exist
  double sd = kNaN;
};

inline TargetSpec target_spec(const std::string& name) {
  TargetSpec s;
  s.target = std_target(name);
  if (name == "normal") {
    s.true_cdf = [](double x) { return normal_cdf(x); };
    s.exact_sample = [](Rng& r) { return r.normal(); };
    s.mean = 0.0;
    s.sd = 1.0;
  } else if (name == "gamma2.5") {
    s.true_cdf = [](double x) { return x <= 0.0 ? 0.0 : gamma_p(2.5, x); };
    s.exact_sample = [](Rng& r) { return r.gamma(2.5, 1.0); };
    s.mean = 2.5;
    s.sd = std::sqrt(2.5);
  } else if (name == "invgamma2") {
    s.true_cdf = [](double x) { return x <= 0.0 ? 0.0 : gamma_q(2.0, 1.0 / x); };
    s.exact_sample = [](Rng& r) { return r.inv_gamma(2.0, 1.0); };
    s.mean = 1.0;  // shape 2: variance infinite
    s.sd = kNaN;
  } else if (name == "log-gamma2.5") {
    s.true_cdf = [](double y) { return gamma_p(2.5, std::exp(y)); };
    s.exact_sample = [](Rng& r) { return std::log(r.gamma(2.5, 1.0)); };
    s.mean = 0.7031566406452432;   // digamma(2.5)
    s.sd = 0.7002554934452389;     // sqrt(trigamma(2.5))
  } else if (name == "log-invgamma2") {
    s.true_cdf = [](double y) { return gamma_q(2.0, std::exp(-y)); };
    s.exact_sample = [](Rng& r) { return std::log(r.inv_gamma(2.0, 1.0)); };
    s.mean = -0.42278433509846713;  // -digamma(2)
    s.sd = 0.8030778709740586;      // sqrt(trigamma(2))
  } else {
    throw std::out_of_range("target_spec: unknown target '" + name + "'");
  }
  return s;
}

inline std::vector<std::string> std_target_names() {
  return {"normal", "gamma2.5", "invgamma2", "log-gamma2.5", "log-invgamma2"};
}

}  // namespace slicekit
