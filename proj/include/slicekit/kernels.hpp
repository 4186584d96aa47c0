// Transition kernels: quantile, stepping-out, latent, and elliptical slice
// samplers plus Metropolis comparators, univariate and multivariate, and the
// chain runner with per-thread CPU timing.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "slicekit/dist.hpp"
#include "slicekit/rng.hpp"
#include "slicekit/shrink.hpp"
#include "slicekit/special.hpp"

namespace slicekit {

struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One transition. psi is the probability-scale state for kernels that work
// through a CDF transform; state == inverse-CDF(psi) when has_psi is set.
struct StepRecord {
  double state = 0.0;
  double psi = 0.0;
  bool has_psi = false;
  std::int64_t n_target_evals = 0;
  std::int64_t n_rejects = 0;
  bool moved = false;
};

struct VecStepRecord {
  std::vector<double> state;
  std::vector<double> psi;
  bool has_psi = false;
  std::int64_t n_target_evals = 0;
  std::int64_t n_rejects = 0;
  bool moved = false;
};

namespace detail {

inline std::string fmt_state(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

// Quantile slice: slice on the importance ratio h = g / pihat, then uniform
// shrinkage on the probability scale through the pseudo-target CDF. Exactly
// one target evaluation at the current state plus one per candidate, so
// n_target_evals == n_rejects + 2 on every step.
template <class PseudoT, class RngT>
StepRecord qslice_step(const UnnormTarget& target, const PseudoT& pseudo, double x0, RngT& rng) {
  StepRecord rec;
  rec.has_psi = true;
  const double log_h0 = target(x0) - pseudo.log_pdf(x0);
  ++rec.n_target_evals;
  if (!std::isfinite(log_h0))
    throw KernelError("quantile slice: log importance ratio is not finite at the current state x0=" +
                      detail::fmt_state(x0));
  const double u0 = pseudo.cdf(x0);
  if (!(u0 > 0.0 && u0 < 1.0))
    throw KernelError("quantile slice: CDF transform saturated at the current state x0=" +
                      detail::fmt_state(x0));
  const double log_v = log_h0 + std::log(rng.uniform01());
  double x_acc = x0;
  auto in_slice = [&](double u) {
    const double x = pseudo.inv_cdf(u);
    ++rec.n_target_evals;
    const bool ok = target(x) - pseudo.log_pdf(x) > log_v;
    if (ok) x_acc = x;
    return ok;
  };
  const ShrinkResult sr = shrink_unit(u0, in_slice, rng);
  rec.state = x_acc;
  rec.psi = sr.x;
  rec.n_rejects = sr.rejects;
  rec.moved = x_acc != x0;
  return rec;
}

// Fixed-width interval slice sampler: position a width-w interval uniformly
// around the current point, expand it in steps of w while its endpoints stay
// inside the slice, then shrink to acceptance. Expansion budget m:
//   m < 0  unlimited (capped at kShrinkCap per side as a runaway guard),
//   m == 0 no expansion and no budget variate drawn,
//   m > 0  total budget m split uniformly at random between the two sides.
template <class RngT>
StepRecord stepout_slice_step(const UnnormTarget& target, double w, long m, double x0, RngT& rng) {
  if (!(w > 0.0)) throw std::invalid_argument("stepping-out slice: width w must be positive");
  StepRecord rec;
  auto log_g = [&](double x) {
    ++rec.n_target_evals;
    return target(x);
  };
  const double log_g0 = log_g(x0);
  if (!std::isfinite(log_g0))
    throw KernelError("stepping-out slice: log density is not finite at the current state x0=" +
                      detail::fmt_state(x0));
  const double log_v = log_g0 + std::log(rng.uniform01());
  double L = x0 - w * rng.uniform01();
  double R = L + w;
  if (m < 0) {
    int n = 0;
    while (log_g(L) > log_v) {
      L -= w;
      if (++n > kShrinkCap) throw KernelError("stepping-out slice: left expansion did not terminate");
    }
    n = 0;
    while (log_g(R) > log_v) {
      R += w;
      if (++n > kShrinkCap) throw KernelError("stepping-out slice: right expansion did not terminate");
    }
  } else if (m > 0) {
    long budget_left = static_cast<long>(std::floor(static_cast<double>(m) * rng.uniform01()));
    long budget_right = (m - 1) - budget_left;
    while (budget_left > 0 && log_g(L) > log_v) {
      L -= w;
      --budget_left;
    }
    while (budget_right > 0 && log_g(R) > log_v) {
      R += w;
      --budget_right;
    }
  }
  for (int k = 0; k < kShrinkCap; ++k) {
    const double x1 = L + rng.uniform01() * (R - L);
    if (log_g(x1) > log_v) {
      rec.state = x1;
      rec.moved = x1 != x0;
      return rec;
    }
    ++rec.n_rejects;
    if (x1 < x0) L = x1; else R = x1;
  }
  throw_shrink_cap(kShrinkCap, L, R);
}

template <class RngT>
StepRecord stepout_slice_step(const UnnormTarget& target, double w, double x0, RngT& rng) {
  return stepout_slice_step(target, w, -1, x0, rng);
}

// Latent-interval slice sampler: the interval width is an auxiliary variable
// carried between steps. Each step re-centers the interval, refreshes the
// width with an exponential(rate r) tail beyond the minimum needed to cover
// the current point, clips to the target support, and shrinks to acceptance.
template <class RngT>
StepRecord latent_slice_step(const UnnormTarget& target, double r, double& aux_width, double x0, RngT& rng) {
  if (!(r > 0.0)) throw std::invalid_argument("latent slice: rate r must be positive");
  if (!(aux_width > 0.0) || !std::isfinite(aux_width))
    throw KernelError("latent slice: carried interval width must be positive and finite");
  StepRecord rec;
  auto log_g = [&](double x) {
    ++rec.n_target_evals;
    return target(x);
  };
  const double log_g0 = log_g(x0);
  if (!std::isfinite(log_g0))
    throw KernelError("latent slice: log density is not finite at the current state x0=" +
                      detail::fmt_state(x0));
  const double log_v = log_g0 + std::log(rng.uniform01());
  const double center = rng.uniform(x0 - 0.5 * aux_width, x0 + 0.5 * aux_width);
  const double width = 2.0 * std::abs(center - x0) + rng.exponential(r);
  aux_width = width;
  double L = std::max(center - 0.5 * width, target.lo);
  double R = std::min(center + 0.5 * width, target.hi);
  for (int k = 0; k < kShrinkCap; ++k) {
    const double x1 = L + rng.uniform01() * (R - L);
    if (log_g(x1) > log_v) {
      rec.state = x1;
      rec.moved = x1 != x0;
      return rec;
    }
    ++rec.n_rejects;
    if (x1 < x0) L = x1; else R = x1;
  }
  throw_shrink_cap(kShrinkCap, L, R);
}

// Elliptical slice sampling against a Student-t pseudo-target through its
// Gaussian scale-mixture representation. The chain lives on the augmented
// pair (x, s): the mixture scale s is a Gibbs draw given the current point,
// and the x-conditional given s factors as N(x; mu, s*sigma^2) times the
// ratio g / pihat, so the angle-shrinkage pass slices on that ratio while
// the drawn Gaussian only supplies the ellipse's auxiliary point. Requires
// an untruncated t pseudo; targets with restricted support still work
// because off-support candidates carry -inf residuals.
template <class RngT>
StepRecord gess_step(const UnnormTarget& target, const ScalarDist& pseudo, double x0, RngT& rng) {
  if (pseudo.family != Family::StudentT || pseudo.truncated())
    throw std::invalid_argument("generalized elliptical slice: pseudo-target must be an untruncated Student-t");
  StepRecord rec;
  const double mu = pseudo.location;
  const double z0 = (x0 - mu) / pseudo.scale;
  const double mix = rng.inv_gamma(0.5 * (pseudo.df + 1.0), 0.5 * (pseudo.df + z0 * z0));
  const double sd = pseudo.scale * std::sqrt(mix);
  auto resid = [&](double x) {
    ++rec.n_target_evals;
    return target(x) - pseudo.log_pdf(x);
  };
  const double ell0 = resid(x0);
  if (!std::isfinite(ell0))
    throw KernelError("generalized elliptical slice: log residual is not finite at the current state x0=" +
                      detail::fmt_state(x0));
  const double log_y = ell0 + std::log(rng.uniform01());
  const double anchor = mu + sd * rng.normal();
  constexpr double two_pi = 6.283185307179586476925286766559;
  double theta = rng.uniform(0.0, two_pi);
  double theta_min = theta - two_pi;
  double theta_max = theta;
  for (int k = 0; k < kShrinkCap; ++k) {
    const double x1 = (x0 - mu) * std::cos(theta) + (anchor - mu) * std::sin(theta) + mu;
    if (resid(x1) > log_y) {
      rec.state = x1;
      rec.moved = x1 != x0;
      return rec;
    }
    ++rec.n_rejects;
    if (theta < 0.0) theta_min = theta; else theta_max = theta;
    theta = rng.uniform(theta_min, theta_max);
  }
  throw_shrink_cap(kShrinkCap, theta_min, theta_max);
}

// Independence Metropolis-Hastings with the pseudo-target as proposal. The
// acceptance ratio reduces to h(x*) / h(x0); exactly two target evaluations
// per step.
template <class PseudoT, class RngT>
StepRecord imh_step(const UnnormTarget& target, const PseudoT& pseudo, double x0, RngT& rng) {
  StepRecord rec;
  const double log_h0 = target(x0) - pseudo.log_pdf(x0);
  ++rec.n_target_evals;
  if (!std::isfinite(log_h0))
    throw KernelError("independence sampler: log importance ratio is not finite at the current state x0=" +
                      detail::fmt_state(x0));
  const double x1 = pseudo.inv_cdf(rng.uniform01());
  const double log_h1 = target(x1) - pseudo.log_pdf(x1);
  ++rec.n_target_evals;
  const bool accept = std::log(rng.uniform01()) < log_h1 - log_h0;
  rec.state = accept ? x1 : x0;
  rec.n_rejects = accept ? 0 : 1;
  rec.moved = accept;
  return rec;
}

// Random-walk Metropolis with Gaussian proposal of standard deviation c.
template <class RngT>
StepRecord rwm_step(const UnnormTarget& target, double c, double x0, RngT& rng) {
  if (!(c > 0.0)) throw std::invalid_argument("random-walk Metropolis: proposal sd c must be positive");
  StepRecord rec;
  const double log_g0 = target(x0);
  ++rec.n_target_evals;
  if (!std::isfinite(log_g0))
    throw KernelError("random-walk Metropolis: log density is not finite at the current state x0=" +
                      detail::fmt_state(x0));
  const double x1 = x0 + c * rng.normal();
  const double log_g1 = target(x1);
  ++rec.n_target_evals;
  const bool accept = std::log(rng.uniform01()) < log_g1 - log_g0;
  rec.state = accept ? x1 : x0;
  rec.n_rejects = accept ? 0 : 1;
  rec.moved = accept;
  return rec;
}

// Unnormalized multivariate target on a support box. lo and hi must each
// have one entry per coordinate; the call operator returns -inf outside the
// open box.
struct VecTarget {
  std::function<double(const std::vector<double>&)> log_g;
  std::vector<double> lo;
  std::vector<double> hi;
  std::string name;

  std::size_t dim() const { return lo.size(); }

  double operator()(const std::vector<double>& x) const {
    for (std::size_t d = 0; d < lo.size(); ++d)
      if (!(x[d] > lo[d] && x[d] < hi[d])) return -kInf;
    return log_g(x);
  }
};

inline VecTarget make_vec_target(std::function<double(const std::vector<double>&)> log_g,
                                 std::size_t dim, std::string name = "") {
  VecTarget t;
  t.log_g = std::move(log_g);
  t.lo.assign(dim, -kInf);
  t.hi.assign(dim, kInf);
  t.name = std::move(name);
  return t;
}

// Joint pseudo-target on R^D: either independent scalar components or a
// cascade of conditional distributions applied in a fixed coordinate order
// (component d may condition on coordinates 0..d-1). Both define a bijection
// onto (0,1)^D whose Jacobian determinant equals the joint density, so the
// importance ratio is always log g - log_pdf.
struct MultiPseudo {
  enum class Kind { independent, cascade };

  Kind kind = Kind::independent;
  std::vector<ScalarDist> components;
  std::function<ScalarDist(const std::vector<double>&, std::size_t)> conditional;
  std::size_t cascade_dim = 0;

  std::size_t dim() const { return kind == Kind::independent ? components.size() : cascade_dim; }

  std::vector<double> to_psi(const std::vector<double>& x) const {
    check_dim(x.size());
    std::vector<double> psi(x.size());
    if (kind == Kind::independent) {
      for (std::size_t d = 0; d < x.size(); ++d) psi[d] = components[d].cdf(x[d]);
    } else {
      std::vector<double> prefix;
      prefix.reserve(x.size());
      for (std::size_t d = 0; d < x.size(); ++d) {
        psi[d] = conditional(prefix, d).cdf(x[d]);
        prefix.push_back(x[d]);
      }
    }
    return psi;
  }

  // Inverse transform; optionally accumulates the joint log density at the
  // result so cascade conditionals are constructed only once per candidate.
  std::vector<double> from_psi(const std::vector<double>& psi, double* log_pdf_out = nullptr) const {
    check_dim(psi.size());
    std::vector<double> x(psi.size());
    double lp = 0.0;
    if (kind == Kind::independent) {
      for (std::size_t d = 0; d < psi.size(); ++d) {
        x[d] = components[d].inv_cdf(psi[d]);
        if (log_pdf_out) lp += components[d].log_pdf(x[d]);
      }
    } else {
      std::vector<double> prefix;
      prefix.reserve(psi.size());
      for (std::size_t d = 0; d < psi.size(); ++d) {
        const ScalarDist cond = conditional(prefix, d);
        x[d] = cond.inv_cdf(psi[d]);
        if (log_pdf_out) lp += cond.log_pdf(x[d]);
        prefix.push_back(x[d]);
      }
    }
    if (log_pdf_out) *log_pdf_out = lp;
    return x;
  }

  double log_pdf(const std::vector<double>& x) const {
    check_dim(x.size());
    double lp = 0.0;
    if (kind == Kind::independent) {
      for (std::size_t d = 0; d < x.size(); ++d) lp += components[d].log_pdf(x[d]);
    } else {
      std::vector<double> prefix;
      prefix.reserve(x.size());
      for (std::size_t d = 0; d < x.size(); ++d) {
        lp += conditional(prefix, d).log_pdf(x[d]);
        prefix.push_back(x[d]);
      }
    }
    return lp;
  }

 private:
  void check_dim(std::size_t n) const {
    if (n != dim()) throw std::invalid_argument("MultiPseudo: dimension mismatch");
  }
};

inline MultiPseudo independent_pseudo(std::vector<ScalarDist> components) {
  MultiPseudo p;
  p.kind = MultiPseudo::Kind::independent;
  p.components = std::move(components);
  return p;
}

inline MultiPseudo cascade_pseudo(std::size_t dim,
                                  std::function<ScalarDist(const std::vector<double>&, std::size_t)> conditional) {
  MultiPseudo p;
  p.kind = MultiPseudo::Kind::cascade;
  p.conditional = std::move(conditional);
  p.cascade_dim = dim;
  return p;
}

// Multivariate quantile slice: slice on h = g / pihat with the joint pseudo
// density, then hyperrectangle shrinkage on the unit cube with candidates
// mapped back through the (componentwise or cascade) inverse CDF. Counter
// law matches the univariate kernel: n_target_evals == n_rejects + 2.
template <class RngT>
VecStepRecord mqslice_step(const VecTarget& target, const MultiPseudo& pseudo,
                           const std::vector<double>& x0, RngT& rng) {
  if (x0.size() != pseudo.dim())
    throw std::invalid_argument("multivariate quantile slice: state dimension mismatch");
  VecStepRecord rec;
  rec.has_psi = true;
  const double log_h0 = target(x0) - pseudo.log_pdf(x0);
  ++rec.n_target_evals;
  if (!std::isfinite(log_h0))
    throw KernelError("multivariate quantile slice: log importance ratio is not finite at the current state");
  const std::vector<double> psi0 = pseudo.to_psi(x0);
  for (double u : psi0)
    if (!(u > 0.0 && u < 1.0))
      throw KernelError("multivariate quantile slice: CDF transform saturated at the current state");
  const double log_v = log_h0 + std::log(rng.uniform01());
  std::vector<double> x_acc = x0;
  auto in_slice = [&](const std::vector<double>& psi) {
    double lp = 0.0;
    std::vector<double> x = pseudo.from_psi(psi, &lp);
    ++rec.n_target_evals;
    const bool ok = target(x) - lp > log_v;
    if (ok) x_acc = std::move(x);
    return ok;
  };
  ShrinkVecResult sr = shrink_hyperrect(psi0, in_slice, rng);
  rec.moved = x_acc != x0;
  rec.state = std::move(x_acc);
  rec.psi = std::move(sr.psi);
  rec.n_rejects = sr.rejects;
  return rec;
}

// Multivariate independence Metropolis-Hastings with the joint pseudo as
// proposal: the candidate is the inverse CDF image of a uniform draw on the
// unit cube, and the acceptance ratio reduces to h(x*) / h(x0). Exactly two
// target evaluations per step.
template <class RngT>
VecStepRecord mimh_step(const VecTarget& target, const MultiPseudo& pseudo,
                        const std::vector<double>& x0, RngT& rng) {
  if (x0.size() != pseudo.dim())
    throw std::invalid_argument("multivariate independence sampler: state dimension mismatch");
  VecStepRecord rec;
  const double log_h0 = target(x0) - pseudo.log_pdf(x0);
  ++rec.n_target_evals;
  if (!std::isfinite(log_h0))
    throw KernelError("multivariate independence sampler: log importance ratio is not finite at the current state");
  std::vector<double> psi(x0.size());
  for (double& u : psi) u = rng.uniform01();
  double lp1 = 0.0;
  std::vector<double> x1 = pseudo.from_psi(psi, &lp1);
  const double log_h1 = target(x1) - lp1;
  ++rec.n_target_evals;
  const bool accept = std::log(rng.uniform01()) < log_h1 - log_h0;
  rec.state = accept ? std::move(x1) : x0;
  rec.n_rejects = accept ? 0 : 1;
  rec.moved = accept;
  return rec;
}

// Hyperrectangle slice sampler without transform: position a box of the
// given widths uniformly around the current point, clip it to the target
// support box, and shrink per coordinate to acceptance. In one dimension
// with the same variate stream this reproduces stepout_slice_step(m = 0).
template <class RngT>
VecStepRecord mslice_hyperrect_step(const VecTarget& target, const std::vector<double>& widths,
                                    const std::vector<double>& x0, RngT& rng) {
  const std::size_t D = x0.size();
  if (widths.size() != D) throw std::invalid_argument("hyperrectangle slice: widths dimension mismatch");
  for (double w : widths)
    if (!(w > 0.0)) throw std::invalid_argument("hyperrectangle slice: widths must be positive");
  VecStepRecord rec;
  const double log_g0 = target(x0);
  ++rec.n_target_evals;
  if (!std::isfinite(log_g0))
    throw KernelError("hyperrectangle slice: log density is not finite at the current state");
  const double log_v = log_g0 + std::log(rng.uniform01());
  std::vector<double> L(D), R(D);
  const bool has_box = target.lo.size() == D;
  for (std::size_t d = 0; d < D; ++d) {
    L[d] = x0[d] - widths[d] * rng.uniform01();
    R[d] = L[d] + widths[d];
    if (has_box) {
      L[d] = std::max(L[d], target.lo[d]);
      R[d] = std::min(R[d], target.hi[d]);
    }
  }
  auto in_slice = [&](const std::vector<double>& z) {
    ++rec.n_target_evals;
    return target(z) > log_v;
  };
  ShrinkVecResult sr = shrink_box(std::move(L), std::move(R), x0, in_slice, rng);
  rec.moved = sr.psi != x0;
  rec.state = std::move(sr.psi);
  rec.n_rejects = sr.rejects;
  return rec;
}

inline double thread_cpu_seconds() {
  timespec ts;
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

template <class State>
struct ChainResultT {
  std::vector<State> draws;
  std::vector<State> psis;
  bool has_psi = false;
  std::vector<std::int64_t> evals_per_iter;
  std::int64_t total_rejects = 0;
  std::int64_t n_moved = 0;
  double cpu_seconds = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::int64_t burnin = 0;
  std::string kernel_label;

  double mean_evals() const {
    if (evals_per_iter.empty()) return 0.0;
    double s = 0.0;
    for (std::int64_t e : evals_per_iter) s += static_cast<double>(e);
    return s / static_cast<double>(evals_per_iter.size());
  }
};

using ChainResult = ChainResultT<double>;
using VecChainResult = ChainResultT<std::vector<double>>;

// Runs kernel(x, rng) for burnin + n_iter steps from x_init, keeping the last
// n_iter states and their counters. Only the post-burn-in phase is timed, on
// the calling thread's CPU clock. Kernel failures are rethrown with the
// 0-based overall iteration index.
template <class Kernel, class State>
ChainResultT<std::decay_t<State>> run_chain(Kernel&& kernel, State x_init, std::int64_t n_iter,
                                            std::int64_t burnin, std::uint64_t seed,
                                            std::uint64_t stream = 0, std::string kernel_label = "") {
  using S = std::decay_t<State>;
  if (n_iter < 0 || burnin < 0) throw std::invalid_argument("run_chain: iteration counts must be nonnegative");
  ChainResultT<S> out;
  out.seed = seed;
  out.stream = stream;
  out.burnin = burnin;
  out.kernel_label = std::move(kernel_label);
  out.draws.reserve(static_cast<std::size_t>(n_iter));
  out.evals_per_iter.reserve(static_cast<std::size_t>(n_iter));
  Rng rng(seed, stream);
  S x = std::move(x_init);
  auto step_at = [&](std::int64_t i) {
    try {
      return kernel(x, rng);
    } catch (const std::exception& e) {
      throw KernelError("kernel '" + out.kernel_label + "' failed at iteration " + std::to_string(i) +
                        ": " + e.what());
    }
  };
  for (std::int64_t i = 0; i < burnin; ++i) x = step_at(i).state;
  const double t0 = thread_cpu_seconds();
  for (std::int64_t i = 0; i < n_iter; ++i) {
    auto rec = step_at(burnin + i);
    x = rec.state;
    out.draws.push_back(std::move(rec.state));
    if (rec.has_psi) {
      out.has_psi = true;
      out.psis.push_back(std::move(rec.psi));
    }
    out.evals_per_iter.push_back(rec.n_target_evals);
    out.total_rejects += rec.n_rejects;
    out.n_moved += rec.moved ? 1 : 0;
  }
  out.cpu_seconds = thread_cpu_seconds() - t0;
  return out;
}

}  // namespace slicekit
