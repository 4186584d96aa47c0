#pragma once
// Pseudo-target quality metrics, fitting strategies, and psi diagnostics.
//
// Both metrics work on the ratio h(psi) = g(inv_cdf(psi)) / pseudo_pdf(inv_cdf(psi)),
// the unnormalized target density after mapping through the pseudo CDF:
//   msw            expected total slice length under the stationary distribution,
//                  (1/c) * int int min(h(u), h(v)) du dv with c = int h
//   auc_quadrature area under h scaled to the unit square, mean(h) / max(h)
// Both live in [0,1] and equal 1 exactly when h is constant on the grid;
// variation below 1e-9 relative counts as constant so that a pseudo equal to
// the target scores exactly one despite rounding noise in the two log paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicekit/dist.hpp"

namespace slicekit {

enum class Criterion { auc, msw };
enum class FitMethod { quadrature, samples, laplace, moment_match };

inline const char* to_string(Criterion c) { return c == Criterion::auc ? "auc" : "msw"; }

inline const char* to_string(FitMethod m) {
  switch (m) {
    case FitMethod::quadrature: return "quadrature";
    case FitMethod::samples: return "samples";
    case FitMethod::laplace: return "laplace";
    default: return "moment_match";
  }
}

struct PseudoFit {
  ScalarDist dist;
  Criterion criterion = Criterion::auc;
  double score = 0.0;
  FitMethod method = FitMethod::quadrature;
  std::string meta;
};

namespace detail {

// Fixed reduction order regardless of any internal parallelism.
inline double pairwise_sum(const double* a, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise_sum(v.data(), v.size());
}

// h on the midpoint grid psi_i = (i + 0.5)/n.  A node where the ratio is not
// finite means h is unbounded there and neither metric is defined.
inline std::vector<double> ratio_grid(const UnnormTarget& target, const ScalarDist& pseudo,
                                      std::size_t n_grid) {
  if (n_grid < 2) throw std::invalid_argument("ratio_grid: n_grid must be at least 2");
  std::vector<double> h(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    const double psi = (double(i) + 0.5) / double(n_grid);
    const double x = pseudo.inv_cdf(psi);
    const double value = std::exp(target(x) - pseudo.log_pdf(x));
    if (!std::isfinite(value)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "target/pseudo ratio is not finite at grid node %zu (psi=%.17g, x=%.17g)",
                    i, psi, x);
      throw std::runtime_error(buf);
    }
    h[i] = value;
  }
  return h;
}

inline bool nearly_constant(double min_value, double max_value) {
  return max_value - min_value <= 1e-9 * max_value;
}

// sum_j sum_i min(h_i, h_j) / (n * sum h) via sorted prefix sums.
inline double msw_from_grid(const std::vector<double>& h) {
  const std::size_t n = h.size();
  std::vector<double> sorted(h);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];
  const double total = prefix[n];
  if (!(total > 0.0)) throw std::runtime_error("target/pseudo ratio is zero at every grid node");
  if (nearly_constant(sorted.front(), sorted.back())) return 1.0;
  std::vector<double> per(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto k =
        std::size_t(std::upper_bound(sorted.begin(), sorted.end(), h[j]) - sorted.begin());
    per[j] = prefix[k] + h[j] * double(n - k);
  }
  return pairwise_sum(per) / (double(n) * total);
}

inline double auc_from_grid(const std::vector<double>& h) {
  const auto [min_it, max_it] = std::minmax_element(h.begin(), h.end());
  if (!(*max_it > 0.0)) throw std::runtime_error("target/pseudo ratio is zero at every grid node");
  if (nearly_constant(*min_it, *max_it)) return 1.0;
  return pairwise_sum(h) / (double(h.size()) * *max_it);
}

// Map samples through the pseudo CDF, keeping only psi strictly inside (0,1).
inline std::vector<double> psi_from_samples(const std::vector<double>& samples,
                                            const ScalarDist& pseudo) {
  std::vector<double> psis;
  psis.reserve(samples.size());
  for (double x : samples) {
    if (!std::isfinite(x) || !(x > pseudo.lo && x < pseudo.hi)) continue;
    const double psi = pseudo.cdf(x);
    if (psi > 0.0 && psi < 1.0) psis.push_back(psi);
  }
  return psis;
}

inline std::vector<std::int64_t> bin_counts(const std::vector<double>& psis, std::size_t bins) {
  std::vector<std::int64_t> counts(bins, 0);
  for (double p : psis) {
    auto idx = std::size_t(p * double(bins));
    if (idx >= bins) idx = bins - 1;
    ++counts[idx];
  }
  return counts;
}

}  // namespace detail

inline double msw(const UnnormTarget& target, const ScalarDist& pseudo, std::size_t n_grid = 1024) {
  return detail::msw_from_grid(detail::ratio_grid(target, pseudo, n_grid));
}

inline double auc_quadrature(const UnnormTarget& target, const ScalarDist& pseudo,
                             std::size_t n_grid = 1024) {
  return detail::auc_from_grid(detail::ratio_grid(target, pseudo, n_grid));
}

inline double auc_from_samples(const std::vector<double>& samples, const ScalarDist& pseudo,
                               std::size_t bins = 30) {
  if (bins < 2) throw std::invalid_argument("auc_from_samples: need at least 2 bins");
  const std::vector<double> psis = detail::psi_from_samples(samples, pseudo);
  if (psis.size() < 100) {
    throw std::invalid_argument("auc_from_samples: need at least 100 samples inside the pseudo "
                                "support, got " + std::to_string(psis.size()));
  }
  const std::vector<std::int64_t> counts = detail::bin_counts(psis, bins);
  const double maxc = double(*std::max_element(counts.begin(), counts.end()));
  return double(psis.size()) / (double(bins) * maxc);
}

inline double msw_from_samples(const std::vector<double>& samples, const ScalarDist& pseudo,
                               std::size_t bins = 30) {
  if (bins < 2) throw std::invalid_argument("msw_from_samples: need at least 2 bins");
  const std::vector<double> psis = detail::psi_from_samples(samples, pseudo);
  if (psis.size() < 100) {
    throw std::invalid_argument("msw_from_samples: need at least 100 samples inside the pseudo "
                                "support, got " + std::to_string(psis.size()));
  }
  const std::vector<std::int64_t> counts = detail::bin_counts(psis, bins);
  std::vector<double> h(counts.begin(), counts.end());
  return detail::msw_from_grid(h);
}

// Candidate family for optimize_pseudo: Student-t with df drawn from a fixed
// grid, location and scale searched inside a box, optional truncation applied
// to every candidate.
struct StudentTGrid {
  std::vector<double> dfs{1.0, 5.0, 20.0};
  double loc_lo = 0.0;
  double loc_hi = 0.0;
  double scale_lo = 0.0;
  double scale_hi = 0.0;
  double trunc_lo = -kInf;
  double trunc_hi = kInf;
};

namespace detail {

// Coordinate pattern search over (location, scale) inside the box, one run per
// df, winner across df returned.  Score callbacks return -inf for candidates
// whose criterion is undefined.  Guarantees: the returned score is >= the
// score of every anchor (box corners and center) it started from.
template <class Score>
PseudoFit maximize_over_box(const StudentTGrid& grid, Criterion crit, FitMethod method,
                            std::size_t grid_size, Score&& score) {
  if (grid.dfs.empty()) throw std::invalid_argument("optimize_pseudo: empty df grid");
  for (double d : grid.dfs) {
    if (!(d > 0.0)) throw std::invalid_argument("optimize_pseudo: df must be positive");
  }
  if (!(grid.loc_lo < grid.loc_hi) || !(grid.scale_lo < grid.scale_hi) || !(grid.scale_lo > 0.0)) {
    throw std::invalid_argument("optimize_pseudo: invalid location/scale search box");
  }

  constexpr double kParamTol = 1e-4;
  const double loc_width = grid.loc_hi - grid.loc_lo;
  const double scale_width = grid.scale_hi - grid.scale_lo;

  double best_score = -kInf;
  double best_loc = 0.0, best_scale = 1.0, best_df = grid.dfs.front();
  bool best_on_boundary = false;
  std::size_t n_evals = 0;

  for (double df : grid.dfs) {
    auto eval = [&](double loc, double scale) {
      ++n_evals;
      return score(loc, scale, df);
    };
    const double anchors[5][2] = {{grid.loc_lo, grid.scale_lo},
                                  {grid.loc_lo, grid.scale_hi},
                                  {grid.loc_hi, grid.scale_lo},
                                  {grid.loc_hi, grid.scale_hi},
                                  {0.5 * (grid.loc_lo + grid.loc_hi),
                                   0.5 * (grid.scale_lo + grid.scale_hi)}};
    double cur_loc = anchors[4][0], cur_scale = anchors[4][1], cur = -kInf;
    for (const auto& a : anchors) {
      const double s = eval(a[0], a[1]);
      if (s > cur) {
        cur = s;
        cur_loc = a[0];
        cur_scale = a[1];
      }
    }
    if (cur == -kInf) continue;

    // Pattern search over the eight compass neighbours; diagonal moves keep
    // the search from stalling on correlated (location, scale) ridges.  A
    // second pass from the first solution at a finer initial mesh polishes it.
    std::size_t guard = 0;
    for (int pass = 0; pass < 2 && guard < 40000; ++pass) {
      double loc_step = loc_width / (pass == 0 ? 4.0 : 16.0);
      double scale_step = scale_width / (pass == 0 ? 4.0 : 16.0);
      while ((loc_step > kParamTol || scale_step > kParamTol) && guard < 40000) {
        double best_move = cur, best_move_loc = cur_loc, best_move_scale = cur_scale;
        for (int dl = -1; dl <= 1; ++dl) {
          for (int ds = -1; ds <= 1; ++ds) {
            if (dl == 0 && ds == 0) continue;
            const double loc = std::clamp(cur_loc + dl * loc_step, grid.loc_lo, grid.loc_hi);
            const double scale =
                std::clamp(cur_scale + ds * scale_step, grid.scale_lo, grid.scale_hi);
            if (loc == cur_loc && scale == cur_scale) continue;
            ++guard;
            const double s = eval(loc, scale);
            if (s > best_move) {
              best_move = s;
              best_move_loc = loc;
              best_move_scale = scale;
            }
          }
        }
        if (best_move > cur) {
          cur = best_move;
          cur_loc = best_move_loc;
          cur_scale = best_move_scale;
        } else {
          loc_step *= 0.5;
          scale_step *= 0.5;
        }
      }
    }
    if (cur > best_score) {
      best_score = cur;
      best_loc = cur_loc;
      best_scale = cur_scale;
      best_df = df;
      best_on_boundary = cur_loc - grid.loc_lo < kParamTol || grid.loc_hi - cur_loc < kParamTol ||
                         cur_scale - grid.scale_lo < kParamTol ||
                         grid.scale_hi - cur_scale < kParamTol;
    }
  }

  if (best_score == -kInf) {
    throw std::runtime_error("optimize_pseudo: criterion was non-finite for every candidate");
  }

  char meta[256];
  std::snprintf(meta, sizeof meta, "grid_size=%zu n_evals=%zu df_grid=%zu%s", grid_size, n_evals,
                grid.dfs.size(), best_on_boundary ? " warning=solution-at-box-boundary" : "");
  return PseudoFit{
      ScalarDist::student_t(best_loc, best_scale, best_df, grid.trunc_lo, grid.trunc_hi), crit,
      best_score, method, meta};
}

}  // namespace detail

inline PseudoFit optimize_pseudo(const UnnormTarget& target, const StudentTGrid& grid,
                                 Criterion crit, std::size_t n_grid = 1024) {
  auto score = [&](double loc, double scale, double df) {
    const ScalarDist cand = ScalarDist::student_t(loc, scale, df, grid.trunc_lo, grid.trunc_hi);
    try {
      return crit == Criterion::auc ? auc_quadrature(target, cand, n_grid)
                                    : msw(target, cand, n_grid);
    } catch (const std::runtime_error&) {
      return -kInf;
    }
  };
  return detail::maximize_over_box(grid, crit, FitMethod::quadrature, n_grid, score);
}

inline PseudoFit optimize_pseudo(const std::vector<double>& samples, const StudentTGrid& grid,
                                 Criterion crit, std::size_t bins = 30) {
  auto score = [&](double loc, double scale, double df) {
    const ScalarDist cand = ScalarDist::student_t(loc, scale, df, grid.trunc_lo, grid.trunc_hi);
    try {
      return crit == Criterion::auc ? auc_from_samples(samples, cand, bins)
                                    : msw_from_samples(samples, cand, bins);
    } catch (const std::runtime_error&) {
      return -kInf;
    } catch (const std::invalid_argument&) {
      return -kInf;  // too few samples land inside this candidate's support
    }
  };
  return detail::maximize_over_box(grid, crit, FitMethod::samples, bins, score);
}

// Student-t pseudo centered at the mode of log g with scale (-l''(mode))^{-1/2},
// truncated to the target support.  Mode found by bracketed golden-section
// ascent; curvature by central second difference.
inline ScalarDist laplace_pseudo(const UnnormTarget& target, double x_init, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("laplace_pseudo: df must be positive");
  if (!(x_init > target.lo && x_init < target.hi)) {
    throw std::invalid_argument("laplace_pseudo: x_init outside the target support");
  }
  if (!std::isfinite(target(x_init))) {
    throw std::invalid_argument("laplace_pseudo: log target not finite at x_init");
  }

  // Step toward a point, approaching a finite support bound geometrically so
  // probes never leave the open support.
  auto probe = [&](double from, double step, bool right) {
    if (right) return std::isfinite(target.hi) ? from + std::min(step, 0.5 * (target.hi - from))
                                               : from + step;
    return std::isfinite(target.lo) ? from - std::min(step, 0.5 * (from - target.lo))
                                    : from - step;
  };

  double m = x_init, fm = target(m);
  double step = 0.5 * std::max(1.0, std::abs(x_init));
  double a = probe(m, step, false), fa = target(a);
  double b = probe(m, step, true), fb = target(b);
  for (int i = 0; fb > fm; ++i) {
    if (i >= 200) {
      throw std::runtime_error("laplace_pseudo: mode search ran into the support boundary");
    }
    a = m;
    m = b;
    fm = fb;
    step *= 2.0;
    b = probe(m, step, true);
    fb = target(b);
  }
  for (int i = 0; fa > fm; ++i) {
    if (i >= 200) {
      throw std::runtime_error("laplace_pseudo: mode search ran into the support boundary");
    }
    b = m;
    m = a;
    fm = fa;
    step *= 2.0;
    a = probe(m, step, false);
    fa = target(a);
  }

  constexpr double kGolden = 0.6180339887498949;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = target(x1), f2 = target(x2);
  while (b - a > 1e-8 * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = target(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = target(x1);
    }
  }
  const double mode = 0.5 * (a + b);

  double h = 1e-4 * std::max(1.0, std::abs(mode));
  const double room = std::min(mode - target.lo, target.hi - mode);
  if (room < 4.0 * h) h = 0.25 * room;
  const double dd = (target(mode + h) - 2.0 * target(mode) + target(mode - h)) / (h * h);
  if (!(dd < 0.0)) {
    throw std::runtime_error("laplace_pseudo: log target is not concave at the located mode");
  }
  return ScalarDist::student_t(mode, 1.0 / std::sqrt(-dd), df, target.lo, target.hi);
}

// Cauchy(median, IQR/2) fit, optionally truncated.
inline ScalarDist moment_match_pseudo(const std::vector<double>& samples, double lo = -kInf,
                                      double hi = kInf) {
  if (samples.size() < 100) {
    throw std::invalid_argument("moment_match_pseudo: need at least 100 samples, got " +
                                std::to_string(samples.size()));
  }
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  if (!std::isfinite(sorted.front()) || !std::isfinite(sorted.back())) {
    throw std::invalid_argument("moment_match_pseudo: samples must be finite");
  }
  auto quantile = [&](double p) {
    const double pos = p * double(sorted.size() - 1);
    const auto i = std::size_t(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - double(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
  };
  const double median = quantile(0.5);
  const double scale = 0.5 * (quantile(0.75) - quantile(0.25));
  if (!(scale > 0.0)) {
    throw std::runtime_error("moment_match_pseudo: degenerate samples, interquartile range is zero");
  }
  return ScalarDist::cauchy(median, scale, lo, hi);
}

enum class PsiShape { flat, off_center, narrow_peaked, u_shaped };

inline const char* to_string(PsiShape s) {
  switch (s) {
    case PsiShape::flat: return "flat";
    case PsiShape::off_center: return "off-center";
    case PsiShape::narrow_peaked: return "narrow-peaked";
    default: return "u-shaped";
  }
}

struct PsiDiagnostics {
  std::vector<std::int64_t> histogram;
  double auc_estimate = 0.0;
  PsiShape shape = PsiShape::flat;
};

// Classification runs in a fixed order: flat when the bins are level (max/min
// ratio under 2), then off-center by the mean of psi, then U-shaped when both
// end bins clear 1.5x the mean of the middle third, and narrow-peaked
// otherwise.  Flat means the pseudo fits; off-center flags a location bias;
// a narrow peak means the pseudo is too diffuse; a U shape means it is too
// narrow or thin-tailed.
inline PsiDiagnostics psi_diagnostics(const std::vector<double>& psis, std::size_t bins = 30) {
  if (bins < 3) throw std::invalid_argument("psi_diagnostics: need at least 3 bins");
  if (psis.size() < 10 * bins) {
    throw std::invalid_argument("psi_diagnostics: need at least 10*bins psi values, got " +
                                std::to_string(psis.size()));
  }
  for (double p : psis) {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::domain_error("psi_diagnostics: psi values must lie strictly inside (0,1)");
    }
  }
  PsiDiagnostics out;
  out.histogram = detail::bin_counts(psis, bins);
  const auto [min_it, max_it] = std::minmax_element(out.histogram.begin(), out.histogram.end());
  const double minc = double(*min_it), maxc = double(*max_it);
  out.auc_estimate = double(psis.size()) / (double(bins) * maxc);

  const double mean_psi = detail::pairwise_sum(psis) / double(psis.size());
  if (maxc < 2.0 * minc) {
    out.shape = PsiShape::flat;
  } else if (mean_psi < 0.4 || mean_psi > 0.6) {
    out.shape = PsiShape::off_center;
  } else {
    const std::size_t third = bins / 3;
    double mid = 0.0;
    for (std::size_t i = third; i < bins - third; ++i) mid += double(out.histogram[i]);
    mid /= double(bins - 2 * third);
    const bool u_shaped = double(out.histogram.front()) > 1.5 * mid &&
                          double(out.histogram.back()) > 1.5 * mid;
    out.shape = u_shaped ? PsiShape::u_shaped : PsiShape::narrow_peaked;
  }
  return out;
}

}  // namespace slicekit
