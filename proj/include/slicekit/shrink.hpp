#pragma once

// Shrinkage procedures: the bracket-tightening loops that turn "draw from Q
// restricted to an awkward set A" into a short sequence of proposals from
// nested intervals (or boxes). Candidates come from CDF-interval inversion,
// so every candidate costs exactly one uniform variate per dimension and the
// restriction to (L,R) is exact.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicekit/dist.hpp"

namespace slicekit {

struct ShrinkError : std::runtime_error {
  explicit ShrinkError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShrinkResult {
  double x = 0.0;
  int rejects = 0;
};

struct ShrinkVecResult {
  std::vector<double> psi;
  int rejects = 0;
};

inline constexpr int kShrinkCap = 10000;

[[noreturn]] inline void throw_shrink_cap(int cap, double L, double R) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "shrinkage did not accept within %d candidates; final bounds (%.17g, %.17g) -- "
                "degenerate acceptance set or saturated CDF",
                cap, L, R);
  throw ShrinkError(buf);
}

// Candidates from Q restricted to (L,R), tightening the violated side toward
// the anchor x0 after each rejection. A candidate equal to x0 counts as
// "below" so the anchor never leaves the bracket. The CDF images of the
// bounds are carried by assignment, which makes the trajectory identical to
// shrink_unit run on the probability scale with the same variate stream.
template <class Pred, class RngT>
ShrinkResult generalized_shrink(const ScalarDist& Q, Pred&& in_A, double x0, RngT& rng, int cap = kShrinkCap) {
  double uL = 0.0, uR = 1.0;
  double L = Q.slo_, R = Q.shi_;
  for (int k = 0; k < cap; ++k) {
    const double v = uL + rng.uniform01() * (uR - uL);
    const double x1 = Q.inv_cdf(v);
    if (in_A(x1)) return {x1, k};
    if (x1 <= x0) {
      L = x1;
      uL = v;
    } else {
      R = x1;
      uR = v;
    }
  }
  throw_shrink_cap(cap, L, R);
}

// Uniform shrinkage on (0,1): generalized_shrink specialized to Q = Unif(0,1)
template <class Pred, class RngT>
ShrinkResult shrink_unit(double u0, Pred&& in_A, RngT& rng, int cap = kShrinkCap) {
  double L = 0.0, R = 1.0;
  for (int k = 0; k < cap; ++k) {
    const double u1 = L + rng.uniform01() * (R - L);
    if (in_A(u1)) return {u1, k};
    if (u1 <= u0) L = u1; else R = u1;
  }
  throw_shrink_cap(cap, L, R);
}

// Hyperrectangle shrinkage over an arbitrary starting box: candidates are
// uniform on the current box; on rejection every coordinate shrinks
// independently toward the anchor (strictly-below raises L, otherwise R).
template <class Pred, class RngT>
ShrinkVecResult shrink_box(std::vector<double> L, std::vector<double> R, const std::vector<double>& x0,
                           Pred&& in_A, RngT& rng, int cap = kShrinkCap) {
  const size_t D = x0.size();
  std::vector<double> z(D);
  for (int k = 0; k < cap; ++k) {
    for (size_t d = 0; d < D; ++d) z[d] = L[d] + rng.uniform01() * (R[d] - L[d]);
    if (in_A(z)) return {z, k};
    for (size_t d = 0; d < D; ++d) {
      if (z[d] < x0[d]) L[d] = z[d]; else R[d] = z[d];
    }
  }
  throw_shrink_cap(cap, L.empty() ? 0.0 : L[0], R.empty() ? 1.0 : R[0]);
}

// unit-hypercube start
template <class Pred, class RngT>
ShrinkVecResult shrink_hyperrect(const std::vector<double>& psi0, Pred&& in_A, RngT& rng, int cap = kShrinkCap) {
  return shrink_box(std::vector<double>(psi0.size(), 0.0), std::vector<double>(psi0.size(), 1.0), psi0,
                    std::forward<Pred>(in_A), rng, cap);
}

}  // namespace slicekit
