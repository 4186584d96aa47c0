#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "slicekit/dist.hpp"
#include "slicekit/kernels.hpp"
#include "slicekit/rng.hpp"
#include "slicekit/target.hpp"

using namespace slicekit;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

// Mirrors Rng's derived draws so hand traces can force every variate.
struct ScriptedRng {
  std::vector<double> vals;
  size_t i = 0;
  double uniform01() {
    REQUIRE(i < vals.size());
    return vals[i++];
  }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  double normal() { return normal_quantile(uniform01()); }
  double exponential(double rate) { return -std::log(uniform01()) / rate; }
};

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

// Batch-means standard error of the chain mean (20 batches).
double batch_se(const std::vector<double>& xs) {
  const size_t nb = 20;
  const size_t blen = xs.size() / nb;
  std::vector<double> bm(nb);
  for (size_t b = 0; b < nb; ++b) {
    double s = 0.0;
    for (size_t j = b * blen; j < (b + 1) * blen; ++j) s += xs[j];
    bm[b] = s / double(blen);
  }
  const double m = mean_of(bm);
  double v = 0.0;
  for (double x : bm) v += (x - m) * (x - m);
  v /= double(nb - 1);
  return std::sqrt(v / double(nb));
}

double median_of(std::vector<double> xs) {
  const size_t k = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + k, xs.end());
  return xs[k];
}

}  // namespace

TEST_CASE("quantile slice with pseudo equal to the target accepts every first candidate", "[samplers]") {
  const UnnormTarget tgt = std_target("normal");
  const ScalarDist pseudo = ScalarDist::normal(0.0, 1.0);
  Rng rng(11);
  double x = 0.2;
  for (int i = 0; i < 1000; ++i) {
    const StepRecord rec = qslice_step(tgt, pseudo, x, rng);
    REQUIRE(rec.n_rejects == 0);
    REQUIRE(rec.n_target_evals == 2);
    REQUIRE(rec.has_psi);
    REQUIRE(rec.moved);
    x = rec.state;
  }
}

TEST_CASE("quantile slice counter law holds on every step", "[samplers]") {
  const UnnormTarget tgt = std_target("gamma2.5");
  const ScalarDist pseudo = parse_dist("t(1.47,1.82,5)[0,inf)");
  Rng rng(12);
  double x = 2.0;
  for (int i = 0; i < 5000; ++i) {
    const StepRecord rec = qslice_step(tgt, pseudo, x, rng);
    REQUIRE(rec.n_target_evals - rec.n_rejects == 2);
    x = rec.state;
  }
}

TEST_CASE("quantile slice with an offhand Cauchy pseudo still shrinks quickly", "[samplers]") {
  const UnnormTarget tgt = std_target("gamma2.5");
  const ScalarDist pseudo = parse_dist("cauchy(3,1.3)[0,inf)");
  Rng rng(13);
  double x = 2.0;
  std::int64_t rejects = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const StepRecord rec = qslice_step(tgt, pseudo, x, rng);
    rejects += rec.n_rejects;
    x = rec.state;
  }
  CHECK(double(rejects) / n < 2.0);
}

TEST_CASE("quantile slice long-run mean matches the gamma target", "[samplers]") {
  const UnnormTarget tgt = std_target("gamma2.5");
  const ScalarDist pseudo = parse_dist("t(1.47,1.82,5)[0,inf)");
  Rng rng(14);
  double x = 2.0;
  std::vector<double> draws;
  draws.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    x = qslice_step(tgt, pseudo, x, rng).state;
    draws.push_back(x);
  }
  const double m = mean_of(draws);
  const double se = batch_se(draws);
  CHECK(std::fabs(m - 2.5) < 3.0 * se);
}

TEST_CASE("quantile slice records the probability-scale state exactly", "[samplers]") {
  const UnnormTarget tgt = std_target("gamma2.5");
  const ScalarDist pseudo = parse_dist("t(1.47,1.82,5)[0,inf)");
  Rng rng(15);
  double x = 2.0;
  for (int i = 0; i < 200; ++i) {
    const StepRecord rec = qslice_step(tgt, pseudo, x, rng);
    REQUIRE(rec.state == pseudo.inv_cdf(rec.psi));
    x = rec.state;
  }
}

TEST_CASE("quantile slice initialization errors", "[samplers]") {
  Rng rng(16);
  const UnnormTarget tgt = std_target("gamma2.5");
  const ScalarDist pseudo = parse_dist("t(1.47,1.82,5)[0,inf)");
  CHECK_THROWS_AS(qslice_step(tgt, pseudo, -1.0, rng), KernelError);
  // A state 40 sds into the tail saturates a normal CDF transform.
  const UnnormTarget wide{[](double) { return 0.0; }, -kInf, kInf, "flat"};
  CHECK_THROWS_MATCHES(qslice_step(wide, ScalarDist::normal(0.0, 1.0), -40.0, rng), KernelError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("saturated")));
}

TEST_CASE("quantile slice probability-space and direct-space routes coincide", "[samplers]") {
  const UnnormTarget tgt = std_target("gamma2.5");
  const ScalarDist pseudo = parse_dist("t(1.47,1.82,5)[0,inf)");
  Rng ra(17), rb(17);
  double xa = 2.0, xb = 2.0;
  for (int i = 0; i < 2000; ++i) {
    const StepRecord rec = qslice_step(tgt, pseudo, xa, ra);
    xa = rec.state;

    const double log_h0 = tgt(xb) - pseudo.log_pdf(xb);
    const double log_v = log_h0 + std::log(rb.uniform01());
    const auto in_slice = [&](double x) { return tgt(x) - pseudo.log_pdf(x) > log_v; };
    const ShrinkResult sr = generalized_shrink(pseudo, in_slice, xb, rb);
    xb = sr.x;

    REQUIRE(rec.n_rejects == sr.rejects);
    REQUIRE_THAT(xa, WithinAbs(xb, 1e-10));
  }
}

TEST_CASE("stepping out expands past the slice and shrinks back: forced trace", "[samplers]") {
  const UnnormTarget tgt = std_target("normal");
  // Slice level at half the mode density; interval positioned at offset 0.7.
  ScriptedRng rng{{0.5, 0.7, 0.99, 0.01, 0.5}};
  const StepRecord rec = stepout_slice_step(tgt, 1.0, -1, 0.0, rng);

  // Expected trace: expansion runs one extra step per side, then two
  // rejected candidates shrink the interval before the third accepts.
  double L = 0.0 - 1.0 * 0.7, R = L + 1.0;
  L -= 1.0;
  R += 1.0;
  const double c1 = L + 0.99 * (R - L);  // rejected right
  R = c1;
  const double c2 = L + 0.01 * (R - L);  // rejected left
  L = c2;
  const double c3 = L + 0.5 * (R - L);   // accepted
  REQUIRE(rec.state == c3);
  CHECK(rec.n_rejects == 2);
  CHECK(rec.n_target_evals == 8);  // current point + 4 expansion probes + 3 candidates
  CHECK(rec.moved);
  CHECK_FALSE(rec.has_psi);
}

TEST_CASE("stepping out with a split budget stops without probing once exhausted", "[samplers]") {
  const UnnormTarget tgt = std_target("normal");
  ScriptedRng rng{{0.5, 0.7, 0.34, 0.9}};  // budget draw 0.34 -> left 1, right 1
  const StepRecord rec = stepout_slice_step(tgt, 1.0, 3, 0.0, rng);
  double L = 0.0 - 1.0 * 0.7, R = L + 1.0;
  L -= 1.0;
  R += 1.0;
  const double c1 = L + 0.9 * (R - L);
  REQUIRE(rec.state == c1);
  CHECK(rec.n_rejects == 0);
  CHECK(rec.n_target_evals == 4);  // current point + 2 budgeted probes + 1 candidate
}

TEST_CASE("stepping out with zero expansion budget draws no budget variate", "[samplers]") {
  const UnnormTarget tgt = std_target("normal");
  ScriptedRng rng{{0.5, 0.7, 0.9}};
  const StepRecord rec = stepout_slice_step(tgt, 1.0, 0, 0.0, rng);
  const double L = 0.0 - 1.0 * 0.7;
  const double R = L + 1.0;
  REQUIRE(rec.state == L + 0.9 * (R - L));
  CHECK(rec.n_rejects == 0);
  CHECK(rec.n_target_evals == 2);
  CHECK(rng.i == rng.vals.size());  // exactly three variates consumed
}

TEST_CASE("stepping out on a flat bounded target accepts the first in-support candidate", "[samplers]") {
  const UnnormTarget tgt{[](double) { return 0.0; }, 0.0, 1.0, "flat01"};
  Rng rng(18);
  double x = 0.5;
  std::vector<double> visited;
  // Unbounded wrapper so off-support probes still reach the recorder.
  const UnnormTarget probe{[&](double z) {
                             visited.push_back(z);
                             return tgt(z);
                           },
                           -kInf, kInf, tgt.name};
  for (int i = 0; i < 300; ++i) {
    visited.clear();
    const StepRecord rec = stepout_slice_step(probe, 1.0, 0, x, rng);
    // visited = current point, then candidates in order; every candidate
    // inside (0,1) lies in the slice, so only the last one is in support.
    REQUIRE(visited.size() == size_t(rec.n_target_evals));
    for (size_t k = 1; k + 1 < visited.size(); ++k) {
      REQUIRE((visited[k] <= 0.0 || visited[k] >= 1.0));
    }
    REQUIRE(rec.state > 0.0);
    REQUIRE(rec.state < 1.0);
    x = rec.state;
  }
}

TEST_CASE("stepping out rejects non-positive widths and off-support starts", "[samplers]") {
  const UnnormTarget tgt = std_target("gamma2.5");
  Rng rng(19);
  CHECK_THROWS_AS(stepout_slice_step(tgt, 0.0, -1, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(stepout_slice_step(tgt, 1.0, -1, -3.0, rng), KernelError);
}

TEST_CASE("latent slice on a flat bounded target never rejects once clipped", "[samplers]") {
  const UnnormTarget tgt{[](double) { return 0.0; }, 0.0, 1.0, "flat01"};
  Rng rng(20);
  double x = 0.5, s = 5.0;
  for (int i = 0; i < 200; ++i) {
    const StepRecord rec = latent_slice_step(tgt, 0.3, s, x, rng);
    REQUIRE(rec.n_rejects == 0);
    REQUIRE(rec.n_target_evals == 2);
    REQUIRE(rec.state > 0.0);
    REQUIRE(rec.state < 1.0);
    x = rec.state;
  }
}

TEST_CASE("latent slice forced trace updates the carried width", "[samplers]") {
  const UnnormTarget tgt = std_target("normal");
  ScriptedRng rng{{0.25, 0.75, 0.36787944117144233, 0.5}};
  double s = 2.0;
  const StepRecord rec = latent_slice_step(tgt, 0.5, s, 0.5, rng);
  const double center = (0.5 - 1.0) + 2.0 * 0.75;  // = 1.0
  const double width = 2.0 * std::abs(center - 0.5) + (-std::log(0.36787944117144233) / 0.5);
  REQUIRE(s == width);
  const double L = center - 0.5 * width, R = center + 0.5 * width;
  REQUIRE(rec.state == L + 0.5 * (R - L));
  CHECK(rec.n_rejects == 0);
  CHECK(rec.n_target_evals == 2);
}

TEST_CASE("latent slice validates its inputs", "[samplers]") {
  const UnnormTarget tgt = std_target("normal");
  Rng rng(21);
  double s = 0.0;
  CHECK_THROWS_AS(latent_slice_step(tgt, 0.5, s, 0.0, rng), KernelError);
  s = 1.0;
  CHECK_THROWS_AS(latent_slice_step(tgt, -1.0, s, 0.0, rng), std::invalid_argument);
  const UnnormTarget pos = std_target("gamma2.5");
  CHECK_THROWS_AS(latent_slice_step(pos, 0.5, s, -5.0, rng), KernelError);
}

TEST_CASE("latent slice recovers the heavy-tailed target median", "[samplers]") {
  const UnnormTarget tgt = std_target("invgamma2");
  Rng rng(22);
  double x = 1.0, s = 1.0;
  std::vector<double> draws;
  draws.reserve(1000000);
  for (int i = 0; i < 1000000; ++i) {
    x = latent_slice_step(tgt, 0.02, s, x, rng).state;
    draws.push_back(x);
  }
  CHECK_THAT(median_of(draws), WithinAbs(0.5958243473776974, 0.008));
}

TEST_CASE("elliptical slice requires an untruncated Student-t pseudo", "[samplers]") {
  const UnnormTarget tgt = std_target("normal");
  Rng rng(23);
  CHECK_THROWS_AS(gess_step(tgt, ScalarDist::normal(0.0, 1.0), 0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(gess_step(tgt, parse_dist("t(0,1,5)[0,inf)"), 1.0, rng), std::invalid_argument);
}

TEST_CASE("elliptical slice accepts the first angle when the residual is constant", "[samplers]") {
  // Target proportional to the pseudo-target itself: the residual ratio is
  // flat, so every first angle clears the threshold.
  const ScalarDist pseudo = ScalarDist::student_t(0.3, 1.1, 7.0);
  const UnnormTarget tgt{[pseudo](double t) { return pseudo.log_pdf(t); }, -kInf, kInf, "t-copy"};
  Rng rng(24);
  double x = 0.8;
  for (int i = 0; i < 300; ++i) {
    const StepRecord rec = gess_step(tgt, pseudo, x, rng);
    REQUIRE(rec.n_rejects == 0);
    REQUIRE(rec.n_target_evals == 2);
    REQUIRE(rec.moved);
    x = rec.state;
  }
}

TEST_CASE("independence sampler with pseudo equal to the target always moves", "[samplers]") {
  const UnnormTarget tgt = std_target("normal");
  const ScalarDist pseudo = ScalarDist::normal(0.0, 1.0);
  Rng rng(25);
  double x = 0.2;
  for (int i = 0; i < 500; ++i) {
    const StepRecord rec = imh_step(tgt, pseudo, x, rng);
    REQUIRE(rec.moved);
    REQUIRE(rec.n_rejects == 0);
    REQUIRE(rec.n_target_evals == 2);
    x = rec.state;
  }
}

TEST_CASE("independence sampler acceptance rate matches the frozen overlap value", "[samplers]") {
  // Long-run acceptance for a standard normal target proposed from t(0,2,5);
  // reference value from a 2e6-draw Monte Carlo run (se 2.85e-4).
  const UnnormTarget tgt = std_target("normal");
  const ScalarDist pseudo = ScalarDist::student_t(0.0, 2.0, 5.0);
  Rng rng(26);
  double x = 0.2;
  const int n = 200000;
  std::vector<double> acc;
  acc.reserve(n);
  for (int i = 0; i < n; ++i) {
    const StepRecord rec = imh_step(tgt, pseudo, x, rng);
    acc.push_back(rec.moved ? 1.0 : 0.0);
    x = rec.state;
  }
  const double rate = mean_of(acc);
  const double se = std::sqrt(batch_se(acc) * batch_se(acc) + 2.85e-4 * 2.85e-4);
  CHECK(std::fabs(rate - 0.5556830927142433) < 3.0 * se);
}

TEST_CASE("independence sampler: a diffuse pseudo accepts far less often than a tuned one", "[samplers]") {
  const UnnormTarget tgt = std_target("gamma2.5");
  const ScalarDist tuned = parse_dist("t(1.47,1.82,5)[0,inf)");
  const ScalarDist diffuse = parse_dist("t(1.47,7.27,5)[0,inf)");
  auto rate = [&](const ScalarDist& pseudo, std::uint64_t seed) {
    Rng rng(seed);
    double x = 2.0;
    int moved = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
      const StepRecord rec = imh_step(tgt, pseudo, x, rng);
      moved += rec.moved ? 1 : 0;
      x = rec.state;
    }
    return double(moved) / n;
  };
  const double r_tuned = rate(tuned, 27);
  const double r_diffuse = rate(diffuse, 28);
  CHECK(r_tuned > r_diffuse + 0.1);
}

TEST_CASE("random-walk forced traces: uphill always accepted, downhill can reject", "[samplers]") {
  const UnnormTarget tgt = std_target("normal");
  {
    // Proposal lands at higher density; even a near-one acceptance draw passes.
    ScriptedRng rng{{0.15865525393145705, 0.999999}};
    const double x1 = 1.0 + 1.0 * normal_quantile(0.15865525393145705);
    const StepRecord rec = rwm_step(tgt, 1.0, 1.0, rng);
    REQUIRE(rec.moved);
    REQUIRE(rec.state == x1);
    REQUIRE(rec.n_target_evals == 2);
  }
  {
    // Proposal at lower density with a mediocre acceptance draw is refused.
    ScriptedRng rng{{0.8413447460685429, 0.5}};
    const StepRecord rec = rwm_step(tgt, 1.0, 1.0, rng);
    REQUIRE_FALSE(rec.moved);
    REQUIRE(rec.state == 1.0);
    REQUIRE(rec.n_rejects == 1);
    REQUIRE(rec.n_target_evals == 2);
  }
}

TEST_CASE("random walk recovers the heavy-tailed target median", "[samplers]") {
  const UnnormTarget tgt = std_target("invgamma2");
  Rng rng(29);
  double x = 1.0;
  std::vector<double> draws;
  draws.reserve(1000000);
  for (int i = 0; i < 1000000; ++i) {
    x = rwm_step(tgt, 7.0, x, rng).state;
    draws.push_back(x);
  }
  CHECK_THAT(median_of(draws), WithinAbs(0.5958243473776974, 0.02));
}

namespace {

// Correlated Gaussian (rho = 0.7) truncated to the positive quadrant, with
// frozen tensor-quadrature moments.
VecTarget corr_trunc_gauss() {
  VecTarget t = make_vec_target(
      [](const std::vector<double>& x) {
        const double a = x[0], b = x[1];
        return -(a * a - 1.4 * a * b + b * b) / (2.0 * 0.51);
      },
      2, "corr-trunc-gauss");
  t.lo = {0.0, 0.0};
  t.hi = {kInf, kInf};
  return t;
}
constexpr double kCorrEx = 0.90812362225981;
constexpr double kCorrExx = 1.21306849629322;
constexpr double kCorrExy = 1.004383566145;

}  // namespace

TEST_CASE("multivariate quantile slice with an exact independent pseudo never rejects", "[samplers]") {
  const VecTarget tgt = make_vec_target(
      [](const std::vector<double>& x) { return -0.5 * (x[0] * x[0] + x[1] * x[1]); }, 2, "iid-normal");
  const MultiPseudo pseudo =
      independent_pseudo({ScalarDist::normal(0.0, 1.0), ScalarDist::normal(0.0, 1.0)});
  Rng rng(30);
  std::vector<double> x{0.2, -0.3};
  for (int i = 0; i < 500; ++i) {
    const VecStepRecord rec = mqslice_step(tgt, pseudo, x, rng);
    REQUIRE(rec.n_rejects == 0);
    REQUIRE(rec.n_target_evals == 2);
    REQUIRE(rec.has_psi);
    x = rec.state;
  }
}

TEST_CASE("multivariate quantile slice with an exact cascade pseudo never rejects", "[samplers]") {
  // Gaussian chain x0 ~ N(0,1), x1 | x0 ~ N(x0,1), factorized backwards:
  // coordinate 0 is the marginal of x1, coordinate 1 conditions on it.
  const VecTarget tgt = make_vec_target(
      [](const std::vector<double>& x) {
        const double a = x[1], b = x[0];  // a = first chain variable
        return -0.5 * a * a - 0.5 * (b - a) * (b - a);
      },
      2, "gauss-chain");
  const MultiPseudo pseudo = cascade_pseudo(2, [](const std::vector<double>& prefix, std::size_t d) {
    if (d == 0) return ScalarDist::normal(0.0, std::sqrt(2.0));
    return ScalarDist::normal(0.5 * prefix[0], std::sqrt(0.5));
  });

  // The transform must be a bijection with the joint density as Jacobian:
  // round trip and constant importance ratio.
  Rng rg(31);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x{rg.normal() * 1.4, rg.normal()};
    const std::vector<double> psi = pseudo.to_psi(x);
    double lp = 0.0;
    const std::vector<double> back = pseudo.from_psi(psi, &lp);
    REQUIRE_THAT(back[0], WithinAbs(x[0], 1e-9));
    REQUIRE_THAT(back[1], WithinAbs(x[1], 1e-9));
    REQUIRE_THAT(lp, WithinAbs(pseudo.log_pdf(x), 1e-9));
    REQUIRE_THAT(tgt(x) - lp, WithinAbs(std::log(2.0 * 3.141592653589793), 1e-9));
  }

  Rng rng(32);
  std::vector<double> x{0.1, 0.4};
  for (int i = 0; i < 300; ++i) {
    const VecStepRecord rec = mqslice_step(tgt, pseudo, x, rng);
    REQUIRE(rec.n_rejects == 0);
    REQUIRE(rec.n_target_evals == 2);
    x = rec.state;
  }
}

TEST_CASE("multivariate quantile slice matches quadrature moments on a truncated target", "[samplers]") {
  const VecTarget tgt = corr_trunc_gauss();
  const MultiPseudo pseudo = independent_pseudo(
      {parse_dist("t(0.9,0.75,5)[0,inf)"), parse_dist("t(0.9,0.75,5)[0,inf)")});
  Rng rng(33);
  std::vector<double> x{0.9, 0.9};
  const int n = 100000;
  std::vector<double> m1(n), m2(n), cross(n);
  for (int i = 0; i < n; ++i) {
    const VecStepRecord rec = mqslice_step(tgt, pseudo, x, rng);
    REQUIRE(rec.n_target_evals - rec.n_rejects == 2);
    x = rec.state;
    m1[i] = x[0];
    m2[i] = x[1];
    cross[i] = x[0] * x[1];
  }
  CHECK(std::fabs(mean_of(m1) - kCorrEx) < 3.0 * batch_se(m1));
  CHECK(std::fabs(mean_of(m2) - kCorrEx) < 3.0 * batch_se(m2));
  CHECK(std::fabs(mean_of(cross) - kCorrExy) < 3.0 * batch_se(cross));
}

TEST_CASE("multivariate quantile slice validates dimensions", "[samplers]") {
  const VecTarget tgt = corr_trunc_gauss();
  const MultiPseudo pseudo = independent_pseudo({parse_dist("t(0.9,0.75,5)[0,inf)")});
  Rng rng(34);
  CHECK_THROWS_AS(mqslice_step(tgt, pseudo, {0.9, 0.9}, rng), std::invalid_argument);
}

TEST_CASE("hyperrectangle slice on a flat box target accepts immediately once clipped", "[samplers]") {
  VecTarget tgt = make_vec_target([](const std::vector<double>&) { return 0.0; }, 2, "flat-box");
  tgt.lo = {0.0, 0.0};
  tgt.hi = {1.0, 1.0};
  Rng rng(35);
  std::vector<double> x{0.5, 0.5};
  for (int i = 0; i < 200; ++i) {
    const VecStepRecord rec = mslice_hyperrect_step(tgt, {0.5, 0.5}, x, rng);
    REQUIRE(rec.n_rejects == 0);
    REQUIRE(rec.n_target_evals == 2);
    REQUIRE_FALSE(rec.has_psi);
    x = rec.state;
  }
}

TEST_CASE("hyperrectangle slice matches quadrature moments on a truncated target", "[samplers]") {
  const VecTarget tgt = corr_trunc_gauss();
  Rng rng(36);
  std::vector<double> x{0.9, 0.9};
  const int n = 100000;
  std::vector<double> m1(n), sq(n);
  for (int i = 0; i < n; ++i) {
    x = mslice_hyperrect_step(tgt, {1.5, 1.5}, x, rng).state;
    m1[i] = x[0];
    sq[i] = x[1] * x[1];
  }
  CHECK(std::fabs(mean_of(m1) - kCorrEx) < 3.0 * batch_se(m1));
  CHECK(std::fabs(mean_of(sq) - kCorrExx) < 3.0 * batch_se(sq));
}

TEST_CASE("hyperrectangle slice in one dimension reproduces zero-budget stepping out", "[samplers]") {
  const UnnormTarget uni = std_target("normal");
  const VecTarget tgt = make_vec_target(
      [&uni](const std::vector<double>& x) { return uni(x[0]); }, 1, "normal-1d");
  Rng ra(37), rb(37);
  double xa = 0.2;
  std::vector<double> xb{0.2};
  for (int i = 0; i < 3000; ++i) {
    const StepRecord ru = stepout_slice_step(uni, 2.5, 0, xa, ra);
    const VecStepRecord rv = mslice_hyperrect_step(tgt, {2.5}, xb, rb);
    REQUIRE(ru.state == rv.state[0]);
    REQUIRE(ru.n_rejects == rv.n_rejects);
    REQUIRE(ru.n_target_evals == rv.n_target_evals);
    xa = ru.state;
    xb = rv.state;
  }
}

TEST_CASE("hyperrectangle slice validates widths", "[samplers]") {
  const VecTarget tgt = corr_trunc_gauss();
  Rng rng(38);
  CHECK_THROWS_AS(mslice_hyperrect_step(tgt, {1.5}, {0.9, 0.9}, rng), std::invalid_argument);
  CHECK_THROWS_AS(mslice_hyperrect_step(tgt, {1.5, 0.0}, {0.9, 0.9}, rng), std::invalid_argument);
}

TEST_CASE("chain runner keeps exactly the post-burn-in draws", "[samplers]") {
  int calls = 0;
  auto kernel = [&calls](double x, Rng&) {
    ++calls;
    StepRecord rec;
    rec.state = x + 1.0;
    rec.n_target_evals = 2;
    rec.moved = true;
    return rec;
  };
  const ChainResult res = run_chain(kernel, 0.0, 10, 5, 1);
  CHECK(calls == 15);
  REQUIRE(res.draws.size() == 10);
  CHECK(res.draws.front() == 6.0);
  CHECK(res.draws.back() == 15.0);
  CHECK(res.evals_per_iter.size() == 10);
  CHECK(res.mean_evals() == 2.0);
  CHECK(res.n_moved == 10);
  CHECK(res.burnin == 5);
}

TEST_CASE("chain runner with zero iterations yields an empty timed phase", "[samplers]") {
  auto kernel = [](double x, Rng&) {
    StepRecord rec;
    rec.state = x;
    rec.n_target_evals = 1;
    return rec;
  };
  const ChainResult res = run_chain(kernel, 0.0, 0, 3, 2);
  CHECK(res.draws.empty());
  CHECK(res.evals_per_iter.empty());
  CHECK(res.cpu_seconds >= 0.0);
  CHECK(res.mean_evals() == 0.0);
}

TEST_CASE("chain runner is deterministic given the seed", "[samplers]") {
  const UnnormTarget tgt = std_target("gamma2.5");
  const ScalarDist pseudo = parse_dist("t(1.47,1.82,5)[0,inf)");
  auto kernel = [&](double x, Rng& rng) { return qslice_step(tgt, pseudo, x, rng); };
  const ChainResult a = run_chain(kernel, 2.0, 2000, 100, 40, 7, "qslice");
  const ChainResult b = run_chain(kernel, 2.0, 2000, 100, 40, 7, "qslice");
  REQUIRE(a.draws == b.draws);
  REQUIRE(a.psis == b.psis);
  REQUIRE(a.evals_per_iter == b.evals_per_iter);
  CHECK(a.total_rejects == b.total_rejects);
  CHECK(a.n_moved == b.n_moved);
  CHECK(a.has_psi);
  CHECK(a.psis.size() == a.draws.size());
  CHECK(a.kernel_label == "qslice");
  CHECK(a.seed == 40);
  CHECK(a.stream == 7);
  for (size_t i = 0; i < a.draws.size(); i += 97) REQUIRE(a.draws[i] == pseudo.inv_cdf(a.psis[i]));
  // A different stream must diverge.
  const ChainResult c = run_chain(kernel, 2.0, 2000, 100, 40, 8, "qslice");
  CHECK(a.draws != c.draws);
}

TEST_CASE("chain runner reports the failing iteration", "[samplers]") {
  int calls = 0;
  auto kernel = [&calls](double x, Rng&) {
    if (calls == 7) throw std::runtime_error("boom");
    ++calls;
    StepRecord rec;
    rec.state = x;
    rec.n_target_evals = 1;
    return rec;
  };
  CHECK_THROWS_MATCHES(run_chain(kernel, 0.0, 10, 5, 3, 0, "toy"), KernelError,
                       Catch::Matchers::MessageMatches(
                           ContainsSubstring("iteration 7") && ContainsSubstring("boom") &&
                           ContainsSubstring("toy")));
}
