#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "slicekit/diagnostics.hpp"
#include "slicekit/rng.hpp"
#include "slicekit/special.hpp"

using namespace slicekit;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

// Stationary AR(1) with unit innovation variance; ESS/S converges to
// (1 - phi) / (1 + phi).
std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y(n);
  y[0] = rng.normal() / std::sqrt(1.0 - phi * phi);
  for (std::size_t t = 1; t < n; ++t) y[t] = phi * y[t - 1] + rng.normal();
  return y;
}

std::vector<double> iid_normal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y(n);
  for (auto& v : y) v = rng.normal();
  return y;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("ess of iid draws is close to the sample count", "[diagnostics]") {
  const std::size_t S = 100000;
  const double e = ess(iid_normal(S, 401));
  REQUIRE(e / double(S) > 0.9);
  REQUIRE(e / double(S) < 1.1);
}

TEST_CASE("ess matches the AR(1) autocorrelation factor", "[diagnostics]") {
  const std::size_t S = 100000;
  const double r_half = ess(ar1(0.5, S, 402)) / double(S);
  const double expect_half = 1.0 / 3.0;
  REQUIRE(std::abs(r_half - expect_half) < 0.15 * expect_half);

  const double r_nine = ess(ar1(0.9, S, 403)) / double(S);
  const double expect_nine = 0.1 / 1.9;
  REQUIRE(std::abs(r_nine - expect_nine) < 0.15 * expect_nine);
}

TEST_CASE("ess is invariant under affine maps of the series", "[diagnostics]") {
  auto y = ar1(0.7, 20000, 404);
  const double base = ess(y);
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = 3.25 * y[i] - 11.0;
  REQUIRE(std::abs(ess(z) - base) <= 1e-8 * base);
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = -0.5 * y[i] + 2.0;
  REQUIRE(std::abs(ess(z) - base) <= 1e-8 * base);
}

TEST_CASE("ess rejects degenerate input", "[diagnostics]") {
  REQUIRE_THROWS_AS(ess(std::vector<double>(49, 0.0)), std::invalid_argument);
  REQUIRE_THROWS_WITH(ess(std::vector<double>(500, 1.25)), ContainsSubstring("constant"));
}

TEST_CASE("esps divides ess by elapsed cpu time", "[diagnostics]") {
  REQUIRE(esps(100.0, 4.0) == 25.0);
  REQUIRE(esps(0.0, 2.0) == 0.0);
  REQUIRE_THROWS_AS(esps(100.0, 0.0), std::domain_error);
  REQUIRE_THROWS_AS(esps(100.0, -1.0), std::domain_error);
}

TEST_CASE("ks statistic for one sample at the median", "[diagnostics]") {
  const auto res = ks_test(std::vector<double>{0.0}, [](double x) { return normal_cdf(x); });
  REQUIRE(res.D == 0.5);
  REQUIRE(res.p == 1.0);  // D >= 0.5 is certain when n = 1
}

TEST_CASE("ks test is calibrated at the 5% level", "[diagnostics]") {
  Rng rng(405);
  const std::size_t n = 10000;
  int rejections = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> u(n);
    for (auto& v : u) v = rng.uniform01();
    const auto res = ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
    if (res.p < 0.05) ++rejections;
  }
  REQUIRE(rejections >= 30);
  REQUIRE(rejections <= 70);
}

TEST_CASE("ks test flags a point mass in the tail", "[diagnostics]") {
  const std::vector<double> xs(100, normal_quantile(0.99));
  const auto res = ks_test(xs, [](double x) { return normal_cdf(x); });
  REQUIRE(res.D >= 0.98);
  REQUIRE(res.p < 1e-10);
}

TEST_CASE("ks statistic is invariant under monotone reparameterization", "[diagnostics]") {
  const auto y = iid_normal(2000, 406);
  const auto base = ks_test(y, [](double x) { return normal_cdf(x); });
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = std::exp(y[i]);
  const auto mapped = ks_test(z, [](double x) { return normal_cdf(std::log(x)); });
  REQUIRE(std::abs(mapped.D - base.D) <= 1e-9);
}

TEST_CASE("ks test rejects invalid input", "[diagnostics]") {
  REQUIRE_THROWS_AS(ks_test(std::vector<double>{}, [](double) { return 0.5; }),
                    std::invalid_argument);
  const std::vector<double> with_nan = {0.1, std::numeric_limits<double>::quiet_NaN(), 0.3};
  REQUIRE_THROWS_AS(ks_test(with_nan, [](double x) { return x; }), std::domain_error);
  REQUIRE_THROWS_AS(
      ks_test(std::vector<double>{0.5}, [](double) { return std::numeric_limits<double>::quiet_NaN(); }),
      std::domain_error);
}

TEST_CASE("psrf is near one for matched chains and large for split ones", "[diagnostics]") {
  std::vector<std::vector<double>> good;
  for (int j = 0; j < 4; ++j) good.push_back(iid_normal(10000, 410 + j));
  REQUIRE(psrf(good) < 1.05);
  REQUIRE(psrf(good) >= 1.0);

  std::vector<std::vector<double>> split;
  split.push_back(iid_normal(1000, 420));
  split.push_back(iid_normal(1000, 421));
  for (auto& v : split[1]) v += 5.0;
  REQUIRE(psrf(split) > 2.0);
}

TEST_CASE("psrf rejects malformed chain sets", "[diagnostics]") {
  REQUIRE_THROWS_AS(psrf({iid_normal(1000, 430)}), std::invalid_argument);
  REQUIRE_THROWS_AS(psrf({iid_normal(1000, 431), iid_normal(999, 432)}), std::invalid_argument);
  REQUIRE_THROWS_AS(psrf({iid_normal(49, 433), iid_normal(49, 434)}), std::invalid_argument);
  const std::vector<std::vector<double>> flat(2, std::vector<double>(100, 3.0));
  REQUIRE_THROWS_WITH(psrf(flat), ContainsSubstring("constant"));
}

TEST_CASE("psrf tightens as chains lengthen", "[diagnostics]") {
  std::vector<double> short_runs, long_runs;
  for (int rep = 0; rep < 100; ++rep) {
    const std::uint64_t seed = 440 + 4 * static_cast<std::uint64_t>(rep);
    short_runs.push_back(psrf({iid_normal(100, seed), iid_normal(100, seed + 1)}));
    long_runs.push_back(psrf({iid_normal(10000, seed + 2), iid_normal(10000, seed + 3)}));
  }
  REQUIRE(median_of(short_runs) > median_of(long_runs));
}

TEST_CASE("diagnose assembles a per-chain report", "[diagnostics]") {
  const std::size_t S = 20000;
  const auto y = iid_normal(S, 450);
  const auto rep = diagnose(y, 2.0, [](double x) { return normal_cdf(x); }, "unit");
  REQUIRE(rep.n == S);
  REQUIRE(rep.kernel_label == "unit");
  REQUIRE(rep.ess == ess(y));
  REQUIRE(rep.esps == rep.ess / 2.0);
  REQUIRE(rep.ess <= double(S) * 1.1);
  std::vector<double> thinned;
  for (std::size_t i = 9; i < S; i += 10) thinned.push_back(y[i]);
  const auto ks = ks_test(thinned, [](double x) { return normal_cdf(x); });
  REQUIRE(rep.ks_D == ks.D);
  REQUIRE(rep.ks_p == ks.p);
  REQUIRE(rep.ks_p > 0.001);
  REQUIRE(std::isnan(rep.psrf_upper95));
  REQUIRE_THROWS_AS(diagnose(y, 2.0, [](double x) { return normal_cdf(x); }, "unit", 0),
                    std::invalid_argument);
}
