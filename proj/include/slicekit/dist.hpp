#pragma once

// Scalar parametric distributions with optional truncation. These play the
// role of the approximating density: log_pdf, cdf, inv_cdf, and sampling by
// inversion. Also the small library of standard unnormalized targets used by
// the benchmark harness.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>

#include "slicekit/rng.hpp"
#include "slicekit/special.hpp"

namespace slicekit {

enum class Family { Normal, StudentT, Uniform, Beta };

// Location-scale families plus Uniform(lo = location, width = scale) and
// Beta(alpha = location, beta = scale). Cauchy is StudentT with df = 1.
// Truncation renormalizes the density to (lo, hi).
struct ScalarDist {
  Family family = Family::Normal;
  double location = 0.0;
  double scale = 1.0;
  double df = 1.0;       // StudentT only
  double lo = -kInf;     // truncation bounds
  double hi = kInf;

  // cached at construction
  double slo_ = -kInf, shi_ = kInf;  // effective support
  double cdf_slo_ = 0.0, mass_ = 1.0, log_mass_ = 0.0;
  double sf_slo_ = 1.0;              // upper-tail window arithmetic
  bool upper_tail_ = false;

  ScalarDist() { finalize(); }
  ScalarDist(Family f, double loc, double sc, double d = 1.0, double tlo = -kInf, double thi = kInf)
      : family(f), location(loc), scale(sc), df(d), lo(tlo), hi(thi) {
    finalize();
  }

  static ScalarDist normal(double m, double s, double tlo = -kInf, double thi = kInf) {
    return ScalarDist(Family::Normal, m, s, 1.0, tlo, thi);
  }
  static ScalarDist student_t(double m, double s, double d, double tlo = -kInf, double thi = kInf) {
    return ScalarDist(Family::StudentT, m, s, d, tlo, thi);
  }
  static ScalarDist cauchy(double m, double s, double tlo = -kInf, double thi = kInf) {
    return ScalarDist(Family::StudentT, m, s, 1.0, tlo, thi);
  }
  static ScalarDist uniform(double a, double b) {
    if (!(b > a)) throw std::domain_error("uniform: requires b > a");
    return ScalarDist(Family::Uniform, a, b - a);
  }
  static ScalarDist beta(double a, double b, double tlo = -kInf, double thi = kInf) {
    return ScalarDist(Family::Beta, a, b, 1.0, tlo, thi);
  }

  void finalize() {
    if (!(scale > 0.0)) throw std::domain_error("ScalarDist: scale must be positive");
    if (family == Family::StudentT && !(df > 0.0)) throw std::domain_error("ScalarDist: df must be positive");
    if (family == Family::Beta && !(location > 0.0))
      throw std::domain_error("ScalarDist: beta shape parameters must be positive");
    if (!(lo < hi)) throw std::domain_error("ScalarDist: truncation requires lo < hi");
    double nlo = -kInf, nhi = kInf;
    if (family == Family::Uniform) { nlo = location; nhi = location + scale; }
    if (family == Family::Beta) { nlo = 0.0; nhi = 1.0; }
    slo_ = std::max(nlo, lo);
    shi_ = std::min(nhi, hi);
    if (!(slo_ < shi_)) throw std::domain_error("ScalarDist: truncation interval misses the support");
    cdf_slo_ = base_cdf(slo_);
    const double chi = base_cdf(shi_);
    // a window that sits in the upper tail is handled through survival
    // functions; cdf differences near 1 would cancel catastrophically
    upper_tail_ = cdf_slo_ > 0.5;
    sf_slo_ = base_sf(slo_);
    mass_ = upper_tail_ ? (sf_slo_ - base_sf(shi_)) : (chi - cdf_slo_);
    if (!(mass_ > 0.0)) throw std::domain_error("ScalarDist: zero mass on truncation interval");
    log_mass_ = std::log(mass_);
  }

  // untruncated CDF of the base family
  double base_cdf(double x) const {
    if (std::isnan(x)) throw std::domain_error("cdf: NaN argument");
    switch (family) {
      case Family::Normal:
        if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
        return normal_cdf((x - location) / scale);
      case Family::StudentT:
        if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
        return student_t_cdf((x - location) / scale, df);
      case Family::Uniform: {
        const double u = (x - location) / scale;
        return u <= 0.0 ? 0.0 : (u >= 1.0 ? 1.0 : u);
      }
      case Family::Beta:
        return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : inc_beta(location, scale, x));
    }
    return kNaN;
  }

  // upper-tail probability, relatively precise deep into the tail
  double base_sf(double x) const {
    if (std::isnan(x)) throw std::domain_error("cdf: NaN argument");
    switch (family) {
      case Family::Normal:
        if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
        return normal_cdf(-(x - location) / scale);
      case Family::StudentT:
        if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
        return student_t_cdf(-(x - location) / scale, df);
      case Family::Uniform:
        return 1.0 - base_cdf(x);
      case Family::Beta:
        return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : inc_beta(scale, location, 1.0 - x));
    }
    return kNaN;
  }

  // x with base_sf(x) = q
  double base_isf(double q) const {
    switch (family) {
      case Family::Normal:
        return location - scale * normal_quantile(q);
      case Family::StudentT:
        return location - scale * student_t_quantile(q, df);
      case Family::Uniform:
        return location + scale * (1.0 - q);
      case Family::Beta:
        return 1.0 - inc_beta_inv(scale, location, q);
    }
    return kNaN;
  }

  double base_quantile(double p) const {
    switch (family) {
      case Family::Normal:
        return location + scale * normal_quantile(p);
      case Family::StudentT:
        return location + scale * student_t_quantile(p, df);
      case Family::Uniform:
        return location + scale * p;
      case Family::Beta:
        return inc_beta_inv(location, scale, p);
    }
    return kNaN;
  }

  double base_log_pdf(double x) const {
    switch (family) {
      case Family::Normal:
        return log_normal_pdf((x - location) / scale) - std::log(scale);
      case Family::StudentT:
        return log_student_t_pdf((x - location) / scale, df) - std::log(scale);
      case Family::Uniform:
        return -std::log(scale);
      case Family::Beta:
        return (location - 1.0) * std::log(x) + (scale - 1.0) * std::log1p(-x) -
               (std::lgamma(location) + std::lgamma(scale) - std::lgamma(location + scale));
    }
    return kNaN;
  }

  double cdf(double x) const {
    if (std::isnan(x)) throw std::domain_error("cdf: NaN argument");
    if (x <= slo_) return 0.0;
    if (x >= shi_) return 1.0;
    const double v = upper_tail_ ? (sf_slo_ - base_sf(x)) / mass_ : (base_cdf(x) - cdf_slo_) / mass_;
    return v <= 0.0 ? 0.0 : (v >= 1.0 ? 1.0 : v);
  }

  double inv_cdf(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("inv_cdf: u must lie in (0,1)");
    double x;
    if (upper_tail_) {
      double q = sf_slo_ - u * mass_;
      if (q <= 0.0) q = std::nextafter(0.0, 1.0);
      if (q >= 1.0) q = std::nextafter(1.0, 0.0);
      x = base_isf(q);
    } else {
      double p = cdf_slo_ + u * mass_;
      // compounded probability may round onto the endpoints for narrow
      // truncation windows
      if (p >= 1.0) p = std::nextafter(1.0, 0.0);
      if (p <= 0.0) p = std::nextafter(0.0, 1.0);
      x = base_quantile(p);
    }
    if (x < slo_) x = slo_;
    if (x > shi_) x = shi_;
    return x;
  }

  double log_pdf(double x) const {
    if (std::isnan(x)) throw std::domain_error("log_pdf: NaN argument");
    if (x <= slo_ || x >= shi_) return -kInf;
    return base_log_pdf(x) - log_mass_;
  }

  double sample(Rng& rng) const { return inv_cdf(rng.uniform01()); }

  bool truncated() const { return std::isfinite(lo) || std::isfinite(hi); }
};

namespace detail {
// shortest decimal string that parses back to exactly v
inline std::string fmt_shortest(double v) {
  char buf[40];
  std::string best;
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) != v) continue;
    if (best.empty()) best = buf;
    // Prefer plain notation over an equally short exponent form (20 not 2e+01).
    if (!std::strchr(buf, 'e')) {
      if (std::strlen(buf) <= best.size()) best = buf;
      break;
    }
  }
  return best;
}
inline std::string fmt_bound(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return fmt_shortest(v);
}
}  // namespace detail

inline std::string to_string(const ScalarDist& d) {
  std::string s;
  switch (d.family) {
    case Family::Normal:
      s = "normal(" + detail::fmt_shortest(d.location) + "," + detail::fmt_shortest(d.scale) + ")";
      break;
    case Family::StudentT:
      s = "t(" + detail::fmt_shortest(d.location) + "," + detail::fmt_shortest(d.scale) + "," +
          detail::fmt_shortest(d.df) + ")";
      break;
    case Family::Uniform:
      s = "unif(" + detail::fmt_shortest(d.location) + "," + detail::fmt_shortest(d.location + d.scale) + ")";
      break;
    case Family::Beta:
      s = "beta(" + detail::fmt_shortest(d.location) + "," + detail::fmt_shortest(d.scale) + ")";
      break;
  }
  if (d.truncated()) s += "[" + detail::fmt_bound(d.lo) + "," + detail::fmt_bound(d.hi) + ")";
  return s;
}

// Grammar: name(args)[lo,hi] with name in {normal, t, cauchy, unif, uniform,
// beta}; bounds accept inf/-inf and either bracket style on each side.
inline ScalarDist parse_dist(const std::string& text) {
  const char* p = text.c_str();
  auto skip_ws = [&] { while (*p == ' ' || *p == '\t') ++p; };
  auto fail = [&](const std::string& what) -> ScalarDist {
    throw std::invalid_argument("distribution '" + text + "': " + what);
  };

  skip_ws();
  std::string name;
  while (std::isalpha(static_cast<unsigned char>(*p))) name += *p++;
  if (name.empty()) return fail("missing family name");
  skip_ws();
  if (*p != '(') return fail("expected '(' after family name");
  ++p;

  auto parse_num = [&](const char* field) {
    skip_ws();
    char* end = nullptr;
    double v = std::strtod(p, &end);
    if (end == p) fail(std::string("expected number for ") + field);
    p = end;
    skip_ws();
    return v;
  };
  auto parse_bound = [&](const char* field) {
    skip_ws();
    if (std::strncmp(p, "inf", 3) == 0) { p += 3; return kInf; }
    if (std::strncmp(p, "+inf", 4) == 0) { p += 4; return kInf; }
    if (std::strncmp(p, "-inf", 4) == 0) { p += 4; return -kInf; }
    return parse_num(field);
  };
  auto expect = [&](char c, const char* what) {
    skip_ws();
    if (*p != c) fail(std::string("expected '") + c + "' " + what);
    ++p;
  };

  double a = parse_num("first parameter");
  expect(',', "between parameters");
  double b = parse_num("second parameter");
  double c = 0.0;
  bool has_c = false;
  skip_ws();
  if (*p == ',') {
    ++p;
    c = parse_num("third parameter");
    has_c = true;
  }
  expect(')', "after parameters");

  double tlo = -kInf, thi = kInf;
  skip_ws();
  if (*p == '[' || *p == '(') {
    ++p;
    tlo = parse_bound("lower truncation bound");
    expect(',', "between truncation bounds");
    thi = parse_bound("upper truncation bound");
    skip_ws();
    if (*p != ']' && *p != ')') fail("expected closing bracket on truncation");
    ++p;
  }
  skip_ws();
  if (*p != '\0') fail("trailing characters");

  if (name == "normal" || name == "n") {
    if (has_c) fail("normal takes two parameters");
    return ScalarDist(Family::Normal, a, b, 1.0, tlo, thi);
  }
  if (name == "t" || name == "student") {
    if (!has_c) fail("t takes three parameters (location, scale, df)");
    return ScalarDist(Family::StudentT, a, b, c, tlo, thi);
  }
  if (name == "cauchy") {
    if (has_c) fail("cauchy takes two parameters");
    return ScalarDist(Family::StudentT, a, b, 1.0, tlo, thi);
  }
  if (name == "unif" || name == "uniform") {
    if (has_c) fail("unif takes two parameters");
    if (!(b > a)) fail("unif requires lo < hi");
    return ScalarDist(Family::Uniform, a, b - a, 1.0, tlo, thi);
  }
  if (name == "beta") {
    if (has_c) fail("beta takes two parameters");
    return ScalarDist(Family::Beta, a, b, 1.0, tlo, thi);
  }
  return fail("unknown family '" + name + "'");
}

// Unnormalized target: log density up to a constant, -inf off support.
struct UnnormTarget {
  std::function<double(double)> log_g;
  double lo = -kInf;
  double hi = kInf;
  std::string name;

  double operator()(double x) const {
    if (x <= lo || x >= hi) return -kInf;
    return log_g(x);
  }
};

// Standard study targets. The gamma target has shape 2.5 and unit rate; the
// inverse-gamma target has shape 2 and unit scale. The log-* variants are the
// same targets after a log change of variables (Jacobian folded in).
inline UnnormTarget std_target(const std::string& name) {
  if (name == "normal")
    return {[](double x) { return -0.5 * x * x; }, -kInf, kInf, "normal"};
  if (name == "gamma2.5")
    return {[](double x) { return 1.5 * std::log(x) - x; }, 0.0, kInf, "gamma2.5"};
  if (name == "invgamma2")
    return {[](double x) { return -3.0 * std::log(x) - 1.0 / x; }, 0.0, kInf, "invgamma2"};
  if (name == "log-gamma2.5")
    return {[](double y) { return 2.5 * y - std::exp(y); }, -kInf, kInf, "log-gamma2.5"};
  if (name == "log-invgamma2")
    return {[](double y) { return -2.0 * y - std::exp(-y); }, -kInf, kInf, "log-invgamma2"};
  throw std::out_of_range("std_target: unknown target '" + name + "'");
}

}  // namespace slicekit
