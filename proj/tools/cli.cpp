// slicebench: benchmark harness for the quantile slice sampling library.
// Subcommands: bench (standard-target battery), tune (pseudo selection and
// scalar-kernel tuning race), diag (probability-scale chain diagnostics),
// gprior (regression shrinkage example), ssm (state-space path example).
//
// Exit codes: 0 success, 2 argument/config error, 3 runtime or I/O error.

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jsonschema.hpp"
#include "slicekit/bench.hpp"
#include "slicekit/csv.hpp"
#include "slicekit/gprior.hpp"
#include "slicekit/ssm.hpp"

namespace slicebench {
namespace {

using nlohmann::json;
using namespace slicekit;

// ---------------------------------------------------------------------------
// Shared helpers

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
}

// "x.json" -> "x<suffix>"; other names just get the suffix appended.
std::string derived_path(const std::string& out, const std::string& suffix) {
  std::string base = out;
  const std::string ext = ".json";
  if (base.size() > ext.size() && base.compare(base.size() - ext.size(), ext.size(), ext) == 0)
    base.resize(base.size() - ext.size());
  return base + suffix;
}

json bound_json(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

const char* family_name(Family f) {
  switch (f) {
    case Family::Normal: return "normal";
    case Family::StudentT: return "t";
    case Family::Uniform: return "unif";
    default: return "beta";
  }
}

// NaN serializes as null through nlohmann; keep that for optional stats.
json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Quantile box for pseudo grids, shared with the bench pilot recipe.
StudentTGrid grid_from_samples(const std::vector<double>& samples, double trunc_lo,
                               double trunc_hi) {
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  auto q = [&](double p) { return sorted[std::size_t(p * double(sorted.size() - 1))]; };
  const double iqr = std::max(q(0.75) - q(0.25), 1e-6);
  StudentTGrid grid;
  grid.loc_lo = q(0.05);
  grid.loc_hi = q(0.95);
  grid.scale_lo = 0.1 * iqr;
  grid.scale_hi = 5.0 * iqr;
  grid.trunc_lo = trunc_lo;
  grid.trunc_hi = trunc_hi;
  return grid;
}

// ---------------------------------------------------------------------------
// bench

struct BenchFlags {
  std::string config;
  std::vector<std::string> targets;
  std::int64_t iters = 0;
  std::int64_t burnin = 0;
  std::size_t chains = 0;
  std::uint64_t seed = 0;
  std::size_t thin = 0;
  std::size_t jobs = 0;
  std::string out;
  std::string format;
};

BenchConfig bench_config_from(const BenchFlags& f, const CLI::App* sub) {
  BenchConfig cfg;
  json raw_kernels;
  if (!f.config.empty()) {
    json j;
    try {
      j = json::parse(read_file(f.config));
    } catch (const json::exception& e) {
      throw std::invalid_argument("config " + f.config + ": " + e.what());
    }
    validate_or_throw(bench_config_schema(), j, "config " + f.config);
    if (j.contains("targets")) cfg.targets = j["targets"].get<std::vector<std::string>>();
    if (j.contains("kernels")) raw_kernels = j["kernels"];
    if (j.contains("n_iter")) cfg.n_iter = j["n_iter"].get<std::int64_t>();
    if (j.contains("burnin")) cfg.burnin = j["burnin"].get<std::int64_t>();
    if (j.contains("n_chains")) cfg.n_chains = j["n_chains"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("thin")) cfg.thin = j["thin"].get<std::size_t>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<std::size_t>();
    if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
  }
  if (sub->count("--target")) cfg.targets = f.targets;
  if (sub->count("--iters")) cfg.n_iter = f.iters;
  if (sub->count("--burnin")) cfg.burnin = f.burnin;
  if (sub->count("--chains")) cfg.n_chains = f.chains;
  if (sub->count("--seed")) cfg.seed = f.seed;
  if (sub->count("--thin")) cfg.thin = f.thin;
  if (sub->count("--jobs")) cfg.jobs = f.jobs;
  if (sub->count("--out")) cfg.out_path = f.out;
  if (sub->count("--format")) cfg.format = f.format;
  if (!raw_kernels.is_null()) {
    cfg.kernels.clear();
    for (const auto& kj : raw_kernels) {
      KernelRowConfig row;
      row.label = kj.at("label").get<std::string>();
      const json& spec = kj.at("spec");
      if (spec.is_string()) {
        for (const std::string& t : cfg.targets) row.spec[t] = spec.get<std::string>();
      } else {
        for (const auto& [tk, tv] : spec.items()) row.spec[tk] = tv.get<std::string>();
      }
      cfg.kernels.push_back(std::move(row));
    }
  }
  return cfg;
}

int cmd_bench(const BenchFlags& f, const CLI::App* sub) {
  const BenchConfig cfg = bench_config_from(f, sub);
  const BenchResult res = run_bench(cfg);

  for (const GroupSummary& g : res.groups) {
    std::cout << g.target << " x " << g.kernel << ": K-S rejections " << g.ks_rejections << "/"
              << g.n_ks << ", psrf " << (std::isfinite(g.psrf) ? csv_num(g.psrf) : "n/a") << "\n";
  }

  if (cfg.format == "csv") {
    write_text_file(cfg.out_path, bench_csv(res));
    std::cout << "wrote " << cfg.out_path << " (" << res.rows.size() << " rows)\n";
    return 0;
  }
  json j;
  j["config"] = {{"n_iter", cfg.n_iter}, {"burnin", cfg.burnin},
                 {"n_chains", cfg.n_chains}, {"seed", cfg.seed},
                 {"thin", cfg.thin}, {"targets", cfg.targets}};
  json labels = json::array();
  for (const KernelRowConfig& k : cfg.kernels) labels.push_back(k.label);
  j["config"]["kernels"] = labels;
  j["rows"] = json::array();
  for (const BenchRow& r : res.rows) {
    j["rows"].push_back({{"target", r.target}, {"kernel", r.kernel},
                         {"pseudo_desc", r.pseudo_desc}, {"chain_id", r.chain_id},
                         {"ess", r.ess}, {"esps", r.esps}, {"cpu_seconds", r.cpu_seconds},
                         {"mean_evals", r.mean_evals}, {"ks_D", num_or_null(r.ks_D)},
                         {"ks_p", num_or_null(r.ks_p)}, {"psrf", num_or_null(r.psrf)}});
  }
  j["groups"] = json::array();
  for (const GroupSummary& g : res.groups) {
    j["groups"].push_back({{"target", g.target}, {"kernel", g.kernel},
                           {"n_chains", g.n_chains}, {"n_ks", g.n_ks},
                           {"ks_rejections", g.ks_rejections},
                           {"ks_rejection_rate", g.ks_rejection_rate()},
                           {"psrf", num_or_null(g.psrf)}});
  }
  write_json_file(cfg.out_path, j);
  return 0;
}

// ---------------------------------------------------------------------------
// tune

struct TuneFlags {
  std::string target;
  std::string samples;
  std::string method;
  std::string kernel;
  std::string range = "0.5:10";
  double df = 1.0;
  std::uint64_t seed = 1;
  std::string out;
};

void emit_tune_json(const std::string& out, const json& j) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(out, j);
  }
}

int cmd_tune_race(const TuneFlags& f) {
  if (f.target.empty())
    throw std::invalid_argument("tune: the kernel race needs --target");
  if (!f.samples.empty() || !f.method.empty())
    throw std::invalid_argument("tune: --kernel races take no --samples or --method");
  const std::size_t colon = f.range.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("tune: --range must look like lo:hi");
  auto num = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
      throw std::invalid_argument("tune: bad --range endpoint '" + s + "'");
    return v;
  };
  const double lo = num(f.range.substr(0, colon));
  const double hi = num(f.range.substr(colon + 1));
  const KernelKind kind = f.kernel == "rwm" ? KernelKind::rwm
                          : f.kernel == "stepout" ? KernelKind::stepout
                                                  : KernelKind::latent;
  const TuneRaceResult race = run_tune_race(f.target, kind, lo, hi, f.seed);
  json j;
  j["kernel"] = race.kernel;
  j["target"] = race.target;
  j["param"] = race.param;
  j["param_esps"] = race.param_esps;
  j["rounds"] = json::array();
  for (const RaceRound& r : race.rounds) {
    j["rounds"].push_back({{"values", r.values}, {"esps", r.esps}, {"winner", r.winner}});
  }
  emit_tune_json(f.out, j);
  return 0;
}

int cmd_tune(const TuneFlags& f) {
  if (!f.kernel.empty()) return cmd_tune_race(f);
  if (f.method.empty())
    throw std::invalid_argument("tune: pseudo selection needs --method (msw, auc, laplace, mm)");
  if (f.target.empty() == f.samples.empty())
    throw std::invalid_argument("tune: need exactly one of --target or --samples");

  json j;
  if (!f.samples.empty()) {
    const std::vector<double> samples = read_column(f.samples);
    if (samples.size() < 100)
      throw std::invalid_argument("tune: insufficient data: need at least 100 samples, got " +
                                  std::to_string(samples.size()));
    if (f.method == "laplace")
      throw std::invalid_argument("tune: laplace needs a named --target, not samples");
    if (f.method == "mm") {
      const ScalarDist dist = moment_match_pseudo(samples);
      j = {{"dist", to_string(dist)}, {"family", family_name(dist.family)},
           {"location", dist.location}, {"scale", dist.scale}, {"df", dist.df},
           {"trunc_lo", bound_json(dist.lo)}, {"trunc_hi", bound_json(dist.hi)},
           {"method", to_string(FitMethod::moment_match)},
           {"score", auc_from_samples(samples, dist)},
           {"meta", "moment match on " + std::to_string(samples.size()) + " samples"}};
    } else {
      const Criterion crit = f.method == "msw" ? Criterion::msw : Criterion::auc;
      const PseudoFit fit = optimize_pseudo(samples, grid_from_samples(samples, -kInf, kInf), crit);
      j = {{"dist", to_string(fit.dist)}, {"family", family_name(fit.dist.family)},
           {"location", fit.dist.location}, {"scale", fit.dist.scale}, {"df", fit.dist.df},
           {"trunc_lo", bound_json(fit.dist.lo)}, {"trunc_hi", bound_json(fit.dist.hi)},
           {"method", to_string(fit.method)}, {"criterion", to_string(fit.criterion)},
           {"score", fit.score}, {"meta", fit.meta}};
    }
    emit_tune_json(f.out, j);
    return 0;
  }

  const TargetSpec spec = target_spec(f.target);
  Rng rng(f.seed, 1ull << 33);
  std::vector<double> pilot(1000);
  for (double& v : pilot) v = spec.exact_sample(rng);

  if (f.method == "msw" || f.method == "auc") {
    const Criterion crit = f.method == "msw" ? Criterion::msw : Criterion::auc;
    const PseudoFit fit =
        optimize_pseudo(spec.target, grid_from_samples(pilot, spec.target.lo, spec.target.hi), crit);
    j = {{"dist", to_string(fit.dist)}, {"family", family_name(fit.dist.family)},
         {"location", fit.dist.location}, {"scale", fit.dist.scale}, {"df", fit.dist.df},
         {"trunc_lo", bound_json(fit.dist.lo)}, {"trunc_hi", bound_json(fit.dist.hi)},
         {"method", to_string(fit.method)}, {"criterion", to_string(fit.criterion)},
         {"score", fit.score}, {"meta", fit.meta}};
  } else if (f.method == "laplace") {
    std::vector<double> sorted = pilot;
    std::sort(sorted.begin(), sorted.end());
    const ScalarDist dist = laplace_pseudo(spec.target, sorted[sorted.size() / 2], f.df);
    j = {{"dist", to_string(dist)}, {"family", family_name(dist.family)},
         {"location", dist.location}, {"scale", dist.scale}, {"df", dist.df},
         {"trunc_lo", bound_json(dist.lo)}, {"trunc_hi", bound_json(dist.hi)},
         {"method", to_string(FitMethod::laplace)},
         {"score", auc_quadrature(spec.target, dist)},
         {"meta", "curvature fit at the mode of " + f.target}};
  } else {  // mm
    const ScalarDist dist = moment_match_pseudo(pilot, spec.target.lo, spec.target.hi);
    j = {{"dist", to_string(dist)}, {"family", family_name(dist.family)},
         {"location", dist.location}, {"scale", dist.scale}, {"df", dist.df},
         {"trunc_lo", bound_json(dist.lo)}, {"trunc_hi", bound_json(dist.hi)},
         {"method", to_string(FitMethod::moment_match)},
         {"score", auc_quadrature(spec.target, dist)},
         {"meta", "moment match on 1000 pilot draws from " + f.target}};
  }
  emit_tune_json(f.out, j);
  return 0;
}

// ---------------------------------------------------------------------------
// diag

struct DiagFlags {
  std::string chain;
  std::string pseudo;
  std::size_t bins = 30;
  std::string out = "diag.json";
};

int cmd_diag(const DiagFlags& f) {
  const std::vector<double> values = read_column(f.chain);
  const ScalarDist dist = parse_dist(f.pseudo);
  std::vector<double> psis;
  psis.reserve(values.size());
  std::size_t excluded = 0;
  for (double v : values) {
    if (v <= dist.lo || v >= dist.hi) {
      ++excluded;
      continue;
    }
    const double p = dist.cdf(v);
    if (p <= 0.0 || p >= 1.0) {
      ++excluded;  // tail value rounds to the boundary
      continue;
    }
    psis.push_back(p);
  }
  if (excluded > 0)
    std::cerr << "warning: excluded " << excluded << " of " << values.size()
              << " values outside the pseudo support\n";

  const PsiDiagnostics diag = psi_diagnostics(psis, f.bins);
  const std::string hist_path = derived_path(f.out, "_hist.csv");

  std::string hist = csv_row({"bin_lo", "bin_hi", "count", "density"});
  for (std::size_t b = 0; b < diag.histogram.size(); ++b) {
    const double lo = double(b) / double(f.bins);
    const double hi = double(b + 1) / double(f.bins);
    const double density = double(diag.histogram[b]) * double(f.bins) / double(psis.size());
    hist += csv_row({csv_num(lo), csv_num(hi), std::to_string(diag.histogram[b]), csv_num(density)});
  }
  write_text_file(hist_path, hist);
  std::cout << "wrote " << hist_path << "\n";

  json j = {{"pseudo", to_string(dist)},   {"shape", to_string(diag.shape)},
            {"auc", diag.auc_estimate},    {"bins", f.bins},
            {"n_used", psis.size()},       {"n_excluded", excluded},
            {"histogram_csv", hist_path}};
  write_json_file(f.out, j);
  return 0;
}

// ---------------------------------------------------------------------------
// gprior

struct GpriorFlags {
  std::string sampler = "stepout";
  std::string pseudo = "none";
  bool log_scale = false;
  std::int64_t iters = 50000;
  std::int64_t burnin = 10000;
  std::size_t chains = 2;
  std::uint64_t seed = 1;
  long extra_cost = 0;
  double laplace_df = 1.0;
  std::string out = "gprior.json";
};

int cmd_gprior(const GpriorFlags& f) {
  GPriorConfig base;
  base.kernel = f.sampler == "rwm" ? GammaKernel::rwm
                : f.sampler == "stepout" ? GammaKernel::stepout
                : f.sampler == "latent" ? GammaKernel::latent
                : f.sampler == "gess" ? GammaKernel::gess
                : f.sampler == "imh" ? GammaKernel::imh
                                     : GammaKernel::qslice;
  base.pseudo = f.pseudo == "none" ? GammaPseudo::none
                : f.pseudo == "laplace" ? GammaPseudo::laplace
                : f.pseudo == "laplace-wide" ? GammaPseudo::laplace_wide
                                             : GammaPseudo::auc_samples;
  base.log_scale = f.log_scale;
  base.n_iter = f.iters;
  base.burnin = f.burnin;
  base.laplace_df = f.laplace_df;
  base.seed = f.seed;

  const GPriorModel model = make_gprior_model(f.extra_cost);
  std::vector<GPriorRun> runs;
  runs.reserve(f.chains);
  for (std::size_t c = 0; c < f.chains; ++c) {
    GPriorConfig cfg = base;
    cfg.stream = c;
    runs.push_back(run_gprior(model, cfg));
  }

  double psrf_gamma = kNaN;
  if (f.chains >= 2) {
    std::vector<std::vector<double>> gamma_chains;
    for (const GPriorRun& r : runs) gamma_chains.push_back(r.gamma);
    try {
      psrf_gamma = psrf(gamma_chains);
    } catch (const std::runtime_error&) {
      psrf_gamma = kNaN;
    }
  }
  double pooled_mean = 0.0, pooled_m2 = 0.0;
  std::size_t pooled_n = 0;
  for (const GPriorRun& r : runs) {
    for (double g : r.gamma) {
      ++pooled_n;
      const double d = g - pooled_mean;
      pooled_mean += d / double(pooled_n);
      pooled_m2 += d * (g - pooled_mean);
    }
  }
  const double pooled_sd = pooled_n > 1 ? std::sqrt(pooled_m2 / double(pooled_n - 1)) : 0.0;

  const bool scalar_kernel = base.kernel == GammaKernel::rwm ||
                             base.kernel == GammaKernel::stepout ||
                             base.kernel == GammaKernel::latent;
  double ess_mean = 0.0, esps_mean = 0.0, evals_mean = 0.0;
  std::string csv = csv_row({"chain", "kernel", "pseudo", "ess", "esps", "psrf", "mean_evals",
                             "gamma_mean"});
  json per_chain = json::array();
  for (std::size_t c = 0; c < f.chains; ++c) {
    const GPriorRun& r = runs[c];
    double chain_gamma_mean = 0.0;
    for (double g : r.gamma) chain_gamma_mean += g;
    chain_gamma_mean /= double(r.gamma.size());
    ess_mean += r.ess_value / double(f.chains);
    esps_mean += r.esps_value / double(f.chains);
    evals_mean += r.mean_evals / double(f.chains);
    csv += csv_row({std::to_string(c), f.sampler, f.pseudo, csv_num(r.ess_value),
                    csv_num(r.esps_value), csv_num(psrf_gamma), csv_num(r.mean_evals),
                    csv_num(chain_gamma_mean)});
    json row = {{"chain", c}, {"ess", r.ess_value}, {"esps", r.esps_value},
                {"mean_evals", r.mean_evals}, {"gamma_mean", chain_gamma_mean}};
    if (scalar_kernel) row["tuned_param"] = r.tuned_param;
    per_chain.push_back(row);
  }
  const std::string csv_path = derived_path(f.out, ".csv");
  write_text_file(csv_path, csv);
  std::cout << "wrote " << csv_path << "\n";

  json j = {{"sampler", f.sampler}, {"pseudo", f.pseudo}, {"log_scale", f.log_scale},
            {"iters", f.iters}, {"burnin", f.burnin}, {"chains", f.chains},
            {"extra_cost", f.extra_cost}, {"gamma_mean", pooled_mean},
            {"gamma_sd", pooled_sd}, {"psrf", num_or_null(psrf_gamma)},
            {"ess_mean", ess_mean}, {"esps_mean", esps_mean}, {"mean_evals", evals_mean},
            {"per_chain", per_chain}};
  if (scalar_kernel) j["tuned_param"] = runs.front().tuned_param;
  if (runs.front().pseudo_dist) j["pseudo_dist"] = to_string(*runs.front().pseudo_dist);
  std::cout << "gamma mean " << csv_num(pooled_mean) << ", sd " << csv_num(pooled_sd) << ", psrf "
            << (std::isfinite(psrf_gamma) ? csv_num(psrf_gamma) : "n/a") << "\n";
  write_json_file(f.out, j);
  return 0;
}

// ---------------------------------------------------------------------------
// ssm

struct SsmFlags {
  std::string sampler = "all";
  std::string family = "all";
  std::size_t T = 20;
  std::int64_t iters = 4000;
  std::int64_t burnin = 1000;
  std::size_t chains = 2;
  std::uint64_t seed = 71;
  double width = 1.5;
  double t_df = 5.0;
  std::string out = "ssm.json";
};

int cmd_ssm(const SsmFlags& f) {
  SsmConfig cfg;
  cfg.T = f.T;
  cfg.n_iter = f.iters;
  cfg.burnin = f.burnin;
  cfg.n_chains = f.chains;
  cfg.seed = f.seed;
  cfg.mslice_width = f.width;
  cfg.t_df = f.t_df;
  cfg.only_sampler = f.sampler == "all" ? "" : f.sampler;
  cfg.only_family = f.family == "all" ? "" : f.family;
  const SsmDemoResult res = run_ssm_demo(cfg);

  std::string csv =
      csv_row({"sampler", "settings", "psrf_max", "esps_mean", "esps_min", "mean_evals"});
  json rows = json::array();
  for (const SsmRow& r : res.rows) {
    std::cout << r.sampler << "[" << r.settings << "]: evals/iter " << csv_num(r.mean_evals)
              << ", psrf " << (std::isfinite(r.psrf_max) ? csv_num(r.psrf_max) : "n/a") << "\n";
    csv += csv_row({r.sampler, r.settings, csv_num(r.psrf_max), csv_num(r.esps_mean),
                    csv_num(r.esps_min), csv_num(r.mean_evals)});
    rows.push_back({{"sampler", r.sampler}, {"settings", r.settings},
                    {"psrf_max", num_or_null(r.psrf_max)}, {"esps_mean", r.esps_mean},
                    {"esps_min", r.esps_min}, {"mean_evals", r.mean_evals}});
  }
  const std::string csv_path = derived_path(f.out, ".csv");
  write_text_file(csv_path, csv);
  std::cout << "wrote " << csv_path << "\n";

  const json j = {{"T", f.T}, {"iters", f.iters}, {"burnin", f.burnin}, {"chains", f.chains},
                  {"rows", rows}};
  write_json_file(f.out, j);
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

const nlohmann::json& bench_config_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(R"SCHEMA(
{
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "slicebench bench configuration",
  "description": "Input config for `slicebench bench`. Command-line flags override file values. A kernel row's `spec` is either one kernel-config string applied to every target, or an object mapping target names to kernel-config strings.",
  "type": "object",
  "additionalProperties": false,
  "properties": {
    "targets": {
      "type": "array",
      "minItems": 1,
      "items": { "type": "string" }
    },
    "kernels": {
      "type": "array",
      "minItems": 1,
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["label", "spec"],
        "properties": {
          "label": { "type": "string" },
          "spec": {
            "type": ["string", "object"],
            "additionalProperties": { "type": "string" }
          }
        }
      }
    },
    "n_iter": { "type": "integer", "minimum": 0 },
    "burnin": { "type": "integer", "minimum": 0 },
    "n_chains": { "type": "integer", "minimum": 1 },
    "seed": { "type": "integer", "minimum": 0 },
    "thin": { "type": "integer", "minimum": 1 },
    "jobs": { "type": "integer", "minimum": 1 },
    "out": { "type": "string" },
    "format": { "enum": ["csv", "json"] }
  }
}
)SCHEMA");
  return schema;
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Benchmark harness for quantile slice sampling"};
  app.require_subcommand(1);

  BenchFlags bf;
  CLI::App* bench = app.add_subcommand("bench", "Standard-target sampler battery");
  bench->add_option("--config", bf.config, "JSON config file (flags override it)");
  bench->add_option("--target", bf.targets, "Targets to run (repeatable)");
  bench->add_option("--iters", bf.iters, "Kept iterations per chain");
  bench->add_option("--burnin", bf.burnin, "Burn-in iterations per chain");
  bench->add_option("--chains", bf.chains, "Chains per (target, kernel) group");
  bench->add_option("--seed", bf.seed, "Base RNG seed");
  bench->add_option("--thin", bf.thin, "Thinning stride for the K-S check");
  bench->add_option("--jobs", bf.jobs, "Worker threads");
  bench->add_option("--out", bf.out, "Output path");
  bench->add_option("--format", bf.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  TuneFlags tf;
  CLI::App* tune = app.add_subcommand("tune", "Pseudo selection or scalar-kernel tuning race");
  tune->add_option("--target", tf.target, "Named standard target");
  tune->add_option("--samples", tf.samples, "One-column file of draws");
  tune->add_option("--method", tf.method, "Pseudo fit method")
      ->check(CLI::IsMember({"msw", "auc", "laplace", "mm"}));
  tune->add_option("--kernel", tf.kernel, "Race a scalar-parameter kernel instead")
      ->check(CLI::IsMember({"rwm", "stepout", "latent"}));
  tune->add_option("--range", tf.range, "Race search range lo:hi");
  tune->add_option("--df", tf.df, "Degrees of freedom for --method laplace");
  tune->add_option("--seed", tf.seed, "Base RNG seed");
  tune->add_option("--out", tf.out, "Output path (default: stdout)");

  DiagFlags df;
  CLI::App* diag = app.add_subcommand("diag", "Probability-scale diagnostics for a chain file");
  diag->add_option("--chain", df.chain, "One-column file of draws")->required();
  diag->add_option("--pseudo", df.pseudo, "Pseudo distribution, e.g. t(0,1,5)")->required();
  diag->add_option("--bins", df.bins, "Histogram bins");
  diag->add_option("--out", df.out, "Output JSON path");

  GpriorFlags gf;
  CLI::App* gprior = app.add_subcommand("gprior", "Regression shrinkage-parameter example");
  gprior->add_option("--sampler", gf.sampler, "Update kernel for the shrinkage parameter")
      ->check(CLI::IsMember({"rwm", "stepout", "latent", "gess", "imh", "qslice"}));
  gprior->add_option("--pseudo", gf.pseudo, "Pseudo-target method")
      ->check(CLI::IsMember({"none", "laplace", "laplace-wide", "auc-samples"}));
  gprior->add_flag("--log-scale", gf.log_scale, "Sample the shrinkage parameter on the log scale");
  gprior->add_option("--iters", gf.iters, "Timed iterations per chain");
  gprior->add_option("--burnin", gf.burnin, "Burn-in iterations per chain");
  gprior->add_option("--chains", gf.chains, "Independent chains");
  gprior->add_option("--seed", gf.seed, "Base RNG seed");
  gprior->add_option("--extra-cost", gf.extra_cost, "Superfluous matrix products per target eval")
      ->check(CLI::NonNegativeNumber);
  gprior->add_option("--laplace-df", gf.laplace_df, "Degrees of freedom of the curvature pseudo");
  gprior->add_option("--out", gf.out, "Output JSON path");

  SsmFlags sf;
  CLI::App* ssm = app.add_subcommand("ssm", "Truncated local-level path example");
  ssm->add_option("--sampler", sf.sampler, "Sampler to run (default all)");
  ssm->add_option("--pseudo-family", sf.family, "Pseudo family filter (default all)");
  ssm->add_option("--T", sf.T, "Path length");
  ssm->add_option("--iters", sf.iters, "Kept iterations per chain");
  ssm->add_option("--burnin", sf.burnin, "Burn-in iterations per chain");
  ssm->add_option("--chains", sf.chains, "Independent chains");
  ssm->add_option("--seed", sf.seed, "Base RNG seed");
  ssm->add_option("--width", sf.width, "Hyperrectangle slice width");
  ssm->add_option("--t-df", sf.t_df, "Degrees of freedom of the t pseudo");
  ssm->add_option("--out", sf.out, "Output JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (bench->parsed()) return cmd_bench(bf, bench);
    if (tune->parsed()) return cmd_tune(tf);
    if (diag->parsed()) return cmd_diag(df);
    if (gprior->parsed()) return cmd_gprior(gf);
    return cmd_ssm(sf);
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("slicebench");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(int(argv.size()), argv.data());
}

}  // namespace slicebench
