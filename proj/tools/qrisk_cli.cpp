// Copyright 2026 The qrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrisk/ae_sim.hpp"
#include "qrisk/error.hpp"
#include "qrisk/experiment.hpp"
#include "qrisk/qae_sim.hpp"
#include "qrisk/qsp_sim.hpp"
#include "qrisk/resource_model.hpp"
#include "qrisk/risk_engine.hpp"
#include "qrisk/scenario.hpp"
#include "qrisk/serialize.hpp"
#include "qrisk/threshold_fit.hpp"

namespace {

using nlohmann::json;
using namespace qrisk;

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file_atomic(path, text);
  }
}

struct ScenarioArgs {
  std::string input;
  std::size_t n = 5000;
  double mean = 0.5;
  double sd = 0.09;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--input", input, "Scenario CSV (index,value,prob) or JSON file");
    app->add_option("--n", n, "Number of sampled scenarios")->check(CLI::PositiveNumber);
    app->add_option("--mean", mean, "Mean of the sampled prices");
    app->add_option("--sd", sd, "Standard deviation of the sampled prices");
    app->add_option("--seed", seed, "Sampling seed");
  }

  ScenarioSet load() const {
    if (input.empty()) return sample_normal_scenarios(n, mean, sd, seed);
    std::ifstream in(input);
    if (!in) throw InvalidArgument("cannot open " + input);
    if (input.size() >= 5 && input.substr(input.size() - 5) == ".json") {
      return scenario_set_from_json(json::parse(in));
    }
    return read_scenario_csv(in);
  }
};

struct EstimatorArgs {
  double alpha = 0.99;
  double v0 = 1.0;
  PrecisionSchedule schedule;
  std::string allocation = "uniform";
  std::optional<std::uint64_t> stochastic_seed;
  bool trace = false;

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "Confidence level");
    app->add_option("--v0", v0, "Portfolio value today");
    app->add_option("--eps-start", schedule.eps_start, "First AE precision");
    app->add_option("--eps-final", schedule.eps_final, "Finest AE precision");
    app->add_option("--shrink", schedule.shrink, "Precision shrink factor");
    app->add_option("--allocation", allocation, "Failure budget split")
        ->check(CLI::IsMember({"uniform", "geometric"}));
    app->add_option("--budget", schedule.total_failure_budget, "Total failure probability");
    app->add_option("--k-max", schedule.k_max, "Maximum bisection rounds");
    app->add_option("--stochastic-seed", stochastic_seed, "Randomize interval centres with this seed");
    app->add_flag("--trace", trace, "Include the per-round trace");
  }

  VarOptions options() const {
    VarOptions o;
    o.alpha = alpha;
    o.v0 = v0;
    o.schedule = schedule;
    o.schedule.allocation = allocation == "geometric" ? AlphaAllocation::geometric : AlphaAllocation::uniform;
    o.schedule.validate();
    o.stochastic_seed = stochastic_seed;
    o.keep_trace = trace;
    return o;
  }
};

struct QspArgs {
  int degree = 600;
  double delta = 1e-3;
  double delta_scale = 0.0;
  double eps = 1e-3;
  std::optional<double> c;
  std::size_t grid = 0;
  std::string mode = "amplitude_squared";

  void add(CLI::App* app) {
    app->add_option("--degree", degree, "Polynomial degree");
    app->add_option("--delta", delta, "Transition gap");
    app->add_option("--delta-scale", delta_scale, "Use gap delta-scale / degree when positive");
    app->add_option("--fit-eps", eps, "Plateau error (c = 1 - eps unless --c is given)");
    app->add_option("--c", c, "Magnitude bound");
    app->add_option("--grid", grid, "Fit grid size (0 picks max(4d, 2000))");
    app->add_option("--mode", mode, "Readout of the polynomial")
        ->check(CLI::IsMember({"amplitude_squared", "function_value", "ideal_value"}));
  }

  QspMethod method(PolynomialCache* cache) const {
    QspMethod m;
    m.degree = degree;
    m.delta = delta_scale > 0.0 ? delta_scale / degree : delta;
    m.eps = eps;
    m.c = c;
    m.grid_size = grid;
    m.mode = parse_measurement_mode(mode);
    m.cache = cache;
    return m;
  }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum VaR and CVaR estimation simulator"};
  app.set_version_flag("--version", std::string(QRISK_VERSION));
  app.require_subcommand(1);
  std::string out;

  // fit-threshold
  auto* fit = app.add_subcommand("fit-threshold", "Fit a bounded minimax threshold polynomial");
  ThresholdSpec spec;
  std::string kind = "step";
  std::optional<double> fit_c;
  fit->add_option("--mu", spec.mu, "Threshold");
  fit->add_option("--delta", spec.delta, "Transition gap");
  fit->add_option("--eps", spec.eps, "Plateau error");
  fit->add_option("--c", fit_c, "Magnitude bound");
  fit->add_option("--degree", spec.degree, "Polynomial degree");
  fit->add_option("--kind", kind, "Threshold shape")->check(CLI::IsMember({"step", "ramp"}));
  fit->add_option("--grid", spec.grid_size, "Grid size (0 picks max(4d, 2000))");
  fit->add_option("-o,--out", out, "Output file");

  // scenarios
  auto* scen = app.add_subcommand("scenarios", "Sample a normal scenario set");
  ScenarioArgs scen_args;
  std::string format = "csv";
  double scen_noise = 0.0;
  scen->add_option("--n", scen_args.n, "Number of scenarios")->check(CLI::PositiveNumber);
  scen->add_option("--mean", scen_args.mean, "Mean price");
  scen->add_option("--sd", scen_args.sd, "Price standard deviation");
  scen->add_option("--seed", scen_args.seed, "Sampling seed");
  scen->add_option("--pricing-noise", scen_noise, "Add N(0, eps_p^2) pricing noise");
  scen->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  scen->add_option("-o,--out", out, "Output file");

  // qae-pmf
  auto* pmf = app.add_subcommand("qae-pmf", "Outcome law of canonical amplitude estimation");
  double pmf_value = 0.25;
  int pmf_m = 6;
  pmf->add_option("--value", pmf_value, "Encoded probability")->required();
  pmf->add_option("--m", pmf_m, "Phase register qubits");
  pmf->add_option("-o,--out", out, "Output file");

  // var-classical / var-semiclassical
  auto* vc = app.add_subcommand("var-classical", "Empirical value-space quantile");
  ScenarioArgs vc_scen;
  double vc_alpha = 0.99, vc_v0 = 1.0;
  vc_scen.add(vc);
  vc->add_option("--alpha", vc_alpha, "Confidence level");
  vc->add_option("--v0", vc_v0, "Portfolio value today");
  vc->add_option("-o,--out", out, "Output file");

  auto* vs = app.add_subcommand("var-semiclassical", "Empirical quantile after pricing noise");
  ScenarioArgs vs_scen;
  double vs_alpha = 0.99, vs_v0 = 1.0, vs_eps_p = 2e-3;
  std::uint64_t vs_seed = 7;
  vs_scen.add(vs);
  vs->add_option("--alpha", vs_alpha, "Confidence level");
  vs->add_option("--v0", vs_v0, "Portfolio value today");
  vs->add_option("--eps-p", vs_eps_p, "Pricing noise standard deviation");
  vs->add_option("--noise-seed", vs_seed, "Noise seed");
  vs->add_option("-o,--out", out, "Output file");

  // var-qae
  auto* vq = app.add_subcommand("var-qae", "Bisection VaR with a QAE comparator");
  ScenarioArgs vq_scen;
  EstimatorArgs vq_est;
  int vq_m = 10;
  vq_scen.add(vq);
  vq_est.add(vq);
  vq->add_option("--m", vq_m, "Phase register qubits");
  vq->add_option("-o,--out", out, "Output file");

  // var-qsp
  auto* vp = app.add_subcommand("var-qsp", "Bisection VaR with a QSP threshold");
  ScenarioArgs vp_scen;
  EstimatorArgs vp_est;
  QspArgs vp_qsp;
  vp_scen.add(vp);
  vp_est.add(vp);
  vp_qsp.add(vp);
  vp->add_option("-o,--out", out, "Output file");

  // cvar
  auto* cv = app.add_subcommand("cvar", "VaR bisection followed by the conditional mean");
  ScenarioArgs cv_scen;
  EstimatorArgs cv_est;
  QspArgs cv_qsp;
  bool cv_unconverged = false;
  cv_scen.add(cv);
  cv_est.add(cv);
  cv_qsp.add(cv);
  cv->add_flag("--allow-unconverged", cv_unconverged, "Accept an unconverged VaR threshold");
  cv->add_option("-o,--out", out, "Output file");

  // resources
  auto* res = app.add_subcommand("resources", "T-depth and parity clock rate");
  CostParams cost;
  int res_degree = 600;
  double res_eps = 1.2e-3, res_k = 10.0;
  std::optional<double> res_alpha_k;
  std::size_t res_n = 50000;
  std::string sweep_path;
  double ts_min = 1e3, ts_max = 1e10;
  int ts_points = 71;
  res->add_option("--degree", res_degree, "Polynomial degree");
  res->add_option("--eps-a", res_eps, "AE precision");
  res->add_option("--k", res_k, "Bisection rounds");
  res->add_option("--alpha-k", res_alpha_k, "Per-round failure probability (default 0.05 / 30)");
  res->add_option("--n-scenarios", res_n, "Scenario count");
  res->add_option("--t-a", cost.t_a, "T-depth of the pricing oracle");
  res->add_option("--t-s", cost.t_s, "T-depth of scenario loading");
  res->add_option("--eps-r", cost.eps_r, "Rotation synthesis precision");
  res->add_option("--seconds-per-scenario", cost.classical_seconds_per_scenario, "Classical pricing time");
  res->add_option("--sweep-csv", sweep_path, "Write a clock-rate sweep over t_s to this file");
  res->add_option("--ts-min", ts_min, "Smallest t_s of the sweep");
  res->add_option("--ts-max", ts_max, "Largest t_s of the sweep");
  res->add_option("--ts-points", ts_points, "Sweep points (log spaced)");
  res->add_option("-o,--out", out, "Output file");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a named experiment from a config file");
  std::string exp_name, exp_config;
  RunOptions run_options;
  exp->add_option("name", exp_name, "fig5, fig6, fig7, cvar or custom")
      ->required()
      ->check(CLI::IsMember({"fig5", "fig6", "fig7", "cvar", "custom"}));
  exp->add_option("--config", exp_config, "JSON config")->required()->check(CLI::ExistingFile);
  exp->add_flag("--force", run_options.force, "Ignore cached results");
  exp->add_option("--jobs", run_options.jobs, "Worker threads")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      spec.kind = parse_threshold_kind(kind);
      spec.c = fit_c;
      const FitResult r = fit_threshold(spec);
      json j = {{"spec", json(spec)}, {"fit", json(r)}, {"certified_max_abs", r.certified().certified_max_abs()}};
      emit(dump(j), out);
    } else if (*scen) {
      ScenarioSet set = sample_normal_scenarios(scen_args.n, scen_args.mean, scen_args.sd, scen_args.seed);
      if (scen_noise > 0.0) set = add_pricing_noise(set, scen_noise, scen_args.seed ^ 0x9E3779B97F4A7C15ULL);
      if (format == "json") {
        emit(dump(json(set)), out);
      } else {
        std::ostringstream s;
        set.write_csv(s);
        emit(s.str(), out);
      }
    } else if (*pmf) {
      const auto q = qae_pmf(pmf_value, pmf_m);
      std::ostringstream s;
      s << "j,estimate,prob\n";
      char buf[96];
      const double big_m = static_cast<double>(q.size());
      for (std::size_t j = 0; j < q.size(); ++j) {
        const double est = std::pow(std::sin(M_PI * static_cast<double>(j) / big_m), 2);
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", j, est, q[j]);
        s << buf;
      }
      emit(s.str(), out);
    } else if (*vc) {
      const ScenarioSet set = vc_scen.load();
      const double q = var_classical(set, vc_alpha);
      emit(dump({{"quantile_value", q}, {"var_value", vc_v0 - q}, {"alpha", vc_alpha}, {"n", set.size()}}), out);
    } else if (*vs) {
      const ScenarioSet set = vs_scen.load();
      const double q = var_semiclassical(set, vs_alpha, vs_eps_p, vs_seed);
      emit(dump({{"quantile_value", q}, {"var_value", vs_v0 - q}, {"alpha", vs_alpha}, {"eps_p", vs_eps_p}}), out);
    } else if (*vq) {
      const VarResult r = var_qae(vq_scen.load(), vq_m, vq_est.options());
      emit(dump(var_result_json(r, vq_est.trace)), out);
    } else if (*vp) {
      PolynomialCache cache = PolynomialCache::from_environment();
      const VarResult r = var_qsp(vp_scen.load(), vp_qsp.method(&cache), vp_est.options());
      emit(dump(var_result_json(r, vp_est.trace)), out);
    } else if (*cv) {
      PolynomialCache cache = PolynomialCache::from_environment();
      const ScenarioSet set = cv_scen.load();
      const QspMethod method = cv_qsp.method(&cache);
      const VarResult var = var_qsp(set, method, cv_est.options());
      const CvarResult c = cvar_qsp(set, var, method, cv_est.v0, cv_unconverged);
      emit(dump({{"var", var_result_json(var, cv_est.trace)}, {"cvar", c}}), out);
    } else if (*res) {
      const double alpha_k = res_alpha_k ? *res_alpha_k : per_round_alpha(PrecisionSchedule{});
      const ResourcePlan plan = make_plan(cost, res_degree, res_eps, res_k, alpha_k, res_n);
      emit(dump(json(plan)), out);
      if (!sweep_path.empty()) {
        if (!(ts_min > 0.0 && ts_max > ts_min) || ts_points < 2) {
          throw InvalidArgument("sweep needs 0 < ts-min < ts-max and at least 2 points");
        }
        std::ostringstream s;
        s << "n_scenarios,t_s,d,eps_A,k,clock_rate_hz\n";
        char buf[160];
        for (int i = 0; i < ts_points; ++i) {
          CostParams p = cost;
          p.t_s = std::exp(std::log(ts_min) + (std::log(ts_max) - std::log(ts_min)) * i / (ts_points - 1));
          const ResourcePlan r = make_plan(p, res_degree, res_eps, res_k, alpha_k, res_n);
          std::snprintf(buf, sizeof buf, "%zu,%.17g,%d,%.17g,%.17g,%.17g\n", res_n, p.t_s, res_degree, res_eps,
                        res_k, r.clock_rate_hz);
          s << buf;
        }
        write_file_atomic(sweep_path, s.str());
      }
    } else if (*exp) {
      const ExperimentConfig config = ExperimentConfig::load(exp_config);
      if (config.name != exp_name) {
        throw InvalidArgument("config describes '" + config.name + "', not '" + exp_name + "'");
      }
      const RunRecord record = run_experiment(config, run_options);
      std::cout << dump({{"name", config.name},
                         {"config_hash", record.config_hash},
                         {"output_dir", config.output_dir().string()},
                         {"summary", record.summary}});
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "qrisk: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qrisk: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
