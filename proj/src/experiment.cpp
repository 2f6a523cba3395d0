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

#include "qrisk/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qrisk/error.hpp"
#include "qrisk/parallel.hpp"
#include "qrisk/qae_sim.hpp"
#include "qrisk/qsp_sim.hpp"
#include "qrisk/resource_model.hpp"
#include "qrisk/risk_engine.hpp"
#include "qrisk/scenario.hpp"
#include "qrisk/serialize.hpp"
#include "qrisk/threshold_fit.hpp"

namespace qrisk {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- schema

json schedule_defaults() {
  return {{"eps_start", 0.1}, {"shrink", 0.5}, {"allocation", "uniform"},
          {"failure_budget", 0.05}, {"k_max", 30}};
}

json scenario_defaults() { return {{"n", 5000}, {"mean", 0.5}, {"sd", 0.09}}; }

json defaults_for(const std::string& name) {
  json d = {{"name", name}, {"seed", 0}, {"repetitions", 1}, {"alpha", 0.99},
            {"output_dir", "results/" + name}};
  if (name == "fig5") {
    d["fit"] = {{"mu", 0.5}, {"delta", 1e-3}, {"eps", 1e-3}, {"c", 0.999},
                {"degrees", {200, 400, 800, 1600}}, {"grid_size", 0}};
    d["density"] = {{"mean", 0.5}, {"sd", 0.09}, {"points", 20001}};
    d["mode"] = "function_value";
  } else if (name == "fig6") {
    d["repetitions"] = 100;
    d["scenarios"] = scenario_defaults();
    d["schedule"] = schedule_defaults();
    d["eps_a"] = {1e-4, 5e-4};
    d["qsp"] = {{"degrees", {50, 100, 200, 400, 800, 1600}}, {"delta", 1e-3}, {"delta_scale", 6.0},
                {"fit_eps", 1e-3}, {"mode", "function_value"}, {"grid_size", 0}};
    d["qae"] = {{"qubits", {7, 8, 9, 10, 11, 12}}};
    d["analysis"] = {{"plateau_factor", 3.0}, {"plateau_margin", 1.25}};
  } else if (name == "fig7") {
    d["repetitions"] = 200;
    d["scenarios"] = {{"n_list", {5000, 20000, 50000}}, {"sd", 0.09}, {"classical_mean", 0.5},
                      {"means", {0.45, 0.48, 0.5, 0.52, 0.55}}, {"eps_p", 2e-3}};
    d["schedule"] = schedule_defaults();
    d["search"] = {{"degrees", {200, 400, 600, 800, 1000}},
                   {"eps_a", {6e-4, 1.2e-3, 2.5e-3, 5e-3}},
                   {"percentile", 0.68},
                   {"k_definition", "rounds"}};
    d["qsp"] = {{"delta", 1e-3}, {"delta_scale", 6.0}, {"fit_eps", 1e-3},
                {"mode", "function_value"}, {"grid_size", 0}};
    d["cost"] = {{"t_a", 3900.0}, {"eps_r", 1e-7}, {"classical_seconds_per_scenario", 1.0},
                 {"advantage_reference_rate_hz", 4.5e7}};
    d["t_s_sweep"] = {{"min", 1e3}, {"max", 1e10}, {"points", 71}};
  } else if (name == "cvar") {
    d["repetitions"] = 20;
    d["scenarios"] = scenario_defaults();
    d["schedule"] = schedule_defaults();
    d["eps_a"] = 1e-4;
    d["qsp"] = {{"degree", 200}, {"delta", 1e-3}, {"delta_scale", 6.0}, {"fit_eps", 1e-3},
                {"mode", "function_value"}, {"grid_size", 0}};
    d["v0"] = 1.0;
  } else if (name == "custom") {
    d["method"] = "qsp";
    d["scenarios"] = scenario_defaults();
    d["schedule"] = schedule_defaults();
    d["eps_a"] = 1e-3;
    d["eps_p"] = 0.0;
    d["qsp"] = {{"degree", 200}, {"delta", 1e-3}, {"delta_scale", 6.0}, {"fit_eps", 1e-3},
                {"mode", "function_value"}, {"grid_size", 0}};
    d["qae"] = {{"m", 10}};
    d["v0"] = 1.0;
  } else {
    throw InvalidArgument("unknown experiment '" + name + "'");
  }
  return d;
}

bool same_kind(const json& expected, const json& given) {
  if (expected.is_number_integer()) return given.is_number_integer();
  if (expected.is_number()) return given.is_number();
  return expected.type() == given.type();
}

void merge_checked(json& target, const json& given, const std::string& where) {
  if (!given.is_object()) throw InvalidArgument("config: " + where + " must be an object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!target.contains(it.key())) throw InvalidArgument("config: unknown key '" + path + "'");
    json& slot = target[it.key()];
    if (slot.is_object()) {
      merge_checked(slot, it.value(), path);
    } else if (slot.is_array()) {
      if (!it.value().is_array() || it.value().empty()) {
        throw InvalidArgument("config: '" + path + "' must be a non-empty array");
      }
      for (const json& e : it.value()) {
        if (!same_kind(slot.front(), e)) {
          throw InvalidArgument("config: wrong element type in '" + path + "'");
        }
      }
      slot = it.value();
    } else {
      if (!same_kind(slot, it.value())) throw InvalidArgument("config: wrong type for '" + path + "'");
      slot = it.value();
    }
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------- helpers

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

PrecisionSchedule schedule_from(const json& s, double eps_final, int k_max_override = 0) {
  PrecisionSchedule p;
  p.eps_start = s.at("eps_start").get<double>();
  p.shrink = s.at("shrink").get<double>();
  const std::string alloc = s.at("allocation").get<std::string>();
  if (alloc == "uniform") {
    p.allocation = AlphaAllocation::uniform;
  } else if (alloc == "geometric") {
    p.allocation = AlphaAllocation::geometric;
  } else {
    throw InvalidArgument("config: schedule.allocation must be uniform or geometric");
  }
  p.total_failure_budget = s.at("failure_budget").get<double>();
  p.k_max = k_max_override > 0 ? k_max_override : s.at("k_max").get<int>();
  p.eps_final = eps_final;
  p.validate();
  return p;
}

QspMethod qsp_from(const json& q, int degree, PolynomialCache* cache) {
  QspMethod m;
  m.degree = degree;
  const double scale = q.at("delta_scale").get<double>();
  m.delta = scale > 0.0 ? scale / degree : q.at("delta").get<double>();
  m.eps = q.at("fit_eps").get<double>();
  m.mode = parse_measurement_mode(q.at("mode").get<std::string>());
  m.grid_size = q.at("grid_size").get<std::size_t>();
  m.cache = cache;
  return m;
}

template <class Fn>
std::function<double(double)> memoized(std::map<double, double>& memo, Fn fn) {
  return [&memo, fn](double mu) {
    auto it = memo.find(mu);
    if (it != memo.end()) return it->second;
    const double p = fn(mu);
    memo.emplace(mu, p);
    return p;
  };
}

const auto kNoGap = [](double) { return 0.0; };

struct Output {
  RunRecord record;
  std::map<std::string, std::string> artifacts;  // file name -> contents
};

void finish_aggregates(RunRecord& r) {
  std::sort(r.samples.begin(), r.samples.end(), [](const Sample& a, const Sample& b) {
    return a.group != b.group ? a.group < b.group : a.repetition < b.repetition;
  });
  std::map<std::string, std::vector<double>> grouped;
  for (const Sample& s : r.samples) grouped[s.group].push_back(s.value);
  r.aggregates.clear();
  for (auto& [g, v] : grouped) r.aggregates[g] = aggregate(std::move(v));
}

std::string group_key(const std::vector<std::pair<std::string, std::string>>& fields) {
  std::string k;
  for (const auto& [name, value] : fields) {
    if (!k.empty()) k += ';';
    k += name + '=' + value;
  }
  return k;
}

// ---------------------------------------------------------------- fig5

Output run_fig5(const ExperimentConfig& cfg, PolynomialCache& cache) {
  const json& doc = cfg.document;
  const json& fit = doc.at("fit");
  const json& dens = doc.at("density");
  const MeasurementMode mode = parse_measurement_mode(doc.at("mode").get<std::string>());
  const DiscreteDensity density = DiscreteDensity::normal(
      dens.at("mean").get<double>(), dens.at("sd").get<double>(), dens.at("points").get<std::size_t>());
  const auto degrees = fit.at("degrees").get<std::vector<int>>();

  Output out;
  std::string csv = "d,eps_theta,objective,inside_error,outside_error,solver_iterations\n";
  std::vector<double> inv_d, eps, log_d, log_eps;
  for (int d : degrees) {
    ThresholdSpec spec;
    spec.kind = ThresholdKind::step;
    spec.mu = fit.at("mu").get<double>();
    spec.delta = fit.at("delta").get<double>();
    spec.eps = fit.at("eps").get<double>();
    spec.c = fit.at("c").get<double>();
    spec.degree = d;
    spec.grid_size = fit.at("grid_size").get<std::size_t>();
    const FitResult r = cache.get(spec);
    const double e = theta_error(r.series, spec, density, mode);
    csv += std::to_string(d) + ',' + fmt(e) + ',' + fmt(r.objective) + ',' + fmt(r.inside_error) +
           ',' + fmt(r.outside_error) + ',' + std::to_string(r.solver_iterations) + '\n';
    out.record.samples.push_back({group_key({{"d", std::to_string(d)}}), 0, e});
    inv_d.push_back(1.0 / d);
    eps.push_back(e);
    log_d.push_back(std::log(static_cast<double>(d)));
    log_eps.push_back(std::log(e));
  }
  const auto [a, b] = linear_fit(inv_d, eps);
  const auto [slope, icpt] = linear_fit(log_d, log_eps);
  out.record.summary = {{"a", a}, {"b", b}, {"loglog_slope", slope}, {"mode", to_string(mode)}};
  out.artifacts["fig5.csv"] = csv;
  return out;
}

// ---------------------------------------------------------------- fig6

struct CurvePoint {
  std::string method;
  int param;
  std::int64_t calls;
  double eps_a;
  double mean_error;
};

/// Slope of log(mean error) on log(calls) over points whose error sits above
/// plateau_factor times the amplitude-estimation floor.
json curve_slope(const std::vector<CurvePoint>& pts, double floor_error, double factor) {
  std::vector<double> x, y;
  for (const auto& p : pts) {
    if (p.mean_error >= factor * floor_error) {
      x.push_back(std::log(static_cast<double>(p.calls)));
      y.push_back(std::log(p.mean_error));
    }
  }
  json j = {{"points_used", x.size()}, {"floor_error", floor_error}};
  if (x.size() >= 2) {
    j["slope"] = linear_fit(x, y).first;
  } else {
    j["slope"] = nullptr;
  }
  return j;
}

/// Encoding calls needed to reach `error` on a curve, by log-log interpolation.
std::optional<double> calls_at(const std::vector<CurvePoint>& pts, double error) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double e0 = pts[i].mean_error, e1 = pts[i + 1].mean_error;
    if ((e0 - error) * (e1 - error) <= 0.0 && e0 != e1) {
      const double t = (std::log(error) - std::log(e0)) / (std::log(e1) - std::log(e0));
      const double l0 = std::log(static_cast<double>(pts[i].calls));
      const double l1 = std::log(static_cast<double>(pts[i + 1].calls));
      return std::exp(l0 + t * (l1 - l0));
    }
  }
  return std::nullopt;
}

Output run_fig6(const ExperimentConfig& cfg, PolynomialCache& cache) {
  const json& doc = cfg.document;
  const json& sc = doc.at("scenarios");
  const double alpha = doc.at("alpha").get<double>();
  const auto eps_list = doc.at("eps_a").get<std::vector<double>>();
  const auto degrees = doc.at("qsp").at("degrees").get<std::vector<int>>();
  const auto qubits = doc.at("qae").at("qubits").get<std::vector<int>>();
  const int reps = cfg.repetitions;
  const std::size_t n = sc.at("n").get<std::size_t>();
  const double mean = sc.at("mean").get<double>();
  const double sd = sc.at("sd").get<double>();

  struct RepResult {
    std::vector<Sample> samples;
  };
  std::vector<RepResult> results(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](long r) {
    const ScenarioSet set = sample_normal_scenarios(n, mean, sd, cfg.seed + static_cast<std::uint64_t>(r));
    const double classical = var_classical(set, alpha);
    auto& samples = results[static_cast<std::size_t>(r)].samples;
    auto record = [&](const std::string& method, int param, std::int64_t calls, double eps,
                      const VarResult& v) {
      const std::vector<std::pair<std::string, std::string>> base = {
          {"method", method}, {"param", std::to_string(param)}, {"calls", std::to_string(calls)},
          {"eps_a", short_fmt(eps)}};
      auto with = [&](const char* metric) {
        auto f = base;
        f.emplace_back("metric", metric);
        return group_key(f);
      };
      samples.push_back({with("error"), static_cast<int>(r), std::abs(v.quantile_value() - classical)});
      samples.push_back({with("rounds"), static_cast<int>(r), static_cast<double>(v.rounds)});
    };
    for (int m : qubits) {
      std::map<double, double> memo;
      auto prob = memoized(memo, [&](double mu) { return prob_below_qae(set, m, mu * mu); });
      for (double eps : eps_list) {
        VarOptions opt;
        opt.alpha = alpha;
        opt.schedule = schedule_from(doc.at("schedule"), eps);
        opt.keep_trace = false;
        record("qae", m, qae_encoding_oracle_calls(m), eps,
               bisect_var(prob, kNoGap, qae_encoding_oracle_calls(m), opt));
      }
    }
    for (int d : degrees) {
      const QspMethod method = qsp_from(doc.at("qsp"), d, &cache);
      std::map<double, double> memo;
      auto prob = memoized(memo, [&](double mu) { return qsp_probability(set, method, mu); });
      for (double eps : eps_list) {
        VarOptions opt;
        opt.alpha = alpha;
        opt.schedule = schedule_from(doc.at("schedule"), eps);
        opt.keep_trace = false;
        record("qsp", d, qsp_encoding_oracle_calls(d), eps,
               bisect_var(prob, kNoGap, qsp_encoding_oracle_calls(d), opt));
      }
    }
  });

  Output out;
  for (auto& r : results) {
    for (auto& s : r.samples) out.record.samples.push_back(std::move(s));
  }
  finish_aggregates(out.record);

  const double factor = doc.at("analysis").at("plateau_factor").get<double>();
  const double margin = doc.at("analysis").at("plateau_margin").get<double>();
  std::string csv =
      "method,param,encoding_calls,eps_A,mean_error,p68_error,std_error,mean_rounds,repetitions\n";
  std::map<std::pair<std::string, double>, std::vector<CurvePoint>> curves;
  auto emit = [&](const std::string& method, int param, std::int64_t calls, double eps) {
    const std::vector<std::pair<std::string, std::string>> base = {
        {"method", method}, {"param", std::to_string(param)}, {"calls", std::to_string(calls)},
        {"eps_a", short_fmt(eps)}};
    auto e = base, k = base;
    e.emplace_back("metric", "error");
    k.emplace_back("metric", "rounds");
    const Aggregate& ae = out.record.aggregates.at(group_key(e));
    const Aggregate& ak = out.record.aggregates.at(group_key(k));
    csv += method + ',' + std::to_string(param) + ',' + std::to_string(calls) + ',' + fmt(eps) + ',' +
           fmt(ae.mean) + ',' + fmt(ae.p68) + ',' + fmt(ae.stddev) + ',' + fmt(ak.mean) + ',' +
           std::to_string(ae.count) + '\n';
    curves[{method, eps}].push_back({method, param, calls, eps, ae.mean});
  };
  for (double eps : eps_list) {
    for (int m : qubits) emit("qae", m, qae_encoding_oracle_calls(m), eps);
    for (int d : degrees) emit("qsp", d, qsp_encoding_oracle_calls(d), eps);
  }
  for (auto& [key, pts] : curves) {
    std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.calls < b.calls; });
  }

  json summary;
  summary["slopes"] = json::array();
  for (const auto& [key, pts] : curves) {
    const double floor = propagate_error(key.second, NormalDist{mean, sd}, alpha);
    json s = curve_slope(pts, floor, factor);
    s["method"] = key.first;
    s["eps_a"] = key.second;
    summary["slopes"].push_back(s);
  }
  summary["matched_ratio"] = json::array();
  for (double eps : eps_list) {
    const auto& qae = curves.at({"qae", eps});
    const auto& qsp = curves.at({"qsp", eps});
    std::vector<double> log_ratios;
    json levels = json::array();
    for (const auto& p : qsp) {
      const auto c = calls_at(qae, p.mean_error);
      if (!c) continue;
      const double ratio = *c / static_cast<double>(p.calls);
      levels.push_back({{"error", p.mean_error}, {"qsp_calls", p.calls}, {"qae_calls", *c}, {"ratio", ratio}});
      log_ratios.push_back(std::log(ratio));
    }
    json m = {{"eps_a", eps}, {"levels", levels}};
    if (!log_ratios.empty()) {
      double s = 0.0;
      for (double v : log_ratios) s += v;
      m["geometric_mean_ratio"] = std::exp(s / static_cast<double>(log_ratios.size()));
    } else {
      m["geometric_mean_ratio"] = nullptr;
    }
    summary["matched_ratio"].push_back(m);
  }
  if (eps_list.size() >= 2) {
    const double fine = *std::min_element(eps_list.begin(), eps_list.end());
    const double coarse = *std::max_element(eps_list.begin(), eps_list.end());
    json plateau = json::array();
    for (const char* method : {"qae", "qsp"}) {
      const auto& f = curves.at({method, fine});
      const auto& c = curves.at({method, coarse});
      const double ratio = c.back().mean_error / f.back().mean_error;
      plateau.push_back({{"method", method},
                         {"fine_eps_a", fine},
                         {"coarse_eps_a", coarse},
                         {"final_error_fine", f.back().mean_error},
                         {"final_error_coarse", c.back().mean_error},
                         {"ratio", ratio},
                         {"plateaus_first", ratio >= margin}});
    }
    summary["plateau"] = plateau;
  }
  out.record.summary = summary;
  out.artifacts["fig6.csv"] = csv;
  return out;
}

// ---------------------------------------------------------------- fig7

Output run_fig7(const ExperimentConfig& cfg, PolynomialCache& cache) {
  const json& doc = cfg.document;
  const json& sc = doc.at("scenarios");
  const json& search = doc.at("search");
  const json& qsp = doc.at("qsp");
  const json& cost = doc.at("cost");
  const json& sweep = doc.at("t_s_sweep");

  CostParams params;
  params.t_a = cost.at("t_a").get<double>();
  params.eps_r = cost.at("eps_r").get<double>();
  params.classical_seconds_per_scenario = cost.at("classical_seconds_per_scenario").get<double>();
  params.advantage_reference_rate_hz = cost.at("advantage_reference_rate_hz").get<double>();
  params.t_s = 0.0;

  const std::string kdef = search.at("k_definition").get<std::string>();
  if (kdef != "rounds" && kdef != "effective") {
    throw InvalidArgument("config: search.k_definition must be rounds or effective");
  }

  const double ts_min = sweep.at("min").get<double>();
  const double ts_max = sweep.at("max").get<double>();
  const int ts_points = sweep.at("points").get<int>();
  if (!(ts_min > 0.0 && ts_max > ts_min) || ts_points < 2) {
    throw InvalidArgument("config: t_s_sweep needs 0 < min < max and at least 2 points");
  }

  Output out;
  std::string curves = "n_scenarios,t_s,d,eps_A,k,clock_rate_hz\n";
  std::string cells_csv =
      "n_scenarios,d,eps_A,eps_Q,k_rounds,k_effective,k,total_t_depth_at_zero_t_s,feasible\n";
  json per_n = json::array();

  for (std::size_t n : sc.at("n_list").get<std::vector<std::size_t>>()) {
    SearchProtocol p;
    p.n_scenarios = n;
    p.sd = sc.at("sd").get<double>();
    p.classical_mean = sc.at("classical_mean").get<double>();
    p.means = sc.at("means").get<std::vector<double>>();
    p.eps_p = sc.at("eps_p").get<double>();
    p.alpha = doc.at("alpha").get<double>();
    p.repetitions = cfg.repetitions;
    p.percentile = search.at("percentile").get<double>();
    p.degrees = search.at("degrees").get<std::vector<int>>();
    p.eps_grid = search.at("eps_a").get<std::vector<double>>();
    p.delta = qsp.at("delta").get<double>();
    p.delta_scale = qsp.at("delta_scale").get<double>();
    p.fit_eps = qsp.at("fit_eps").get<double>();
    p.mode = parse_measurement_mode(qsp.at("mode").get<std::string>());
    p.schedule = schedule_from(doc.at("schedule"), p.eps_grid.front());
    p.round_count = kdef == "rounds" ? RoundCount::rounds : RoundCount::effective;
    p.seed = cfg.seed;
    p.cache = &cache;

    const double eps_c = classical_error(p);
    std::vector<SearchCell> cells = simulate_cells(p, params);
    const double alpha_k = per_round_alpha(p.schedule);

    json entry = {{"n_scenarios", n}, {"eps_c", eps_c}, {"alpha_k", alpha_k}};
    SearchCell chosen;
    std::vector<SearchCell> marked;
    try {
      const SearchResult r = select_matching_cell(cells, eps_c, alpha_k);
      marked = r.cells;
      for (const auto& c : r.cells) {
        if (c.degree == r.degree && c.eps_a == r.eps_a) chosen = c;
      }
      entry["feasible"] = true;
    } catch (const NoFeasibleParameters& e) {
      marked = cells;
      chosen = *std::min_element(cells.begin(), cells.end(), [](const SearchCell& a, const SearchCell& b) {
        return a.eps_q < b.eps_q;
      });
      entry["feasible"] = false;
      entry["best_error"] = e.best_error();
    }
    int min_feasible_d = 0;
    double max_feasible_eps = 0.0;
    for (const auto& c : marked) {
      cells_csv += std::to_string(n) + ',' + std::to_string(c.degree) + ',' + fmt(c.eps_a) + ',' +
                   fmt(c.eps_q) + ',' + fmt(c.k_rounds) + ',' + fmt(c.k_effective) + ',' + fmt(c.k) +
                   ',' + fmt(c.total_t_depth) + ',' + (c.feasible ? "1" : "0") + '\n';
      out.record.samples.push_back({group_key({{"n", std::to_string(n)}, {"d", std::to_string(c.degree)},
                                               {"eps_a", short_fmt(c.eps_a)}, {"metric", "eps_q"}}),
                                    0, c.eps_q});
      if (c.feasible) {
        min_feasible_d = min_feasible_d == 0 ? c.degree : std::min(min_feasible_d, c.degree);
        max_feasible_eps = std::max(max_feasible_eps, c.eps_a);
      }
    }
    entry["d"] = chosen.degree;
    entry["eps_a"] = chosen.eps_a;
    entry["k"] = chosen.k;
    entry["k_rounds"] = chosen.k_rounds;
    entry["k_effective"] = chosen.k_effective;
    entry["eps_q"] = chosen.eps_q;
    entry["min_feasible_d"] = min_feasible_d;
    entry["max_feasible_eps_a"] = max_feasible_eps;

    // The clock rate is affine in t_s: rate = base + slope * t_s.
    CostParams at_zero = params;
    const ResourcePlan p0 = make_plan(at_zero, chosen.degree, chosen.eps_a, chosen.k, alpha_k, n);
    CostParams at_one = params;
    at_one.t_s = 1.0;
    const ResourcePlan p1 = make_plan(at_one, chosen.degree, chosen.eps_a, chosen.k, alpha_k, n);
    const double base = p0.clock_rate_hz;
    const double slope = p1.clock_rate_hz - p0.clock_rate_hz;
    const double ref = params.advantage_reference_rate_hz;
    entry["rate_at_zero_t_s"] = base;
    entry["crossing_t_s"] = base < ref ? json((ref - base) / slope) : json(nullptr);
    CostParams at_ref = params;
    at_ref.t_s = 3e5;
    const double rate_3e5 =
        make_plan(at_ref, chosen.degree, chosen.eps_a, chosen.k, alpha_k, n).clock_rate_hz;
    entry["rate_at_3e5"] = rate_3e5;
    entry["reduction_at_3e5"] = ref / rate_3e5;
    per_n.push_back(entry);

    for (int i = 0; i < ts_points; ++i) {
      const double ts = std::exp(std::log(ts_min) + (std::log(ts_max) - std::log(ts_min)) * i / (ts_points - 1));
      CostParams q = params;
      q.t_s = ts;
      const ResourcePlan plan = make_plan(q, chosen.degree, chosen.eps_a, chosen.k, alpha_k, n);
      curves += std::to_string(n) + ',' + fmt(ts) + ',' + std::to_string(chosen.degree) + ',' +
                fmt(chosen.eps_a) + ',' + fmt(chosen.k) + ',' + fmt(plan.clock_rate_hz) + '\n';
    }
  }
  finish_aggregates(out.record);
  out.record.summary = {{"per_n", per_n}, {"k_definition", kdef},
                        {"reference_rate_hz", params.advantage_reference_rate_hz}};
  out.artifacts["fig7_curves.csv"] = curves;
  out.artifacts["fig7_cells.csv"] = cells_csv;
  return out;
}

// ---------------------------------------------------------------- cvar

Output run_cvar(const ExperimentConfig& cfg, PolynomialCache& cache) {
  const json& doc = cfg.document;
  const json& sc = doc.at("scenarios");
  const double alpha = doc.at("alpha").get<double>();
  const double v0 = doc.at("v0").get<double>();
  const int reps = cfg.repetitions;
  const QspMethod fitted = qsp_from(doc.at("qsp"), doc.at("qsp").at("degree").get<int>(), &cache);
  QspMethod ideal = fitted;
  ideal.mode = MeasurementMode::ideal_value;

  struct Row {
    double mu = 0, var = 0, c_ideal = 0, c_brute = 0, c_fit = 0;
    bool converged = false;
  };
  std::vector<Row> rows(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](long r) {
    const ScenarioSet set = sample_normal_scenarios(sc.at("n").get<std::size_t>(), sc.at("mean").get<double>(),
                                                    sc.at("sd").get<double>(), cfg.seed + static_cast<std::uint64_t>(r));
    VarOptions opt;
    opt.alpha = alpha;
    opt.v0 = v0;
    opt.schedule = schedule_from(doc.at("schedule"), doc.at("eps_a").get<double>());
    opt.keep_trace = false;
    const VarResult var = var_qsp(set, ideal, opt);
    Row& row = rows[static_cast<std::size_t>(r)];
    row.mu = var.mu_alpha;
    row.var = var.var_value;
    row.converged = var.converged;
    row.c_ideal = cvar_qsp(set, var, ideal, v0, true).c_alpha;
    double mass = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double a = std::sqrt(set.values()[i]);
      if (a <= var.mu_alpha) {
        mass += set.probs()[i];
        sum += set.probs()[i] * a;
      }
    }
    row.c_brute = sum / mass;
    row.c_fit = cvar_qsp(set, var, fitted, v0, true).c_alpha;
  });

  Output out;
  std::string csv =
      "repetition,mu_alpha,var_value,c_alpha_ideal,c_alpha_brute,rel_error_ideal,c_alpha_fitted,rel_error_fitted,converged\n";
  for (int r = 0; r < reps; ++r) {
    const Row& row = rows[static_cast<std::size_t>(r)];
    const double e_ideal = std::abs(row.c_ideal - row.c_brute) / std::abs(row.c_brute);
    const double e_fit = std::abs(row.c_fit - row.c_brute) / std::abs(row.c_brute);
    csv += std::to_string(r) + ',' + fmt(row.mu) + ',' + fmt(row.var) + ',' + fmt(row.c_ideal) + ',' +
           fmt(row.c_brute) + ',' + fmt(e_ideal) + ',' + fmt(row.c_fit) + ',' + fmt(e_fit) + ',' +
           (row.converged ? "1" : "0") + '\n';
    out.record.samples.push_back({"metric=rel_error_ideal", r, e_ideal});
    out.record.samples.push_back({"metric=rel_error_fitted", r, e_fit});
  }
  finish_aggregates(out.record);

  const ScenarioSet atoms({0.04, 0.16, 0.36}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const CvarResult hand = cvar_from_probs(ideal_marked_ramp(atoms, 0.5), ideal_marked_step(atoms, 0.5), 0.5, v0);
  out.record.summary = {{"three_atom_c_alpha", hand.c_alpha},
                        {"fitted_mode", to_string(fitted.mode)},
                        {"max_rel_error_ideal", out.record.aggregates.at("metric=rel_error_ideal").p68}};
  double worst = 0.0;
  for (const Sample& s : out.record.samples) {
    if (s.group == "metric=rel_error_ideal") worst = std::max(worst, s.value);
  }
  out.record.summary["max_rel_error_ideal"] = worst;
  out.artifacts["cvar.csv"] = csv;
  return out;
}

// ---------------------------------------------------------------- custom

Output run_custom(const ExperimentConfig& cfg, PolynomialCache& cache) {
  const json& doc = cfg.document;
  const json& sc = doc.at("scenarios");
  const double alpha = doc.at("alpha").get<double>();
  const std::string method = doc.at("method").get<std::string>();
  if (method != "qsp" && method != "qae" && method != "classical" && method != "semiclassical") {
    throw InvalidArgument("config: method must be qsp, qae, classical or semiclassical");
  }
  const int reps = cfg.repetitions;
  std::vector<std::array<double, 4>> rows(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](long r) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(r);
    const ScenarioSet set = sample_normal_scenarios(sc.at("n").get<std::size_t>(), sc.at("mean").get<double>(),
                                                    sc.at("sd").get<double>(), seed);
    const double classical = var_classical(set, alpha);
    double estimate = classical;
    double calls = 0.0;
    double rounds = 0.0;
    if (method == "semiclassical") {
      estimate = var_semiclassical(set, alpha, doc.at("eps_p").get<double>(), seed ^ 0x9E3779B97F4A7C15ULL);
    } else if (method != "classical") {
      VarOptions opt;
      opt.alpha = alpha;
      opt.v0 = doc.at("v0").get<double>();
      opt.schedule = schedule_from(doc.at("schedule"), doc.at("eps_a").get<double>());
      opt.keep_trace = false;
      const VarResult v = method == "qsp"
                              ? var_qsp(set, qsp_from(doc.at("qsp"), doc.at("qsp").at("degree").get<int>(), &cache), opt)
                              : var_qae(set, doc.at("qae").at("m").get<int>(), opt);
      estimate = v.quantile_value();
      calls = static_cast<double>(v.total_oracle_calls);
      rounds = v.rounds;
    }
    rows[static_cast<std::size_t>(r)] = {classical, estimate, calls, rounds};
  });
  Output out;
  std::string csv = "repetition,classical,estimate,error,total_oracle_calls,rounds\n";
  for (int r = 0; r < reps; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    const double err = std::abs(row[1] - row[0]);
    csv += std::to_string(r) + ',' + fmt(row[0]) + ',' + fmt(row[1]) + ',' + fmt(err) + ',' +
           fmt(row[2]) + ',' + fmt(row[3]) + '\n';
    out.record.samples.push_back({"method=" + method + ";metric=error", r, err});
  }
  finish_aggregates(out.record);
  out.record.summary = {{"method", method}};
  out.artifacts["custom.csv"] = csv;
  return out;
}

std::optional<std::filesystem::path> run_cache_root(const RunOptions& options) {
  if (options.cache_dir) return *options.cache_dir / "runs";
  const char* env = std::getenv("QRISK_CACHE_DIR");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::filesystem::path(env) / "runs";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------- public

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  if (!doc.contains("name") || !doc.at("name").is_string()) {
    throw InvalidArgument("config: 'name' is required");
  }
  if (!doc.contains("seed") || !doc.at("seed").is_number_integer()) {
    throw InvalidArgument("config: integer 'seed' is required");
  }
  ExperimentConfig cfg;
  cfg.name = doc.at("name").get<std::string>();
  cfg.document = defaults_for(cfg.name);
  merge_checked(cfg.document, doc, "");
  if (cfg.document.at("seed").get<std::int64_t>() < 0) throw InvalidArgument("config: seed must be non-negative");
  cfg.seed = cfg.document.at("seed").get<std::uint64_t>();
  cfg.repetitions = cfg.document.at("repetitions").get<int>();
  if (cfg.repetitions < 1) throw InvalidArgument("config: repetitions must be positive");
  const double alpha = cfg.document.at("alpha").get<double>();
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("config: alpha must lie in (0, 1)");
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(doc);
}

std::string ExperimentConfig::hash() const {
  json canonical = document;
  canonical.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical.dump())));
  return buf;
}

std::filesystem::path ExperimentConfig::output_dir() const {
  return document.at("output_dir").get<std::string>();
}

Aggregate aggregate(std::vector<double> values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(0.68 * static_cast<double>(values.size())));
  a.p68 = values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
  return a;
}

json RunRecord::to_json() const {
  json samples_json = json::array();
  for (const Sample& s : samples) samples_json.push_back({s.group, s.repetition, s.value});
  json agg = json::object();
  for (const auto& [g, a] : aggregates) {
    agg[g] = {{"count", a.count}, {"mean", a.mean}, {"p68", a.p68}, {"std", a.stddev}};
  }
  return {{"config_hash", config_hash}, {"config", config},     {"version", version},
          {"aggregates", agg},          {"summary", summary},   {"samples", samples_json}};
}

RunRecord RunRecord::from_json(const json& j) {
  RunRecord r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.config = j.at("config");
  r.version = j.at("version").get<std::string>();
  r.summary = j.at("summary");
  for (const json& s : j.at("samples")) {
    r.samples.push_back({s.at(0).get<std::string>(), s.at(1).get<int>(), s.at(2).get<double>()});
  }
  for (auto it = j.at("aggregates").begin(); it != j.at("aggregates").end(); ++it) {
    Aggregate a;
    a.count = it.value().at("count").get<std::size_t>();
    a.mean = it.value().at("mean").get<double>();
    a.p68 = it.value().at("p68").get<double>();
    a.stddev = it.value().at("std").get<double>();
    r.aggregates[it.key()] = a;
  }
  return r;
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("linear fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("linear fit needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options) {
#ifdef _OPENMP
  if (options.jobs > 0) omp_set_num_threads(options.jobs);
#endif
  const std::string hash = config.hash();
  const std::filesystem::path out_dir = config.output_dir();
  const auto cache_root = run_cache_root(options);
  const auto cached = cache_root ? std::optional(*cache_root / hash) : std::nullopt;

  if (cached && !options.force && std::filesystem::exists(*cached / "run.json")) {
    RunRecord record = RunRecord::from_json(json::parse(read_file(*cached / "run.json")));
    for (const auto& entry : std::filesystem::directory_iterator(*cached)) {
      write_file_atomic(out_dir / entry.path().filename(), read_file(entry.path()));
    }
    return record;
  }

  const auto start = std::chrono::steady_clock::now();
  PolynomialCache fits = cache_root ? PolynomialCache(cache_root->parent_path() / "fits")
                                    : PolynomialCache();
  Output result;
  if (config.name == "fig5") {
    result = run_fig5(config, fits);
  } else if (config.name == "fig6") {
    result = run_fig6(config, fits);
  } else if (config.name == "fig7") {
    result = run_fig7(config, fits);
  } else if (config.name == "cvar") {
    result = run_cvar(config, fits);
  } else {
    result = run_custom(config, fits);
  }
  RunRecord& record = result.record;
  record.config_hash = hash;
  record.config = config.document;
  record.config.erase("output_dir");
  record.version = QRISK_VERSION;
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  result.artifacts["run.json"] = record.to_json().dump(2) + "\n";
  json summary = {{"config_hash", hash}, {"name", config.name}, {"summary", record.summary}};
  result.artifacts["summary.json"] = summary.dump(2) + "\n";
  for (const auto& [name, contents] : result.artifacts) {
    write_file_atomic(out_dir / name, contents);
    if (cached) write_file_atomic(*cached / name, contents);
  }
  const json timing = {{"config_hash", hash}, {"wall_seconds", record.wall_seconds}};
  write_file_atomic(out_dir / "timing.json", timing.dump(2) + "\n");
  return record;
}

RunRecord summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) throw InvalidArgument("summarize needs at least one record");
  auto strip = [](json c) {
    c.erase("seed");
    c.erase("repetitions");
    c.erase("output_dir");
    return c;
  };
  const json reference = strip(records.front().config);
  std::uint64_t min_seed = UINT64_MAX;
  for (const RunRecord& r : records) {
    if (strip(r.config) != reference) throw InvalidArgument("summarize: records come from different configs");
    min_seed = std::min(min_seed, r.config.value("seed", std::uint64_t{0}));
  }
  if (records.size() == 1) return records.front();
  RunRecord out = records.front();
  out.samples.clear();
  int total_reps = 0;
  for (const RunRecord& r : records) {
    const auto offset = static_cast<int>(r.config.value("seed", std::uint64_t{0}) - min_seed);
    for (Sample s : r.samples) {
      s.repetition += offset;
      out.samples.push_back(std::move(s));
    }
    total_reps += r.config.value("repetitions", 1);
  }
  out.config["seed"] = min_seed;
  out.config["repetitions"] = total_reps;
  json canonical = out.config;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical.dump())));
  out.config_hash = buf;
  finish_aggregates(out);
  return out;
}

}  // namespace qrisk
