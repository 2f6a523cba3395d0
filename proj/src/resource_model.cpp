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

#include "qrisk/resource_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "qrisk/error.hpp"
#include "qrisk/parallel.hpp"
#include "qrisk/risk_engine.hpp"
#include "qrisk/scenario.hpp"

namespace qrisk {

namespace {

long double rotation_depth_ld(double eps_r) {
  return 3.0L * std::log2(1.0L / static_cast<long double>(eps_r));
}

long double iteration_depth_ld(const CostParams& p, int d) {
  return static_cast<long double>(p.t_s) + static_cast<long double>(d) * p.t_a +
         static_cast<long double>(d) * rotation_depth_ld(p.eps_r);
}

long double iqae_real(double eps_a, double alpha_k) {
  if (!(eps_a > 0.0 && eps_a < std::numbers::pi / 4)) {
    throw InvalidArgument("eps_A must lie in (0, pi/4)");
  }
  if (!(alpha_k > 0.0 && alpha_k < 1.0)) throw InvalidArgument("alpha_k must lie in (0, 1)");
  const long double eps = eps_a;
  const long double arg =
      (2.0L / alpha_k) * std::log2(std::numbers::pi_v<long double> / (4.0L * eps));
  if (!(arg > 1.0L)) throw InvalidArgument("IQAE bound undefined: outer log argument <= 1");
  return (1.4L / eps) * std::log(arg);
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

double normal_quantile(double mean, double sd, double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(mean, sd), p);
}

}  // namespace

void CostParams::validate() const {
  if (!(t_a > 0.0)) throw InvalidArgument("t_a must be positive");
  if (!(t_s >= 0.0)) throw InvalidArgument("t_s must be non-negative");
  if (!(eps_r > 0.0 && eps_r < 1.0)) throw InvalidArgument("eps_r must lie in (0, 1)");
  if (!(classical_seconds_per_scenario > 0.0)) throw InvalidArgument("classical seconds must be positive");
  if (!(advantage_reference_rate_hz > 0.0)) throw InvalidArgument("reference rate must be positive");
}

double rotation_t_depth(double eps_r) {
  if (!(eps_r > 0.0 && eps_r < 1.0)) throw InvalidArgument("eps_r must lie in (0, 1)");
  return static_cast<double>(rotation_depth_ld(eps_r));
}

double iteration_t_depth(const CostParams& params, int degree) {
  params.validate();
  if (degree < 1) throw InvalidArgument("degree must be positive");
  return static_cast<double>(iteration_depth_ld(params, degree));
}

double total_t_depth(const CostParams& params, int degree, double eps_a, double k, double alpha_k) {
  params.validate();
  if (degree < 1) throw InvalidArgument("degree must be positive");
  if (!(k > 0.0)) throw InvalidArgument("round count must be positive");
  const long double value =
      2.0L * static_cast<long double>(k) * iqae_real(eps_a, alpha_k) * iteration_depth_ld(params, degree);
  return static_cast<double>(value);
}

ResourcePlan make_plan(const CostParams& params, int degree, double eps_a, double k,
                       double alpha_k, std::size_t n_scenarios) {
  ResourcePlan plan;
  plan.degree = degree;
  plan.eps_a = eps_a;
  plan.k = k;
  plan.alpha_k = alpha_k;
  plan.per_iteration_t_depth = iteration_t_depth(params, degree);
  plan.total_t_depth = total_t_depth(params, degree, eps_a, k, alpha_k);
  plan.ae_calls = static_cast<double>(static_cast<long double>(k) * iqae_real(eps_a, alpha_k));
  plan.total_oracle_calls = static_cast<std::int64_t>(std::ceil(plan.ae_calls)) * 2 * (degree - 1);
  plan.n_scenarios = n_scenarios;
  plan.clock_rate_hz = clock_rate_for_parity(params, plan, n_scenarios);
  return plan;
}

double clock_rate_for_parity(const CostParams& params, const ResourcePlan& plan,
                             std::size_t n_scenarios) {
  params.validate();
  if (n_scenarios < 1) throw InvalidArgument("need at least one scenario");
  return plan.total_t_depth /
         (static_cast<double>(n_scenarios) * params.classical_seconds_per_scenario);
}

LoadingCost scenario_loading_cost(std::size_t n, double eps, double c1, double c2) {
  if (n < 1) throw InvalidArgument("need at least one scenario");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("loading precision must lie in (0, 1)");
  LoadingCost c;
  c.t_depth = c1 * (std::log2(static_cast<double>(n)) + std::log2(1.0 / eps));
  c.t_count = c2 * static_cast<double>(n);
  return c;
}

void SearchProtocol::validate() const {
  if (n_scenarios < 1) throw InvalidArgument("search: n_scenarios must be positive");
  if (!(sd > 0.0)) throw InvalidArgument("search: sd must be positive");
  if (means.empty() || degrees.empty() || eps_grid.empty()) {
    throw InvalidArgument("search: sweeps must be non-empty");
  }
  if (repetitions < 1) throw InvalidArgument("search: repetitions must be positive");
  if (!(percentile > 0.0 && percentile <= 1.0)) throw InvalidArgument("search: percentile must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("search: alpha must lie in (0, 1)");
  schedule.validate();
}

double per_round_alpha(const PrecisionSchedule& schedule) {
  schedule.validate();
  return schedule.total_failure_budget / schedule.k_max;
}

double classical_error(const SearchProtocol& protocol) {
  protocol.validate();
  const double truth = normal_quantile(protocol.classical_mean, protocol.sd, 1.0 - protocol.alpha);
  const int reps = protocol.repetitions;
  std::vector<double> errors(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](long r) {
    const std::uint64_t s = protocol.seed + static_cast<std::uint64_t>(r);
    const ScenarioSet set = sample_normal_scenarios(protocol.n_scenarios, protocol.classical_mean,
                                                    protocol.sd, s);
    const double v = var_semiclassical(set, protocol.alpha, protocol.eps_p,
                                       s ^ 0x9E3779B97F4A7C15ULL);
    errors[static_cast<std::size_t>(r)] = v - truth;
  });
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= reps;
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  return std::sqrt(ss / std::max(1, reps - 1));
}

std::vector<SearchCell> simulate_cells(const SearchProtocol& protocol, const CostParams& params) {
  protocol.validate();
  params.validate();
  const double alpha_k = per_round_alpha(protocol.schedule);
  const std::size_t n_eps = protocol.eps_grid.size();
  const std::size_t n_means = protocol.means.size();
  const auto reps = static_cast<std::size_t>(protocol.repetitions);
  const std::size_t tasks = n_means * reps;

  std::vector<SearchCell> cells;
  for (int d : protocol.degrees) {
    QspMethod method;
    method.degree = d;
    method.delta = protocol.delta_scale > 0.0 ? protocol.delta_scale / d : protocol.delta;
    method.eps = protocol.fit_eps;
    method.mode = protocol.mode;
    method.cache = protocol.cache;

    std::vector<double> err(tasks * n_eps), rounds(tasks * n_eps), ae(tasks * n_eps);
    parallel_for(static_cast<long>(tasks), [&](long t) {
      const std::size_t task = static_cast<std::size_t>(t);
      const double mean = protocol.means[task / reps];
      const ScenarioSet set = sample_normal_scenarios(protocol.n_scenarios, mean, protocol.sd,
                                                      protocol.seed + task);
      const double truth = normal_quantile(mean, protocol.sd, 1.0 - protocol.alpha);
      std::map<double, double> memo;
      auto probability = [&](double mu) {
        auto it = memo.find(mu);
        if (it != memo.end()) return it->second;
        const double p = qsp_probability(set, method, mu);
        memo.emplace(mu, p);
        return p;
      };
      for (std::size_t e = 0; e < n_eps; ++e) {
        VarOptions opt;
        opt.alpha = protocol.alpha;
        opt.schedule = protocol.schedule;
        opt.schedule.eps_final = protocol.eps_grid[e];
        opt.keep_trace = false;
        const VarResult r = bisect_var(probability, [](double) { return 0.0; }, d - 1, opt);
        err[task * n_eps + e] = std::abs(r.quantile_value() - truth);
        rounds[task * n_eps + e] = r.rounds;
        ae[task * n_eps + e] = static_cast<double>(r.ae_calls);
      }
    });

    for (std::size_t e = 0; e < n_eps; ++e) {
      SearchCell cell;
      cell.degree = d;
      cell.eps_a = protocol.eps_grid[e];
      double eq = 0.0, kr = 0.0, ke = 0.0;
      for (std::size_t i = 0; i < n_means; ++i) {
        std::vector<double> errs(reps);
        for (std::size_t r = 0; r < reps; ++r) {
          const std::size_t task = i * reps + r;
          errs[r] = err[task * n_eps + e];
          kr += rounds[task * n_eps + e];
          ke += ae[task * n_eps + e];
        }
        eq += percentile(std::move(errs), protocol.percentile);
      }
      const double worst_case = static_cast<double>(iqae_real(cell.eps_a, alpha_k));
      cell.eps_q = eq / static_cast<double>(n_means);
      cell.k_rounds = kr / static_cast<double>(tasks);
      cell.k_effective = ke / static_cast<double>(tasks) / worst_case;
      cell.k = protocol.round_count == RoundCount::rounds ? cell.k_rounds : cell.k_effective;
      cell.total_t_depth = total_t_depth(params, d, cell.eps_a, cell.k, alpha_k);
      cells.push_back(cell);
    }
  }
  return cells;
}

SearchResult select_matching_cell(std::vector<SearchCell> cells, double target_error,
                                  double alpha_k) {
  if (std::isnan(target_error)) throw InvalidArgument("target error is NaN");
  SearchResult out;
  out.target_error = target_error;
  out.alpha_k = alpha_k;
  out.cells = std::move(cells);
  const SearchCell* best = nullptr;
  double best_error = std::numeric_limits<double>::infinity();
  for (SearchCell& c : out.cells) {
    best_error = std::min(best_error, c.eps_q);
    c.feasible = c.eps_q <= target_error;
    if (c.feasible && (best == nullptr || c.total_t_depth < best->total_t_depth)) best = &c;
  }
  if (best == nullptr) {
    throw NoFeasibleParameters("no (d, eps_A) cell reaches the target error " +
                                   std::to_string(target_error),
                               best_error);
  }
  out.degree = best->degree;
  out.eps_a = best->eps_a;
  out.k_avg = best->k;
  out.eps_q = best->eps_q;
  return out;
}

SearchResult search_matching_params(const SearchProtocol& protocol, double target_error,
                                    const CostParams& params) {
  if (std::isnan(target_error)) throw InvalidArgument("target error is NaN");
  return select_matching_cell(simulate_cells(protocol, params), target_error,
                              per_round_alpha(protocol.schedule));
}

}  // namespace qrisk
