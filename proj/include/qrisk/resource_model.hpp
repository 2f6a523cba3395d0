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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qrisk/ae_sim.hpp"
#include "qrisk/measurement.hpp"
#include "qrisk/threshold_fit.hpp"

namespace qrisk {

struct CostParams {
  double t_a = 3900.0;
  double t_s = 0.0;
  double eps_r = 1e-7;
  double classical_seconds_per_scenario = 1.0;
  double advantage_reference_rate_hz = 4.5e7;

  void validate() const;
};

/// T-depth of one synthesized rotation, 3 log2(1 / eps_r).
double rotation_t_depth(double eps_r);

/// T_i = t_s + d t_a + d T_R.
double iteration_t_depth(const CostParams& params, int degree);

/// T_QSP = (2.8 k / eps_A) ln((2 / alpha_k) log2(pi / (4 eps_A))) T_i, evaluated
/// in extended precision and rounded once.
double total_t_depth(const CostParams& params, int degree, double eps_a, double k, double alpha_k);

struct ResourcePlan {
  int degree = 0;
  double eps_a = 0.0;
  double k = 0.0;
  double alpha_k = 0.0;
  double per_iteration_t_depth = 0.0;
  double total_t_depth = 0.0;
  double ae_calls = 0.0;                 // k times the IQAE bound (unrounded)
  std::int64_t total_oracle_calls = 0;   // two circuits per AE call, d - 1 each
  double clock_rate_hz = 0.0;
  std::size_t n_scenarios = 0;
};

ResourcePlan make_plan(const CostParams& params, int degree, double eps_a, double k,
                       double alpha_k, std::size_t n_scenarios);

/// total_t_depth / (n_scenarios * classical seconds per scenario).
double clock_rate_for_parity(const CostParams& params, const ResourcePlan& plan,
                             std::size_t n_scenarios);

struct LoadingCost {
  double t_depth = 0.0;
  double t_count = 0.0;
  bool order_of_magnitude_only = true;
};

/// (c1 (log2 n + log2(1/eps)), c2 n).
LoadingCost scenario_loading_cost(std::size_t n, double eps, double c1 = 1.0, double c2 = 1.0);

enum class RoundCount { rounds, effective };

struct SearchProtocol {
  std::size_t n_scenarios = 5000;
  double sd = 0.09;
  double classical_mean = 0.5;
  std::vector<double> means{0.45, 0.48, 0.5, 0.52, 0.55};
  double alpha = 0.99;
  int repetitions = 200;
  double percentile = 0.68;
  double eps_p = 2e-3;
  std::vector<int> degrees{200, 400, 600, 800, 1000};
  std::vector<double> eps_grid{6e-4, 1.2e-3, 2.5e-3, 5e-3};
  double delta = 1e-3;        // fixed gap when delta_scale is 0
  double delta_scale = 0.0;   // gap = delta_scale / d when positive
  double fit_eps = 1e-3;
  MeasurementMode mode = MeasurementMode::amplitude_squared;
  PrecisionSchedule schedule;  // eps_final is overwritten per cell
  RoundCount round_count = RoundCount::rounds;
  std::uint64_t seed = 1;
  PolynomialCache* cache = nullptr;

  void validate() const;
};

struct SearchCell {
  int degree = 0;
  double eps_a = 0.0;
  double eps_q = 0.0;      // mean over `means` of the percentile error
  double k_rounds = 0.0;   // mean bisection rounds
  double k_effective = 0.0;  // mean AE calls over one worst-case IQAE run
  double k = 0.0;          // the count selected by round_count
  double total_t_depth = 0.0;
  bool feasible = false;
};

struct SearchResult {
  int degree = 0;
  double eps_a = 0.0;
  double k_avg = 0.0;
  double alpha_k = 0.0;
  double eps_q = 0.0;
  double target_error = 0.0;
  std::vector<SearchCell> cells;
};

/// Per-round failure probability implied by a schedule: budget / k_max.
double per_round_alpha(const PrecisionSchedule& schedule);

/// Classical error: standard deviation over repetitions of V_alpha minus the
/// exact normal quantile, with pricing noise eps_p.
double classical_error(const SearchProtocol& protocol);

/// Simulates every (d, eps_A) cell and returns the cheapest cell whose error
/// does not exceed target_error. Throws NoFeasibleParameters otherwise.
SearchResult search_matching_params(const SearchProtocol& protocol, double target_error,
                                    const CostParams& params);

/// Cells only, no feasibility decision.
std::vector<SearchCell> simulate_cells(const SearchProtocol& protocol, const CostParams& params);

/// Marks feasibility and picks the cheapest feasible cell of a finished sweep.
SearchResult select_matching_cell(std::vector<SearchCell> cells, double target_error,
                                  double alpha_k);

}  // namespace qrisk
