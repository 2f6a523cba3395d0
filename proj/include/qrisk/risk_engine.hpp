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

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qrisk/ae_sim.hpp"
#include "qrisk/measurement.hpp"
#include "qrisk/qsp_sim.hpp"
#include "qrisk/scenario.hpp"
#include "qrisk/threshold_fit.hpp"

namespace qrisk {

/// Smallest atom v with P[V <= v] >= 1 - alpha (value space).
double var_classical(const ScenarioSet& set, double alpha);

/// var_classical after N(0, eps_p^2) pricing noise.
double var_semiclassical(const ScenarioSet& set, double alpha, double eps_p, std::uint64_t seed);

struct RoundRecord {
  double mu = 0.0;
  double delta = 0.0;        // gap used by the threshold fit, 0 when no fit was made
  double probability = 0.0;  // encoded probability handed to amplitude estimation
  Decision decision = Decision::converged;
  std::vector<AEInterval> intervals;
  std::int64_t oracle_calls = 0;  // AE calls times encoding calls
};

struct VarResult {
  double mu_alpha = 0.0;   // amplitude-space threshold
  double var_value = 0.0;  // v0 - mu_alpha^2
  int rounds = 0;
  std::int64_t total_oracle_calls = 0;
  std::int64_t ae_calls = 0;
  double confidence = 1.0;
  bool converged = false;
  std::vector<RoundRecord> trace;

  double quantile_value() const { return mu_alpha * mu_alpha; }
};

struct VarOptions {
  double alpha = 0.99;
  PrecisionSchedule schedule;
  double v0 = 1.0;
  /// Seeds the optional stochastic interval centres.
  std::optional<std::uint64_t> stochastic_seed;
  bool keep_trace = true;
};

struct QspMethod {
  int degree = 600;
  double delta = 1e-3;
  double eps = 1e-3;
  std::optional<double> c;
  std::size_t grid_size = 0;
  MeasurementMode mode = MeasurementMode::amplitude_squared;
  PolynomialCache* cache = nullptr;  // fits on the fly when null

  /// Gap at threshold mu, shrunk so that the gap stays inside (0, 1).
  double effective_delta(double mu) const;
  ThresholdSpec spec(ThresholdKind kind, double mu) const;
};

/// Algorithm-1 bisection with an arbitrary probability functional.
VarResult bisect_var(const std::function<double(double)>& probability,
                     const std::function<double(double)>& gap, std::int64_t encoding_calls,
                     const VarOptions& options);

VarResult var_qsp(const ScenarioSet& set, const QspMethod& method, const VarOptions& options);
VarResult var_qae(const ScenarioSet& set, int m, const VarOptions& options);

/// Probability the QSP encoding hands to amplitude estimation at threshold mu,
/// clipped to [0, 1] since a function-value readout can stray outside it.
double qsp_probability(const ScenarioSet& set, const QspMethod& method, double mu);

CvarResult cvar_qsp(const ScenarioSet& set, const VarResult& var, const QspMethod& method,
                    double v0, bool allow_unconverged = false);

struct NormalDist {
  double mean = 0.0;
  double sd = 1.0;
};

/// First-order VaR error delta_p * dF^{-1}/dp at p = 1 - alpha.
double propagate_error(double delta_p, const NormalDist& dist, double alpha);

}  // namespace qrisk
