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

#include "qrisk/chebyshev.hpp"
#include "qrisk/measurement.hpp"
#include "qrisk/scenario.hpp"

namespace qrisk {

/// sum_i p_i h(P(sqrt(V_i))) for the step threshold. `mode` must be
/// amplitude_squared or function_value.
double prob_marked_step(const ScenarioSet& set, const BoundedSeries& series, MeasurementMode mode);

/// Certifies the series first; an unbounded series is an InvalidArgument.
double prob_marked_step(const ScenarioSet& set, const ChebSeries& series, MeasurementMode mode);

/// sum_i p_i P(sqrt(V_i)) for an inverted-ramp polynomial in either readout.
double prob_marked_ramp(const ScenarioSet& set, const BoundedSeries& series, MeasurementMode mode);
double prob_marked_ramp(const ScenarioSet& set, const ChebSeries& series, MeasurementMode mode);

/// Exact step probability sum_i p_i 1[sqrt(V_i) <= mu].
double ideal_marked_step(const ScenarioSet& set, double mu);

/// Exact inverted-ramp sum sum_i p_i (mu - sqrt(V_i)) 1[sqrt(V_i) <= mu].
double ideal_marked_ramp(const ScenarioSet& set, double mu);

/// d - 1 evaluations of the pricing operator per encoding circuit.
std::int64_t qsp_encoding_oracle_calls(int degree);

struct CvarResult {
  double c_hat = 0.0;       // conditional ramp mean mu_alpha - E[sqrt(V) | below]
  double c_alpha = 0.0;     // amplitude-space conditional value
  double cvar_value = 0.0;  // V_0 - c_alpha
  MeasurementMode mode = MeasurementMode::ideal_value;
};

CvarResult cvar_from_probs(double p_marked_ramp, double p_below, double mu_alpha, double v0,
                           MeasurementMode mode = MeasurementMode::ideal_value);

}  // namespace qrisk
