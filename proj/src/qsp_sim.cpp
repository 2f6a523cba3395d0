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

#include "qrisk/qsp_sim.hpp"

#include <algorithm>
#include <cmath>

#include "qrisk/error.hpp"
#include "qrisk/kernels.hpp"

namespace qrisk {

namespace {

double marked(const ScenarioSet& set, const BoundedSeries& series, MeasurementMode mode) {
  if (mode == MeasurementMode::ideal_value) {
    throw InvalidArgument("ideal_value readout has no polynomial; use the ideal_* functions");
  }
  const std::vector<double> amps = set.amplitudes();
  return kernels::omp::weighted_series_sum(series.series(), amps, set.probs(), mode);
}

BoundedSeries certify_default(const ChebSeries& series) {
  const std::size_t grid = 10 * std::max<std::size_t>(2000, 4 * static_cast<std::size_t>(series.degree()));
  return BoundedSeries::certify(series, grid);
}

}  // namespace

double prob_marked_step(const ScenarioSet& set, const BoundedSeries& series, MeasurementMode mode) {
  return marked(set, series, mode);
}

double prob_marked_step(const ScenarioSet& set, const ChebSeries& series, MeasurementMode mode) {
  return marked(set, certify_default(series), mode);
}

double prob_marked_ramp(const ScenarioSet& set, const BoundedSeries& series, MeasurementMode mode) {
  return marked(set, series, mode);
}

double prob_marked_ramp(const ScenarioSet& set, const ChebSeries& series, MeasurementMode mode) {
  return marked(set, certify_default(series), mode);
}

double ideal_marked_step(const ScenarioSet& set, double mu) {
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (std::sqrt(set.values()[i]) <= mu) total += set.probs()[i];
  }
  return total;
}

double ideal_marked_ramp(const ScenarioSet& set, double mu) {
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double a = std::sqrt(set.values()[i]);
    if (a <= mu) total += set.probs()[i] * (mu - a);
  }
  return total;
}

std::int64_t qsp_encoding_oracle_calls(int degree) {
  if (degree < 2) throw InvalidArgument("polynomial degree must be at least 2");
  return degree - 1;
}

CvarResult cvar_from_probs(double p_marked_ramp, double p_below, double mu_alpha, double v0,
                           MeasurementMode mode) {
  if (!(p_below > 0.0)) {
    throw UndefinedConditional("no probability mass below the VaR threshold");
  }
  CvarResult r;
  r.c_hat = p_marked_ramp / p_below;
  r.c_alpha = mu_alpha - r.c_hat;
  r.cvar_value = v0 - r.c_alpha;
  r.mode = mode;
  return r;
}

}  // namespace qrisk
