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

#include <istream>

#include <json.hpp>

#include "qrisk/chebyshev.hpp"
#include "qrisk/resource_model.hpp"
#include "qrisk/risk_engine.hpp"
#include "qrisk/scenario.hpp"
#include "qrisk/threshold_fit.hpp"

namespace qrisk {

void to_json(nlohmann::json& j, const ChebSeries& series);
ChebSeries cheb_series_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const ThresholdSpec& spec);
ThresholdSpec threshold_spec_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const FitResult& fit);
FitResult fit_result_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const ScenarioSet& set);
ScenarioSet scenario_set_from_json(const nlohmann::json& j);
/// Reads the index,value,prob layout written by ScenarioSet::write_csv.
ScenarioSet read_scenario_csv(std::istream& in);

void to_json(nlohmann::json& j, const AEInterval& interval);
/// The trace is included only when `with_trace` is set.
nlohmann::json var_result_json(const VarResult& result, bool with_trace);
void to_json(nlohmann::json& j, const CvarResult& result);
void to_json(nlohmann::json& j, const ResourcePlan& plan);

}  // namespace qrisk
