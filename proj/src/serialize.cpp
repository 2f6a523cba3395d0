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

#include "qrisk/serialize.hpp"

#include <sstream>
#include <string>

#include "qrisk/error.hpp"

namespace qrisk {

void to_json(nlohmann::json& j, const ChebSeries& series) {
  j = nlohmann::json{{"parity", std::string(to_string(series.parity()))},
                     {"degree", series.degree()},
                     {"coeffs", series.coeffs()}};
}

ChebSeries cheb_series_from_json(const nlohmann::json& j) {
  try {
    return ChebSeries(parse_parity(j.at("parity").get<std::string>()), j.at("degree").get<int>(),
                      j.at("coeffs").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed series JSON: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const ThresholdSpec& spec) {
  j = nlohmann::json{{"kind", std::string(to_string(spec.kind))},
                     {"mu", spec.mu},
                     {"delta", spec.delta},
                     {"eps", spec.eps},
                     {"c", spec.plateau()},
                     {"degree", spec.degree},
                     {"grid_size", spec.grid()}};
}

ThresholdSpec threshold_spec_from_json(const nlohmann::json& j) {
  try {
    ThresholdSpec s;
    s.kind = parse_threshold_kind(j.at("kind").get<std::string>());
    s.mu = j.at("mu").get<double>();
    s.delta = j.at("delta").get<double>();
    s.eps = j.at("eps").get<double>();
    if (j.contains("c")) s.c = j.at("c").get<double>();
    s.degree = j.at("degree").get<int>();
    if (j.contains("grid_size")) s.grid_size = j.at("grid_size").get<std::size_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed threshold spec JSON: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const FitResult& fit) {
  j = nlohmann::json{{"series", fit.series},
                     {"objective", fit.objective},
                     {"inside_error", fit.inside_error},
                     {"outside_error", fit.outside_error},
                     {"solver_iterations", fit.solver_iterations},
                     {"max_abs_on_nodes", fit.max_abs_on_nodes},
                     {"rescaled", fit.rescaled}};
}

FitResult fit_result_from_json(const nlohmann::json& j) {
  try {
    FitResult fit{cheb_series_from_json(j.at("series"))};
    fit.objective = j.at("objective").get<double>();
    fit.inside_error = j.at("inside_error").get<double>();
    fit.outside_error = j.at("outside_error").get<double>();
    fit.solver_iterations = j.at("solver_iterations").get<int>();
    fit.max_abs_on_nodes = j.value("max_abs_on_nodes", 0.0);
    fit.rescaled = j.value("rescaled", false);
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed fit JSON: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const ScenarioSet& set) {
  j = nlohmann::json{{"values", set.values()},
                     {"probs", set.probs()},
                     {"encoding", set.encoding()},
                     {"clamp_count", set.clamp_count()}};
}

ScenarioSet scenario_set_from_json(const nlohmann::json& j) {
  try {
    return ScenarioSet(j.at("values").get<std::vector<double>>(), j.at("probs").get<std::vector<double>>(),
                       j.value("encoding", ScenarioSet::Encoding{}), j.value("clamp_count", std::size_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed scenario JSON: ") + e.what());
  }
}

ScenarioSet read_scenario_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,value,prob", 0) != 0) {
    throw InvalidArgument("scenario CSV must start with the header index,value,prob");
  }
  std::vector<double> values, probs;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string index, value, prob;
    if (!std::getline(fields, index, ',') || !std::getline(fields, value, ',') ||
        !std::getline(fields, prob, ',')) {
      throw InvalidArgument("scenario CSV row " + std::to_string(row) + " needs three columns");
    }
    try {
      std::size_t used = 0;
      values.push_back(std::stod(value, &used));
      if (used != value.size()) throw std::invalid_argument(value);
      probs.push_back(std::stod(prob, &used));
      if (used != prob.size()) throw std::invalid_argument(prob);
    } catch (const std::logic_error&) {
      throw InvalidArgument("scenario CSV row " + std::to_string(row) + " is not numeric");
    }
    ++row;
  }
  return ScenarioSet(std::move(values), std::move(probs));
}

void to_json(nlohmann::json& j, const AEInterval& interval) {
  j = nlohmann::json{{"p_low", interval.p_low},
                     {"p_high", interval.p_high},
                     {"eps_k", interval.eps_k},
                     {"alpha_k", interval.alpha_k},
                     {"oracle_calls", interval.oracle_calls},
                     {"circuit_depth_factor", interval.circuit_depth_factor}};
}

nlohmann::json var_result_json(const VarResult& result, bool with_trace) {
  nlohmann::json j{{"mu_alpha", result.mu_alpha},
                   {"var_value", result.var_value},
                   {"quantile_value", result.quantile_value()},
                   {"rounds", result.rounds},
                   {"total_oracle_calls", result.total_oracle_calls},
                   {"ae_calls", result.ae_calls},
                   {"confidence", result.confidence},
                   {"converged", result.converged}};
  if (with_trace) {
    nlohmann::json trace = nlohmann::json::array();
    for (const RoundRecord& r : result.trace) {
      trace.push_back({{"mu", r.mu},
                       {"delta", r.delta},
                       {"probability", r.probability},
                       {"decision", to_string(r.decision)},
                       {"oracle_calls", r.oracle_calls},
                       {"intervals", r.intervals}});
    }
    j["trace"] = std::move(trace);
  }
  return j;
}

void to_json(nlohmann::json& j, const CvarResult& result) {
  j = nlohmann::json{{"c_hat", result.c_hat},
                     {"c_alpha", result.c_alpha},
                     {"cvar_value", result.cvar_value},
                     {"mode", to_string(result.mode)}};
}

void to_json(nlohmann::json& j, const ResourcePlan& plan) {
  j = nlohmann::json{{"degree", plan.degree},
                     {"eps_a", plan.eps_a},
                     {"k", plan.k},
                     {"alpha_k", plan.alpha_k},
                     {"per_iteration_t_depth", plan.per_iteration_t_depth},
                     {"total_t_depth", plan.total_t_depth},
                     {"ae_calls", plan.ae_calls},
                     {"total_oracle_calls", plan.total_oracle_calls},
                     {"clock_rate_hz", plan.clock_rate_hz},
                     {"n_scenarios", plan.n_scenarios}};
}

}  // namespace qrisk
