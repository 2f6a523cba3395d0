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
#include <iosfwd>
#include <vector>

namespace qrisk {

/// Scenario prices V(s_i) in [0, 1] with probabilities p(s_i).
class ScenarioSet {
 public:
  using Encoding = std::vector<std::vector<double>>;

  /// Validates sum(probs) = 1 within 1e-9, probs >= 0 and values in [0, 1].
  ScenarioSet(std::vector<double> values, std::vector<double> probs, Encoding encoding = {},
              std::size_t clamp_count = 0);

  /// Uniform probabilities 1/n.
  static ScenarioSet uniform(std::vector<double> values);

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const Encoding& encoding() const noexcept { return encoding_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t clamp_count() const noexcept { return clamp_count_; }

  /// sqrt(V_i), the amplitudes a signal-processing circuit sees.
  std::vector<double> amplitudes() const;

  void write_csv(std::ostream& out) const;

 private:
  std::vector<double> values_;
  std::vector<double> probs_;
  Encoding encoding_;
  std::size_t clamp_count_;
};

ScenarioSet sample_normal_scenarios(std::size_t n, double mean, double sd, std::uint64_t seed);

ScenarioSet add_pricing_noise(const ScenarioSet& set, double eps_p, std::uint64_t seed);

struct PricingModel {
  double spot = 1.0;
  double vol = 0.2;
  double rate = 0.0;
  double maturity = 1.0;
  double strike = 0.0;
  int path_points = 1000;
  double value_scale = 1.0;

  void validate() const;
};

/// Discounted expected call payoff under a spot tweak, before normalization.
double discounted_payoff(const PricingModel& model, double tweak);

/// discounted_payoff / value_scale, clamped to [0, 1].
double price_expectation(const PricingModel& model, double tweak);

using Portfolio = std::vector<PricingModel>;

/// Each tweak vector prices through its first factor. Values are the summed
/// payoffs over the portfolio divided by the summed value scales.
ScenarioSet scenarios_from_tweaks(const Portfolio& portfolio,
                                  const std::vector<std::vector<double>>& tweaks,
                                  const std::vector<double>& probs);

ScenarioSet scenarios_from_tweaks(const PricingModel& model, const std::vector<double>& tweaks,
                                  const std::vector<double>& probs);

}  // namespace qrisk
