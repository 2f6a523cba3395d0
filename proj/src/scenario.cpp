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

#include "qrisk/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "qrisk/error.hpp"

namespace qrisk {

namespace {

constexpr double kProbSlack = 1e-9;

double clamp_unit(double v, std::size_t& clamps) {
  if (v < 0.0 || v > 1.0) {
    ++clamps;
    return std::clamp(v, 0.0, 1.0);
  }
  return v;
}

}  // namespace

ScenarioSet::ScenarioSet(std::vector<double> values, std::vector<double> probs,
                         Encoding encoding, std::size_t clamp_count)
    : values_(std::move(values)), probs_(std::move(probs)), encoding_(std::move(encoding)),
      clamp_count_(clamp_count) {
  if (values_.empty()) throw InvalidArgument("scenario set is empty");
  if (values_.size() != probs_.size()) throw InvalidArgument("values and probs differ in length");
  if (!encoding_.empty() && encoding_.size() != values_.size()) {
    throw InvalidArgument("encoding must hold one tweak vector per scenario");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
      throw InvalidArgument("scenario value " + std::to_string(i) + " outside [0, 1]");
    }
    if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i])) {
      throw InvalidArgument("scenario probability " + std::to_string(i) + " is negative");
    }
    total += probs_[i];
  }
  if (std::abs(total - 1.0) > kProbSlack) {
    throw InvalidArgument("scenario probabilities sum to " + std::to_string(total));
  }
}

ScenarioSet ScenarioSet::uniform(std::vector<double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw InvalidArgument("scenario set is empty");
  return ScenarioSet(std::move(values), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::vector<double> ScenarioSet::amplitudes() const {
  std::vector<double> a(values_.size());
  std::transform(values_.begin(), values_.end(), a.begin(), [](double v) { return std::sqrt(v); });
  return a;
}

void ScenarioSet::write_csv(std::ostream& out) const {
  out << "index,value,prob\n";
  char buf[96];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, values_[i], probs_[i]);
    out << buf;
  }
}

ScenarioSet sample_normal_scenarios(std::size_t n, double mean, double sd, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("need at least one scenario");
  if (!(sd > 0.0)) throw InvalidArgument("scenario sd must be positive");
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> draw(mean, sd);
  std::vector<double> values(n);
  std::size_t clamps = 0;
  for (double& v : values) v = clamp_unit(draw(rng), clamps);
  return ScenarioSet(std::move(values), std::vector<double>(n, 1.0 / static_cast<double>(n)), {},
                     clamps);
}

ScenarioSet add_pricing_noise(const ScenarioSet& set, double eps_p, std::uint64_t seed) {
  if (!(eps_p >= 0.0)) throw InvalidArgument("pricing noise must be non-negative");
  if (eps_p == 0.0) return set;
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> draw(0.0, eps_p);
  std::vector<double> values = set.values();
  std::size_t clamps = set.clamp_count();
  for (double& v : values) v = clamp_unit(v + draw(rng), clamps);
  return ScenarioSet(std::move(values), set.probs(), set.encoding(), clamps);
}

void PricingModel::validate() const {
  if (!(spot > 0.0)) throw InvalidArgument("spot must be positive");
  if (!(vol >= 0.0)) throw InvalidArgument("vol must be non-negative");
  if (!std::isfinite(rate)) throw InvalidArgument("rate must be finite");
  if (!(maturity > 0.0)) throw InvalidArgument("maturity must be positive");
  if (!(strike >= 0.0)) throw InvalidArgument("strike must be non-negative");
  if (path_points < 1) throw InvalidArgument("path_points must be at least 1");
  if (!(value_scale > 0.0)) throw InvalidArgument("value_scale must be positive");
}

double discounted_payoff(const PricingModel& model, double tweak) {
  model.validate();
  if (!(1.0 + tweak > 0.0)) throw InvalidArgument("spot tweak must keep the spot positive");
  const double s0 = model.spot * (1.0 + tweak);
  const double t = model.maturity;
  const double discount = std::exp(-model.rate * t);
  const double drift = (model.rate - 0.5 * model.vol * model.vol) * t;
  const double diffusion = model.vol * std::sqrt(t);
  if (diffusion == 0.0) {
    return discount * std::max(s0 * std::exp(drift) - model.strike, 0.0);
  }
  const boost::math::normal_distribution<double> unit;
  const int n = model.path_points;
  const double p = 1.0 / n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double z = boost::math::quantile(unit, (j + 0.5) * p);
    const double s = s0 * std::exp(drift + diffusion * z);
    sum += p * std::max(s - model.strike, 0.0);
  }
  return discount * sum;
}

double price_expectation(const PricingModel& model, double tweak) {
  return std::clamp(discounted_payoff(model, tweak) / model.value_scale, 0.0, 1.0);
}

ScenarioSet scenarios_from_tweaks(const Portfolio& portfolio,
                                  const std::vector<std::vector<double>>& tweaks,
                                  const std::vector<double>& probs) {
  if (portfolio.empty()) throw InvalidArgument("portfolio is empty");
  if (tweaks.size() != probs.size()) throw InvalidArgument("tweaks and probs differ in length");
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::abs(total - 1.0) > kProbSlack) {
    throw InvalidArgument("scenario probabilities are not normalized");
  }
  double scale = 0.0;
  for (const auto& m : portfolio) {
    m.validate();
    scale += m.value_scale;
  }
  std::vector<double> values(tweaks.size());
  std::size_t clamps = 0;
  for (std::size_t i = 0; i < tweaks.size(); ++i) {
    if (tweaks[i].empty()) throw InvalidArgument("empty tweak vector");
    double raw = 0.0;
    for (const auto& m : portfolio) raw += discounted_payoff(m, tweaks[i].front());
    values[i] = clamp_unit(raw / scale, clamps);
  }
  return ScenarioSet(std::move(values), probs, tweaks, clamps);
}

ScenarioSet scenarios_from_tweaks(const PricingModel& model, const std::vector<double>& tweaks,
                                  const std::vector<double>& probs) {
  std::vector<std::vector<double>> vectors;
  vectors.reserve(tweaks.size());
  for (double t : tweaks) vectors.push_back({t});
  return scenarios_from_tweaks(Portfolio{model}, vectors, probs);
}

}  // namespace qrisk
