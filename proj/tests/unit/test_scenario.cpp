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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "qrisk/error.hpp"
#include "qrisk/scenario.hpp"
#include "qrisk/serialize.hpp"

using namespace qrisk;

namespace {

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Black-Scholes call value written out from the closed form.
double closed_form_call(double s0, double k, double r, double sigma, double t) {
  if (k == 0.0) return s0;
  const double st = sigma * std::sqrt(t);
  const double d1 = (std::log(s0 / k) + (r + 0.5 * sigma * sigma) * t) / st;
  const double d2 = d1 - st;
  return s0 * phi_cdf(d1) - k * std::exp(-r * t) * phi_cdf(d2);
}

}  // namespace

TEST_CASE("set validation") {
  CHECK_NOTHROW(ScenarioSet({0.2, 0.4}, {0.5, 0.5}));
  CHECK_THROWS_AS(ScenarioSet({0.2, 0.4}, {0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(ScenarioSet({0.2, 1.4}, {0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(ScenarioSet({0.2, 0.4}, {1.5, -0.5}), InvalidArgument);
  CHECK_THROWS_AS(ScenarioSet({0.2}, {0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(ScenarioSet({}, {}), InvalidArgument);
  const ScenarioSet u = ScenarioSet::uniform({0.09, 0.25});
  CHECK(u.probs()[1] == 0.5);
  CHECK(u.amplitudes()[0] == doctest::Approx(0.3));
}

TEST_CASE("sampling") {
  const ScenarioSet one = sample_normal_scenarios(1, 0.5, 0.09, 3);
  CHECK(one.probs() == std::vector<double>{1.0});

  const ScenarioSet s = sample_normal_scenarios(5000, 0.5, 0.09, 11);
  double mean = 0.0;
  for (double v : s.values()) mean += v / 5000.0;
  CHECK(std::abs(mean - 0.5) <= 4 * 0.09 / std::sqrt(5000.0));
  CHECK(s.clamp_count() == 0);
  CHECK(sample_normal_scenarios(100, 0.5, 0.09, 11).values() == sample_normal_scenarios(100, 0.5, 0.09, 11).values());
  CHECK(sample_normal_scenarios(100, 0.5, 0.09, 11).values() != sample_normal_scenarios(100, 0.5, 0.09, 12).values());

  const ScenarioSet wide = sample_normal_scenarios(2000, 0.5, 1.0, 5);
  CHECK(wide.clamp_count() > 0);
  for (double v : wide.values()) CHECK((v >= 0.0 && v <= 1.0));
  CHECK_THROWS_AS(sample_normal_scenarios(0, 0.5, 0.1, 1), InvalidArgument);
  CHECK_THROWS_AS(sample_normal_scenarios(10, 0.5, 0.0, 1), InvalidArgument);
}

TEST_CASE("pricing noise") {
  const ScenarioSet s = sample_normal_scenarios(20000, 0.5, 0.09, 1);
  CHECK(add_pricing_noise(s, 0.0, 9).values() == s.values());
  const ScenarioSet noisy = add_pricing_noise(s, 2e-3, 9);
  double ss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) ss += std::pow(noisy.values()[i] - s.values()[i], 2);
  CHECK(std::sqrt(ss / s.size()) == doctest::Approx(2e-3).epsilon(0.03));
  CHECK(add_pricing_noise(s, 2e-3, 9).values() == noisy.values());
  CHECK_THROWS_AS(add_pricing_noise(s, -1.0, 9), InvalidArgument);
}

TEST_CASE("deterministic path pricing") {
  PricingModel m;
  m.vol = 0.0;
  m.rate = 0.03;
  m.value_scale = 2.0;
  CHECK(price_expectation(m, 0.1) == doctest::Approx(1.1 / 2.0).epsilon(1e-14));
}

TEST_CASE("lognormal expectation matches the closed form") {
  PricingModel m;
  m.spot = 1.0;
  m.vol = 0.25;
  m.rate = 0.02;
  m.maturity = 1.5;
  m.path_points = 1000;
  CHECK(std::abs(discounted_payoff(m, 0.0) - 1.0) <= 1e-4);
  for (double k : {0.6, 0.9, 1.0, 1.2}) {
    m.strike = k;
    for (double tweak : {-0.1, 0.0, 0.05}) {
      const double want = closed_form_call(1.0 + tweak, k, m.rate, m.vol, m.maturity);
      CHECK(std::abs(discounted_payoff(m, tweak) - want) <= 1e-4);
    }
  }
  m.strike = -1.0;
  CHECK_THROWS_AS(discounted_payoff(m, 0.0), InvalidArgument);
}

TEST_CASE("scenarios from tweaks") {
  PricingModel m;
  m.vol = 0.0;
  m.value_scale = 2.0;
  const ScenarioSet today = scenarios_from_tweaks(m, {0.0}, {1.0});
  CHECK(today.values()[0] == doctest::Approx(0.5));

  const ScenarioSet sym = scenarios_from_tweaks(m, {-0.05, 0.0, 0.05}, {0.25, 0.5, 0.25});
  CHECK(sym.values()[0] + sym.values()[2] == doctest::Approx(2 * sym.values()[1]));

  PricingModel call = m;
  call.vol = 0.2;
  call.strike = 0.9;
  const double single = discounted_payoff(call, 0.03);
  CHECK(discounted_payoff(call, 0.03) + discounted_payoff(call, 0.03) == doctest::Approx(2 * single));
  const ScenarioSet pair = scenarios_from_tweaks(Portfolio{call, call}, {{0.03, 0.7}}, {1.0});
  CHECK(pair.values()[0] == doctest::Approx(2 * single / (2 * call.value_scale)));
  CHECK(pair.encoding()[0] == std::vector<double>{0.03, 0.7});
  CHECK_THROWS_AS(scenarios_from_tweaks(m, {0.0, 0.1}, {0.5}), InvalidArgument);
}

TEST_CASE("csv and json round trips") {
  const ScenarioSet s = sample_normal_scenarios(50, 0.5, 0.09, 2);
  std::stringstream csv;
  s.write_csv(csv);
  CHECK(csv.str().rfind("index,value,prob\n", 0) == 0);
  const ScenarioSet back = read_scenario_csv(csv);
  CHECK(back.values() == s.values());
  CHECK(back.probs() == s.probs());
  const ScenarioSet j = scenario_set_from_json(nlohmann::json(s));
  CHECK(j.values() == s.values());
  std::stringstream bad("index,value,prob\n0,abc,1\n");
  CHECK_THROWS_AS(read_scenario_csv(bad), InvalidArgument);
}
