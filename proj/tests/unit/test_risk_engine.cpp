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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "qrisk/error.hpp"
#include "qrisk/qae_sim.hpp"
#include "qrisk/qsp_sim.hpp"
#include "qrisk/risk_engine.hpp"
#include "qrisk/scenario.hpp"

using namespace qrisk;

namespace {

// Infimum definition: the smallest atom whose cumulative mass reaches 1 - alpha.
double brute_quantile(const std::vector<double>& v, const std::vector<double>& p, double alpha) {
  double best = std::numeric_limits<double>::infinity();
  for (double candidate : v) {
    double mass = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] <= candidate) mass += p[i];
    }
    if (mass >= 1.0 - alpha - 1e-12) best = std::min(best, candidate);
  }
  return best;
}

// Halving bisection with deterministic interval decisions, written out
// independently of the library.
double oracle_bisection(const std::function<double(double)>& prob, double target, double eps_start,
                        double eps_final, int k_max) {
  std::vector<double> eps;
  for (double e = eps_start; e > eps_final; e /= 2) eps.push_back(e);
  eps.push_back(eps_final);
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < k_max; ++k) {
    const double mu = (lo + hi) / 2;
    const double p = prob(mu);
    int decision = 0;
    for (double e : eps) {
      if (std::min(p + e, 1.0) < target) {
        decision = -1;
        break;
      }
      if (std::max(p - e, 0.0) > target) {
        decision = 1;
        break;
      }
    }
    if (decision == 0) return mu;
    (decision < 0 ? lo : hi) = mu;
  }
  return (lo + hi) / 2;
}

VarOptions deterministic(double eps_final, int k_max = 30) {
  VarOptions o;
  o.schedule.eps_final = eps_final;
  o.schedule.k_max = k_max;
  return o;
}

}  // namespace

TEST_CASE("classical quantile on small sets") {
  CHECK(var_classical(ScenarioSet::uniform({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}), 0.99) == 0.1);
  CHECK(var_classical(ScenarioSet({0.42}, {1.0}), 0.5) == 0.42);
  CHECK(var_classical(ScenarioSet({0.42}, {1.0}), 0.999) == 0.42);
  CHECK(var_classical(ScenarioSet({0.3, 0.1, 0.2}, {0.2, 0.3, 0.5}), 0.5) == 0.2);
  CHECK_THROWS_AS(var_classical(ScenarioSet({0.42}, {1.0}), 1.0), InvalidArgument);
}

TEST_CASE("classical quantile matches the infimum definition exhaustively") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> size(1, 12), level(0, 9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = size(rng);
    std::vector<double> v(static_cast<std::size_t>(n)), w(v.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      v[static_cast<std::size_t>(i)] = level(rng) / 10.0;  // frequent ties
      w[static_cast<std::size_t>(i)] = u(rng) + 0.01;
      total += w[static_cast<std::size_t>(i)];
    }
    for (double& x : w) x /= total;
    const double alpha = u(rng) * 0.98 + 0.01;
    CHECK(var_classical(ScenarioSet(v, w), alpha) == brute_quantile(v, w, alpha));
  }
}

TEST_CASE("classical quantile of a normal sample") {
  const boost::math::normal_distribution<double> dist(0.5, 0.09);
  const double q = boost::math::quantile(dist, 0.01);
  CHECK(q == doctest::Approx(0.2906).epsilon(1e-3));
  const double se = std::sqrt(0.01 * 0.99 / 5000) / boost::math::pdf(dist, q);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CHECK(std::abs(var_classical(sample_normal_scenarios(5000, 0.5, 0.09, seed), 0.99) - q) <= 4 * se);
  }
}

TEST_CASE("semiclassical quantile") {
  const ScenarioSet set = sample_normal_scenarios(5000, 0.5, 0.09, 2);
  CHECK(var_semiclassical(set, 0.99, 0.0, 1) == var_classical(set, 0.99));
  CHECK(std::abs(var_semiclassical(set, 0.99, 2e-3, 1) - var_classical(set, 0.99)) <= 10 * 2e-3);
}

TEST_CASE("bisection agrees with an independent exact-probability bisection") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> mean(0.35, 0.65), sd(0.05, 0.15);
  for (int trial = 0; trial < 10; ++trial) {
    const ScenarioSet set = sample_normal_scenarios(500, mean(rng), sd(rng), 100 + trial);
    const VarOptions opt = deterministic(1e-4);
    QspMethod ideal;
    ideal.mode = MeasurementMode::ideal_value;
    const VarResult q = var_qsp(set, ideal, opt);
    const double want = oracle_bisection([&](double mu) { return ideal_marked_step(set, mu); }, 0.01, 0.1, 1e-4, 30);
    CHECK(std::abs(q.mu_alpha - want) <= std::ldexp(1.0, -30));

    const VarResult a = var_qae(set, 8, opt);
    const double want_a = oracle_bisection([&](double mu) { return prob_below_qae(set, 8, mu * mu); }, 0.01, 0.1, 1e-4, 30);
    CHECK(std::abs(a.mu_alpha - want_a) <= std::ldexp(1.0, -30));
  }
}

TEST_CASE("atom forces the round cap") {
  const ScenarioSet atom({0.25}, {1.0});
  QspMethod ideal;
  ideal.mode = MeasurementMode::ideal_value;
  const VarResult r = var_qsp(atom, ideal, deterministic(1e-3));
  CHECK_FALSE(r.converged);
  CHECK(r.rounds == 30);
  CHECK(std::abs(r.mu_alpha - 0.5) <= std::ldexp(1.0, -29));
  CHECK(r.var_value == doctest::Approx(0.75).epsilon(1e-8));
}

TEST_CASE("bookkeeping") {
  const ScenarioSet set = sample_normal_scenarios(2000, 0.5, 0.09, 31);
  QspMethod ideal;
  ideal.mode = MeasurementMode::ideal_value;
  ideal.degree = 200;
  const VarResult r = var_qsp(set, ideal, deterministic(1e-3));
  REQUIRE(r.trace.size() == static_cast<std::size_t>(r.rounds));
  std::int64_t ae = 0;
  double alpha = 0.0;
  for (const auto& rec : r.trace) {
    std::int64_t calls = 0;
    for (const auto& iv : rec.intervals) {
      calls += iv.oracle_calls;
      alpha += iv.alpha_k;
    }
    CHECK(rec.oracle_calls == calls * 199);
    ae += calls;
  }
  CHECK(r.ae_calls == ae);
  CHECK(r.total_oracle_calls == ae * 199);
  CHECK(r.confidence == doctest::Approx(1.0 - alpha).epsilon(1e-12));
  CHECK(r.var_value == doctest::Approx(1.0 - r.mu_alpha * r.mu_alpha));
}

TEST_CASE("stochastic centres are reproducible") {
  const ScenarioSet set = sample_normal_scenarios(1000, 0.5, 0.09, 3);
  VarOptions opt = deterministic(1e-3);
  opt.stochastic_seed = 5;
  QspMethod ideal;
  ideal.mode = MeasurementMode::ideal_value;
  const VarResult a = var_qsp(set, ideal, opt);
  const VarResult b = var_qsp(set, ideal, opt);
  CHECK(a.mu_alpha == b.mu_alpha);
  CHECK(a.ae_calls == b.ae_calls);
}

TEST_CASE("coarse comparator is less accurate") {
  const ScenarioSet set = sample_normal_scenarios(2000, 0.5, 0.09, 4);
  const double classical = var_classical(set, 0.99);
  const double e1 = std::abs(var_qae(set, 1, deterministic(1e-4)).quantile_value() - classical);
  const double e10 = std::abs(var_qae(set, 10, deterministic(1e-4)).quantile_value() - classical);
  CHECK(e1 > e10);
}

TEST_CASE("fitted threshold estimator lands near the classical quantile") {
  const ScenarioSet set = sample_normal_scenarios(5000, 0.5, 0.09, 6);
  QspMethod m;
  m.degree = 400;
  m.delta = 6.0 / 400;
  m.mode = MeasurementMode::function_value;
  PolynomialCache cache;
  m.cache = &cache;
  const VarResult r = var_qsp(set, m, deterministic(1e-4));
  CHECK(std::abs(r.quantile_value() - var_classical(set, 0.99)) < 5e-3);
  CHECK(cache.hits() + cache.misses() == static_cast<std::size_t>(r.rounds));
  CHECK(m.effective_delta(0.01) == 0.01);
  CHECK(m.effective_delta(0.999) == doctest::Approx(0.001));
}

TEST_CASE("conditional value in ideal mode") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ScenarioSet set = sample_normal_scenarios(5000, 0.5, 0.09, seed);
    QspMethod ideal;
    ideal.mode = MeasurementMode::ideal_value;
    const VarResult var = var_qsp(set, ideal, deterministic(1e-4));
    const CvarResult c = cvar_qsp(set, var, ideal, 1.0, true);
    double mass = 0.0, sum = 0.0;
    for (double v : set.values()) {
      if (std::sqrt(v) <= var.mu_alpha) {
        mass += 1.0;
        sum += std::sqrt(v);
      }
    }
    CHECK(std::abs(c.c_alpha - sum / mass) <= 0.02 * sum / mass);
    CHECK(c.cvar_value == doctest::Approx(1.0 - c.c_alpha));
  }
  const ScenarioSet atom({0.09}, {1.0});
  VarResult fake;
  fake.mu_alpha = 0.5;
  fake.converged = true;
  QspMethod ideal;
  ideal.mode = MeasurementMode::ideal_value;
  CHECK(cvar_qsp(atom, fake, ideal, 1.0).cvar_value == doctest::Approx(0.7));
  fake.converged = false;
  CHECK_THROWS_AS(cvar_qsp(atom, fake, ideal, 1.0), InvalidArgument);
  fake.converged = true;
  fake.mu_alpha = 0.1;
  CHECK_THROWS_AS(cvar_qsp(atom, fake, ideal, 1.0), UndefinedConditional);
}

TEST_CASE("error propagation multiplier") {
  const double h = 1e-6;
  auto numeric = [&](double mean, double sd, double p) {
    const boost::math::normal_distribution<double> d(mean, sd);
    return (boost::math::quantile(d, p + h) - boost::math::quantile(d, p - h)) / (2 * h);
  };
  CHECK(propagate_error(1.0, NormalDist{0.0, 1.0}, 0.5) == doctest::Approx(std::sqrt(2 * std::numbers::pi)).epsilon(1e-12));
  CHECK(propagate_error(1.0, NormalDist{0.0, 1.0}, 0.5) == doctest::Approx(numeric(0.0, 1.0, 0.5)).epsilon(1e-6));
  CHECK(propagate_error(1.0, NormalDist{0.5, 0.09}, 0.99) == doctest::Approx(numeric(0.5, 0.09, 0.01)).epsilon(1e-5));
  CHECK(propagate_error(1.0, NormalDist{0.0, 2.0}, 0.9) == doctest::Approx(2 * propagate_error(1.0, NormalDist{0.0, 1.0}, 0.9)));
  CHECK(propagate_error(3e-4, NormalDist{0.5, 0.09}, 0.99) == doctest::Approx(3e-4 * 0.09 / boost::math::pdf(boost::math::normal_distribution<double>(), boost::math::quantile(boost::math::normal_distribution<double>(), 0.01))));
  CHECK_THROWS_AS(propagate_error(1.0, NormalDist{0.0, 1.0}, 1.0), InvalidArgument);
}
