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

#include "qrisk/risk_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "qrisk/error.hpp"
#include "qrisk/qae_sim.hpp"

namespace qrisk {

namespace {
constexpr double kProbabilitySlack = 1e-9;
}  // namespace

namespace {

constexpr double kCumulativeSlack = 1e-12;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

FitResult fit_cached(const QspMethod& method, const ThresholdSpec& spec) {
  return method.cache != nullptr ? method.cache->get(spec) : fit_threshold(spec);
}

}  // namespace

double var_classical(const ScenarioSet& set, double alpha) {
  check_alpha(alpha);
  const auto& v = set.values();
  const auto& p = set.probs();
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  const double target = 1.0 - alpha - kCumulativeSlack;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    cumulative += p[order[k]];
    const bool group_end = k + 1 == order.size() || v[order[k + 1]] != v[order[k]];
    if (group_end && cumulative >= target) return v[order[k]];
  }
  return v[order.back()];
}

double var_semiclassical(const ScenarioSet& set, double alpha, double eps_p, std::uint64_t seed) {
  return var_classical(add_pricing_noise(set, eps_p, seed), alpha);
}

double QspMethod::effective_delta(double mu) const {
  return std::min({delta, mu, 1.0 - mu});
}

ThresholdSpec QspMethod::spec(ThresholdKind kind, double mu) const {
  ThresholdSpec s;
  s.kind = kind;
  s.mu = mu;
  s.delta = effective_delta(mu);
  s.eps = eps;
  s.c = c;
  s.degree = degree;
  s.grid_size = grid_size;
  return s;
}

VarResult bisect_var(const std::function<double(double)>& probability,
                     const std::function<double(double)>& gap, std::int64_t encoding_calls,
                     const VarOptions& options) {
  check_alpha(options.alpha);
  const PrecisionSchedule& schedule = options.schedule;
  schedule.validate();
  const double target = 1.0 - options.alpha;
  FailureBudget budget(schedule.total_failure_budget);
  std::optional<boost::random::mt19937_64> rng;
  if (options.stochastic_seed) rng.emplace(*options.stochastic_seed);

  VarResult out;
  double lo = 0.0;
  double hi = 1.0;
  for (int k = 0; k < schedule.k_max; ++k) {
    const double mu = lo + (hi - lo) / 2;
    double p = probability(mu);
    if (!(p >= -kProbabilitySlack && p <= 1.0 + kProbabilitySlack)) {
      throw DomainError("bisection: probability " + std::to_string(p) + " outside [0, 1]");
    }
    p = std::clamp(p, 0.0, 1.0);
    Refinement ref = refine_until_decided(p, target, schedule, budget, rng ? &*rng : nullptr);
    ++out.rounds;
    out.ae_calls += ref.oracle_calls;
    out.total_oracle_calls += ref.oracle_calls * encoding_calls;
    if (options.keep_trace) {
      RoundRecord rec;
      rec.mu = mu;
      rec.delta = gap(mu);
      rec.probability = p;
      rec.decision = ref.decision;
      rec.intervals = std::move(ref.trace);
      rec.oracle_calls = ref.oracle_calls * encoding_calls;
      out.trace.push_back(std::move(rec));
    }
    if (ref.decision == Decision::below) {
      lo = mu;
    } else if (ref.decision == Decision::above) {
      hi = mu;
    } else {
      out.mu_alpha = mu;
      out.converged = true;
      break;
    }
  }
  if (!out.converged) out.mu_alpha = lo + (hi - lo) / 2;
  out.var_value = options.v0 - out.mu_alpha * out.mu_alpha;
  out.confidence = 1.0 - budget.consumed();
  return out;
}

double qsp_probability(const ScenarioSet& set, const QspMethod& method, double mu) {
  if (method.mode == MeasurementMode::ideal_value) return ideal_marked_step(set, mu);
  const FitResult fit = fit_cached(method, method.spec(ThresholdKind::step, mu));
  return std::clamp(prob_marked_step(set, fit.certified(), method.mode), 0.0, 1.0);
}

VarResult var_qsp(const ScenarioSet& set, const QspMethod& method, const VarOptions& options) {
  const std::int64_t calls = qsp_encoding_oracle_calls(method.degree);
  const bool ideal = method.mode == MeasurementMode::ideal_value;
  return bisect_var([&](double mu) { return qsp_probability(set, method, mu); },
                    [&](double mu) { return ideal ? 0.0 : method.effective_delta(mu); }, calls,
                    options);
}

VarResult var_qae(const ScenarioSet& set, int m, const VarOptions& options) {
  const std::int64_t calls = qae_encoding_oracle_calls(m);
  return bisect_var([&](double mu) { return prob_below_qae(set, m, mu * mu); },
                    [](double) { return 0.0; }, calls, options);
}

CvarResult cvar_qsp(const ScenarioSet& set, const VarResult& var, const QspMethod& method,
                    double v0, bool allow_unconverged) {
  if (!var.converged && !allow_unconverged) {
    throw InvalidArgument("CVaR needs a converged VaR threshold");
  }
  const double mu = var.mu_alpha;
  if (method.mode == MeasurementMode::ideal_value) {
    return cvar_from_probs(ideal_marked_ramp(set, mu), ideal_marked_step(set, mu), mu, v0,
                           MeasurementMode::ideal_value);
  }
  const FitResult ramp = fit_cached(method, method.spec(ThresholdKind::ramp, mu));
  const FitResult step = fit_cached(method, method.spec(ThresholdKind::step, mu));
  const double p_ramp = prob_marked_ramp(set, ramp.certified(), MeasurementMode::function_value);
  const double p_below = prob_marked_step(set, step.certified(), method.mode);
  return cvar_from_probs(p_ramp, p_below, mu, v0, method.mode);
}

double propagate_error(double delta_p, const NormalDist& dist, double alpha) {
  check_alpha(alpha);
  if (!(dist.sd > 0.0)) throw InvalidArgument("sd must be positive");
  const boost::math::normal_distribution<double> n(dist.mean, dist.sd);
  const double q = boost::math::quantile(n, 1.0 - alpha);
  const double density = boost::math::pdf(n, q);
  if (!(density > 0.0) || !std::isfinite(density)) {
    throw SingularQuantile("density vanishes at the requested quantile");
  }
  return delta_p / density;
}

}  // namespace qrisk
