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

#include "qrisk/ae_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "qrisk/error.hpp"

namespace qrisk {

namespace {

constexpr double kBudgetSlack = 1e-12;

void check_eps_alpha(double eps, double alpha) {
  if (!(eps > 0.0)) throw InvalidArgument("AE precision must be positive");
  if (!(eps < std::numbers::pi / 4)) throw InvalidArgument("AE precision must be below pi/4");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("AE failure probability must lie in (0, 1)");
}

}  // namespace

std::int64_t iqae_bound(double eps_a, double alpha_k) {
  check_eps_alpha(eps_a, alpha_k);
  const long double eps = eps_a;
  const long double alpha = alpha_k;
  const long double inner = std::log2(std::numbers::pi_v<long double> / (4.0L * eps));
  const long double arg = (2.0L / alpha) * inner;
  if (!(arg > 1.0L)) throw InvalidArgument("IQAE bound undefined: outer log argument <= 1");
  const long double n = (1.4L / eps) * std::log(arg);
  return static_cast<std::int64_t>(std::ceil(n));
}

AEInterval ae_interval(double true_p, double eps_k, double alpha_k,
                       boost::random::mt19937_64* rng) {
  if (!(true_p >= 0.0 && true_p <= 1.0)) throw InvalidArgument("probability outside [0, 1]");
  check_eps_alpha(eps_k, alpha_k);
  double centre = true_p;
  if (rng != nullptr) {
    boost::random::normal_distribution<double> draw(0.0, eps_k / 2);
    centre += std::clamp(draw(*rng), -eps_k, eps_k);
  }
  AEInterval r;
  r.p_low = std::clamp(centre - eps_k, 0.0, 1.0);
  r.p_high = std::clamp(centre + eps_k, 0.0, 1.0);
  r.eps_k = eps_k;
  r.alpha_k = alpha_k;
  r.oracle_calls = iqae_bound(eps_k, alpha_k);
  r.circuit_depth_factor =
      static_cast<std::int64_t>(std::ceil(std::numbers::pi / (4.0 * eps_k)));
  return r;
}

void PrecisionSchedule::validate() const {
  if (!(eps_final > 0.0)) throw InvalidArgument("eps_final must be positive");
  if (!(eps_start < std::numbers::pi / 4)) throw InvalidArgument("eps_start must be below pi/4");
  if (!(eps_final <= eps_start)) throw InvalidArgument("eps_final must not exceed eps_start");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidArgument("shrink must lie in (0, 1)");
  if (!(total_failure_budget > 0.0 && total_failure_budget < 1.0)) {
    throw InvalidArgument("failure budget must lie in (0, 1)");
  }
  if (k_max < 1) throw InvalidArgument("k_max must be at least 1");
}

std::vector<double> PrecisionSchedule::eps_steps() const {
  validate();
  std::vector<double> steps;
  double eps = eps_start;
  while (eps > eps_final) {
    steps.push_back(eps);
    eps *= shrink;
  }
  steps.push_back(eps_final);
  return steps;
}

std::vector<double> PrecisionSchedule::alpha_steps() const {
  const std::size_t s = eps_steps().size();
  const double per_round = total_failure_budget / k_max;
  std::vector<double> alpha(s);
  if (allocation == AlphaAllocation::uniform) {
    std::fill(alpha.begin(), alpha.end(), per_round / static_cast<double>(s));
  } else {
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < s; ++i) weight_sum += std::ldexp(1.0, static_cast<int>(i));
    for (std::size_t i = 0; i < s; ++i) {
      alpha[i] = per_round * std::ldexp(1.0, static_cast<int>(i)) / weight_sum;
    }
  }
  return alpha;
}

FailureBudget::FailureBudget(double total) : total_(total) {
  if (!(total > 0.0 && total < 1.0)) throw InvalidArgument("failure budget must lie in (0, 1)");
}

void FailureBudget::consume(double alpha) {
  if (consumed_ + alpha > total_ + kBudgetSlack) {
    throw BudgetExhausted("failure budget of " + std::to_string(total_) + " exhausted");
  }
  consumed_ += alpha;
}

const char* to_string(Decision d) noexcept {
  switch (d) {
    case Decision::below: return "below";
    case Decision::above: return "above";
    case Decision::converged: return "converged";
  }
  return "converged";
}

Refinement refine_until_decided(double true_p, double target, const PrecisionSchedule& schedule,
                                FailureBudget& budget, boost::random::mt19937_64* rng) {
  const std::vector<double> eps = schedule.eps_steps();
  const std::vector<double> alpha = schedule.alpha_steps();
  Refinement out;
  for (std::size_t s = 0; s < eps.size(); ++s) {
    budget.consume(alpha[s]);
    const AEInterval iv = ae_interval(true_p, eps[s], alpha[s], rng);
    out.trace.push_back(iv);
    out.oracle_calls += iv.oracle_calls;
    if (iv.p_high < target) {
      out.decision = Decision::below;
      return out;
    }
    if (iv.p_low > target) {
      out.decision = Decision::above;
      return out;
    }
  }
  out.decision = Decision::converged;
  return out;
}

Refinement refine_until_decided(double true_p, double target, const PrecisionSchedule& schedule) {
  FailureBudget budget(schedule.total_failure_budget);
  return refine_until_decided(true_p, target, schedule, budget);
}

void write_trace_csv(std::ostream& out, const std::vector<AEInterval>& trace) {
  out << "step,eps_k,alpha_k,p_low,p_high,oracle_calls\n";
  char buf[192];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const AEInterval& iv = trace[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%lld\n", i, iv.eps_k, iv.alpha_k,
                  iv.p_low, iv.p_high, static_cast<long long>(iv.oracle_calls));
    out << buf;
  }
}

}  // namespace qrisk
