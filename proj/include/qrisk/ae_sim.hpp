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
#include <iosfwd>
#include <optional>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

namespace qrisk {

struct AEInterval {
  double p_low = 0.0;
  double p_high = 0.0;
  double eps_k = 0.0;
  double alpha_k = 0.0;
  std::int64_t oracle_calls = 0;
  std::int64_t circuit_depth_factor = 0;  // largest Grover power, ceil(pi / (4 eps_k))
};

/// Worst-case iterative-AE oracle calls
/// ceil((1.4 / eps) ln((2 / alpha) log2(pi / (4 eps)))).
std::int64_t iqae_bound(double eps_a, double alpha_k);

/// Deterministic interval [p - eps, p + eps] clamped to [0, 1]. With an engine
/// the centre moves by a N(0, (eps/2)^2) draw truncated to +-eps.
AEInterval ae_interval(double true_p, double eps_k, double alpha_k,
                       boost::random::mt19937_64* rng = nullptr);

enum class AlphaAllocation { uniform, geometric };

struct PrecisionSchedule {
  double eps_start = 0.1;
  double eps_final = 1e-3;
  double shrink = 0.5;
  AlphaAllocation allocation = AlphaAllocation::uniform;
  double total_failure_budget = 0.05;
  int k_max = 30;

  void validate() const;

  /// eps_start, eps_start * shrink, ... with the last entry pinned to eps_final.
  std::vector<double> eps_steps() const;

  /// Failure probability handed to each step of one refinement.
  std::vector<double> alpha_steps() const;
};

/// Tracks sum alpha_k against the total budget.
class FailureBudget {
 public:
  explicit FailureBudget(double total);
  void consume(double alpha);
  double consumed() const noexcept { return consumed_; }
  double total() const noexcept { return total_; }

 private:
  double total_;
  double consumed_ = 0.0;
};

enum class Decision { below, above, converged };

const char* to_string(Decision d) noexcept;

struct Refinement {
  Decision decision = Decision::converged;
  std::vector<AEInterval> trace;
  std::int64_t oracle_calls = 0;
};

/// Shrinks eps_k until the target leaves [p_low, p_high] or eps_final is
/// reached. Throws BudgetExhausted when the budget cannot fund a step.
Refinement refine_until_decided(double true_p, double target, const PrecisionSchedule& schedule,
                                FailureBudget& budget,
                                boost::random::mt19937_64* rng = nullptr);

/// Convenience overload with a fresh budget of schedule.total_failure_budget.
Refinement refine_until_decided(double true_p, double target, const PrecisionSchedule& schedule);

void write_trace_csv(std::ostream& out, const std::vector<AEInterval>& trace);

}  // namespace qrisk
