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

#include <stdexcept>
#include <string>
#include <vector>

namespace qrisk {

/// Precondition violated by a caller-supplied argument.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Broken internal invariant (e.g. an LP that should be feasible is not).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// LP solver hit its iteration cap. Carries the best incumbent it had.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, std::vector<double> incumbent,
                double incumbent_objective)
      : std::runtime_error(what),
        incumbent_(std::move(incumbent)),
        incumbent_objective_(incumbent_objective) {}

  const std::vector<double>& incumbent() const noexcept { return incumbent_; }
  double incumbent_objective() const noexcept { return incumbent_objective_; }

 private:
  std::vector<double> incumbent_;
  double incumbent_objective_;
};

/// The minimax error of an LP lies below what double precision resolves.
class PrecisionLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The confidence budget of a VaR run ran out before the schedule finished.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conditional expectation requested on an event with zero probability.
class UndefinedConditional : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inverse-CDF derivative requested where the density vanishes.
class SingularQuantile : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No cell of a parameter search reached the target error.
class NoFeasibleParameters : public std::runtime_error {
 public:
  NoFeasibleParameters(const std::string& what, double best_error)
      : std::runtime_error(what), best_error_(best_error) {}
  double best_error() const noexcept { return best_error_; }

 private:
  double best_error_;
};

}  // namespace qrisk
