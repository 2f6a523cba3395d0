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

// Dense solver for epigraph-form minimax linear programs
//
//   minimize t  over (a, t)
//   subject to  sign_r * (Phi a)[p_r] - [has_t_r] * t <= rhs_r   for every row r
//
// where Phi is a dense point-by-basis matrix whose rows satisfy the Haar
// condition (distinct Chebyshev points). The solver runs the simplex method on
// the dual (an exchange method: the basis is a reference set of n + 2 active
// rows), warm-started by a multiple-exchange Remez pass. Both phases keep the
// reference dual feasible, so the final basis is an exact LP optimum up to the
// pricing tolerance.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace qrisk::lp {

struct Row {
  std::int32_t point;
  std::int8_t sign;  // +1: upper bound on f, -1: lower bound on f
  bool has_t;
  double rhs;
};

struct Problem {
  Eigen::MatrixXd basis;  // points (ascending) x coefficients
  std::vector<Row> rows;
};

struct Options {
  int max_pivots = 50000;
  int max_remez_iterations = 80;
  double tolerance = 1e-11;
  int refactor_every = 48;
};

struct Solution {
  Eigen::VectorXd coeffs;
  double t = 0.0;
  int remez_iterations = 0;
  int pivots = 0;
  std::vector<int> active_rows;  // basis at the optimum, ordered by point
  Eigen::VectorXd duals;         // multipliers of active_rows, all >= 0
};

/// Throws SolverFailure (with a feasible incumbent) if max_pivots is reached.
Solution solve_minimax(const Problem& problem, const Options& options = {});

/// Largest constraint violation of (coeffs, t). Non-positive means feasible.
double max_violation(const Problem& problem, const Eigen::VectorXd& coeffs, double t);

}  // namespace qrisk::lp
