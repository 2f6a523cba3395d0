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
#include <vector>

#include "qrisk/scenario.hpp"

namespace qrisk {

/// The m-qubit phase register of canonical amplitude estimation: M = 2^m
/// outcomes j with estimates j/M of theta/pi.
struct QaeGrid {
  int m;

  explicit QaeGrid(int qubits);
  long size() const noexcept { return 1L << m; }

  /// Largest j with j/M <= asin(sqrt(mu))/pi. Ties count as below.
  long comparator_index(double mu) const;
};

/// Folded outcome law over j = 0..M-1 for the amplitude sqrt(value). Mass
/// sits on j <= M/2; entries above M/2 are zero.
std::vector<double> qae_pmf(double value, int m);

/// Probability that the comparator flag reads "below" at threshold mu
/// (value space: compares theta against asin(sqrt(mu))).
double prob_below_qae(const ScenarioSet& set, int m, double mu);

/// 2^m + 1 evaluations of the pricing operator per encoding circuit.
std::int64_t qae_encoding_oracle_calls(int m);

}  // namespace qrisk
