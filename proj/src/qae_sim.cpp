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

#include "qrisk/qae_sim.hpp"

#include <cmath>
#include <numbers>

#include "qae_detail.hpp"
#include "qrisk/error.hpp"
#include "qrisk/kernels.hpp"

namespace qrisk {

namespace {

constexpr double kTieSlack = 1e-9;

}  // namespace

QaeGrid::QaeGrid(int qubits) : m(qubits) {
  if (m < 1 || m > 30) throw InvalidArgument("QAE qubit count must be in [1, 30]");
}

long QaeGrid::comparator_index(double mu) const {
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("comparator threshold outside [0, 1]");
  const double theta = std::asin(std::sqrt(mu)) / std::numbers::pi;
  return static_cast<long>(std::floor(static_cast<double>(size()) * theta + kTieSlack));
}

std::vector<double> qae_pmf(double value, int m) {
  const QaeGrid grid(m);
  if (!(value >= 0.0 && value <= 1.0)) throw DomainError("QAE value outside [0, 1]");
  const detail::QaeTable table(m);
  std::vector<double> pmf(static_cast<std::size_t>(grid.size()), 0.0);
  detail::for_each_folded(table, value, grid.size(),
                          [&](long j, double q) { pmf[static_cast<std::size_t>(j)] = q; });
  return pmf;
}

double prob_below_qae(const ScenarioSet& set, int m, double mu) {
  const QaeGrid grid(m);
  const long last = grid.comparator_index(mu);
  if (last >= grid.size() / 2) return 1.0;
  return kernels::omp::qae_mass_below(set.values(), set.probs(), m, last);
}

std::int64_t qae_encoding_oracle_calls(int m) {
  const QaeGrid grid(m);
  return static_cast<std::int64_t>(grid.size()) + 1;
}

}  // namespace qrisk
