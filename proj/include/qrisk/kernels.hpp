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

// Hot loops of the simulators, in two flavours. `serial` is the plain
// reference implementation. `omp` splits the scenario range into fixed-size
// chunks, reduces each chunk independently and adds the partial sums in chunk
// order, so its result does not depend on the thread count.

#include <cstddef>
#include <span>

#include "qrisk/chebyshev.hpp"
#include "qrisk/measurement.hpp"

namespace qrisk::kernels {

inline constexpr std::size_t kChunk = 256;

namespace serial {

/// sum_i w_i * h(P(x_i)) with h(v) = v*v (amplitude_squared) or v (otherwise).
double weighted_series_sum(const ChebSeries& series, std::span<const double> x,
                           std::span<const double> w, MeasurementMode mode);

/// Probability that the folded canonical QAE outcome on 2^m points lands at or
/// below grid index `last` (inclusive), averaged over scenario values.
double qae_mass_below(std::span<const double> values, std::span<const double> probs, int m,
                      long last);

}  // namespace serial

namespace omp {

double weighted_series_sum(const ChebSeries& series, std::span<const double> x,
                           std::span<const double> w, MeasurementMode mode);

double qae_mass_below(std::span<const double> values, std::span<const double> probs, int m,
                      long last);

}  // namespace omp

}  // namespace qrisk::kernels
