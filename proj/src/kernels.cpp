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

#include "qrisk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qae_detail.hpp"
#include "qrisk/error.hpp"

namespace qrisk::kernels {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidArgument("kernel inputs differ in length");
}

double transformed(const ChebSeries& series, double x, MeasurementMode mode) {
  const double v = eval_series(series, x);
  return mode == MeasurementMode::amplitude_squared ? v * v : v;
}

double folded_mass(const detail::QaeTable& table, double value, long last) {
  double mass = 0.0;
  detail::for_each_folded(table, value, last, [&](long, double q) { mass += q; });
  return mass;
}

void check_qae(int m) {
  if (m < 1 || m > 30) throw InvalidArgument("QAE qubit count must be in [1, 30]");
}

}  // namespace

namespace serial {

double weighted_series_sum(const ChebSeries& series, std::span<const double> x,
                           std::span<const double> w, MeasurementMode mode) {
  check_lengths(x.size(), w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += w[i] * transformed(series, x[i], mode);
  return total;
}

double qae_mass_below(std::span<const double> values, std::span<const double> probs, int m,
                      long last) {
  check_lengths(values.size(), probs.size());
  check_qae(m);
  if (last < 0) return 0.0;
  const detail::QaeTable table(m);
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) throw DomainError("QAE value outside [0, 1]");
    total += probs[i] * folded_mass(table, values[i], last);
  }
  return total;
}

}  // namespace serial

namespace omp {

namespace {

template <class Term>
double chunked_sum(std::size_t n, Term&& term) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks, 0.0);
  const auto count = static_cast<long>(chunks);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < count; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(n, begin + kChunk);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace

double weighted_series_sum(const ChebSeries& series, std::span<const double> x,
                           std::span<const double> w, MeasurementMode mode) {
  check_lengths(x.size(), w.size());
  for (double v : x) {
    if (!(std::abs(v) <= 1.0 + 1e-12)) throw DomainError("series argument outside [-1, 1]");
  }
  std::vector<double> p(x.size());
  const auto chunks = static_cast<long>((x.size() + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t n = std::min(kChunk, x.size() - begin);
    eval_series_batch(series, x.subspan(begin, n), std::span<double>(p).subspan(begin, n));
  }
  const bool square = mode == MeasurementMode::amplitude_squared;
  return chunked_sum(x.size(), [&](std::size_t i) { return w[i] * (square ? p[i] * p[i] : p[i]); });
}

double qae_mass_below(std::span<const double> values, std::span<const double> probs, int m,
                      long last) {
  check_lengths(values.size(), probs.size());
  check_qae(m);
  if (last < 0) return 0.0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("QAE value outside [0, 1]");
  }
  const detail::QaeTable table(m);
  return chunked_sum(values.size(),
                     [&](std::size_t i) { return probs[i] * folded_mass(table, values[i], last); });
}

}  // namespace omp

}  // namespace qrisk::kernels
