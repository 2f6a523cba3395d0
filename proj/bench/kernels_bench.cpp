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


#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <vector>

#include "qrisk/chebyshev.hpp"
#include "qrisk/kernels.hpp"

namespace {

struct Inputs {
  std::vector<double> x;
  std::vector<double> w;
};

Inputs make_inputs(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Inputs in;
  in.x.resize(n);
  in.w.assign(n, 1.0 / static_cast<double>(n));
  for (double& v : in.x) v = u(rng);
  return in;
}

qrisk::ChebSeries make_series(int degree) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> c(qrisk::coefficient_count(qrisk::Parity::even, degree));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = g(rng) / static_cast<double>(k + 1);
  return qrisk::ChebSeries::even(std::move(c));
}

template <bool Parallel>
void BM_WeightedSeriesSum(benchmark::State& state) {
  const Inputs in = make_inputs(static_cast<std::size_t>(state.range(0)));
  const qrisk::ChebSeries series = make_series(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    double s = Parallel ? qrisk::kernels::omp::weighted_series_sum(
                              series, in.x, in.w, qrisk::MeasurementMode::function_value)
                        : qrisk::kernels::serial::weighted_series_sum(
                              series, in.x, in.w, qrisk::MeasurementMode::function_value);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = Parallel ? omp_get_max_threads() : 1;
}

template <bool Parallel>
void BM_QaeMassBelow(benchmark::State& state) {
  const Inputs in = make_inputs(static_cast<std::size_t>(state.range(0)));
  const int m = static_cast<int>(state.range(1));
  const long last = (1L << m) / 4;
  for (auto _ : state) {
    double s = Parallel ? qrisk::kernels::omp::qae_mass_below(in.x, in.w, m, last)
                        : qrisk::kernels::serial::qae_mass_below(in.x, in.w, m, last);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = Parallel ? omp_get_max_threads() : 1;
}

void series_args(benchmark::internal::Benchmark* b) {
  for (long n : {5000L, 50000L}) {
    for (long d : {200L, 1600L}) b->Args({n, d});
  }
}

void qae_args(benchmark::internal::Benchmark* b) {
  for (long n : {5000L, 50000L}) {
    for (long m : {7L, 12L}) b->Args({n, m});
  }
}

}  // namespace

BENCHMARK_TEMPLATE(BM_WeightedSeriesSum, false)->Name("weighted_series_sum/serial")->Apply(series_args);
BENCHMARK_TEMPLATE(BM_WeightedSeriesSum, true)->Name("weighted_series_sum/omp")->Apply(series_args);
BENCHMARK_TEMPLATE(BM_QaeMassBelow, false)->Name("qae_mass_below/serial")->Apply(qae_args);
BENCHMARK_TEMPLATE(BM_QaeMassBelow, true)->Name("qae_mass_below/omp")->Apply(qae_args);

BENCHMARK_MAIN();
