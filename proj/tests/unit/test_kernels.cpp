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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <omp.h>

#include "qrisk/chebyshev.hpp"
#include "qrisk/error.hpp"
#include "qrisk/kernels.hpp"
#include "qrisk/parallel.hpp"

using namespace qrisk;

namespace {

struct Data {
  std::vector<double> x, w, v;
};

Data make_data(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.v.push_back(u(rng));
    d.x.push_back(std::sqrt(d.v.back()));
    d.w.push_back(1.0 / static_cast<double>(n));
  }
  return d;
}

ChebSeries random_series(int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(coefficient_count(Parity::even, degree));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = u(rng) / static_cast<double>(k + 1);
  return ChebSeries(Parity::even, degree, c);
}

}  // namespace

TEST_CASE("parallel series sum matches the serial reference") {
  for (std::size_t n : {1ul, 255ul, 256ul, 257ul, 5000ul}) {
    const Data d = make_data(n, n);
    const ChebSeries s = random_series(200, 3);
    for (MeasurementMode mode : {MeasurementMode::amplitude_squared, MeasurementMode::function_value}) {
      const double a = kernels::serial::weighted_series_sum(s, d.x, d.w, mode);
      const double b = kernels::omp::weighted_series_sum(s, d.x, d.w, mode);
      CHECK(b == doctest::Approx(a).epsilon(1e-13));
    }
  }
}

TEST_CASE("parallel QAE mass matches the serial reference") {
  const Data d = make_data(3000, 9);
  for (int m : {3, 8, 11}) {
    for (long last : {0L, 5L, (1L << m) / 4}) {
      const double a = kernels::serial::qae_mass_below(d.v, d.w, m, last);
      const double b = kernels::omp::qae_mass_below(d.v, d.w, m, last);
      CHECK(b == doctest::Approx(a).epsilon(1e-13));
    }
  }
}

TEST_CASE("results do not depend on the thread count") {
  const Data d = make_data(10007, 1);
  const ChebSeries s = random_series(300, 4);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double a1 = kernels::omp::weighted_series_sum(s, d.x, d.w, MeasurementMode::function_value);
  const double q1 = kernels::omp::qae_mass_below(d.v, d.w, 9, 100);
  omp_set_num_threads(4);
  const double a4 = kernels::omp::weighted_series_sum(s, d.x, d.w, MeasurementMode::function_value);
  const double q4 = kernels::omp::qae_mass_below(d.v, d.w, 9, 100);
  omp_set_num_threads(saved);
  CHECK(a1 == a4);
  CHECK(q1 == q4);
}

TEST_CASE("domain errors surface from parallel regions") {
  Data d = make_data(1000, 2);
  d.x[700] = 1.5;
  const ChebSeries s = random_series(20, 1);
  CHECK_THROWS_AS(kernels::omp::weighted_series_sum(s, d.x, d.w, MeasurementMode::function_value), DomainError);
  CHECK_THROWS_AS(kernels::serial::weighted_series_sum(s, d.x, d.w, MeasurementMode::function_value), DomainError);
  std::vector<double> short_w(10, 0.1);
  CHECK_THROWS_AS(kernels::omp::weighted_series_sum(s, d.x, short_w, MeasurementMode::function_value), InvalidArgument);
}

TEST_CASE("parallel_for rethrows on the caller") {
  std::vector<int> hit(100, 0);
  parallel_for(100, [&](long i) { hit[static_cast<std::size_t>(i)] = 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(100, [](long i) {
                    if (i == 37) throw InvalidArgument("boom");
                  }),
                  InvalidArgument);
}
