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
#include <numbers>
#include <random>
#include <vector>

#include "qrisk/chebyshev.hpp"
#include "qrisk/error.hpp"

using namespace qrisk;

namespace {

// T_n(x) = cos(n arccos x), summed term by term.
double trig_eval(const ChebSeries& s, double x) {
  const double theta = std::acos(x);
  double sum = 0.0;
  for (std::size_t k = 0; k < s.coeffs().size(); ++k) {
    const int n = s.parity() == Parity::even ? 2 * static_cast<int>(k) : 2 * static_cast<int>(k) + 1;
    sum += s.coeffs()[k] * std::cos(n * theta);
  }
  return sum;
}

}  // namespace

TEST_CASE("cheb_grid endpoints and interior nodes") {
  CHECK(cheb_grid(2) == std::vector<double>{-1.0, 1.0});
  const auto g3 = cheb_grid(3);
  CHECK(g3[0] == -1.0);
  CHECK(g3[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g3[2] == 1.0);
  const auto g5 = cheb_grid(5);
  const double r = std::sqrt(2.0) / 2.0;
  const std::vector<double> want{-1.0, -r, 0.0, r, 1.0};
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(g5[j] - want[j]) < 1e-15);
  CHECK_THROWS_AS(cheb_grid(1), InvalidArgument);
}

TEST_CASE("grid is ascending and symmetric") {
  const auto g = cheb_grid(1001);
  for (std::size_t j = 1; j < g.size(); ++j) CHECK(g[j] > g[j - 1]);
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(g[j] + g[g.size() - 1 - j]) < 1e-15);
}

TEST_CASE("eval_series small cases") {
  CHECK(eval_series(ChebSeries::even({1.0}), 0.37) == 1.0);
  CHECK(eval_series(ChebSeries::even({0.0, 1.0}), 0.0) == doctest::Approx(-1.0));
  const ChebSeries s = ChebSeries::even({0.5, 0.25, -0.125});
  CHECK(eval_series(s, 0.3) == doctest::Approx(trig_eval(s, 0.3)).epsilon(1e-14));
}

TEST_CASE("eval_series agrees with the trigonometric definition") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), xs(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Parity parity = trial % 2 == 0 ? Parity::even : Parity::odd;
    const int degree = parity == Parity::even ? 2 * (trial % 40) : 2 * (trial % 40) + 1;
    std::vector<double> c(coefficient_count(parity, degree));
    for (auto& v : c) v = coef(rng);
    const ChebSeries s(parity, degree, c);
    for (int k = 0; k < 10; ++k) {
      const double x = xs(rng);
      CHECK(std::abs(eval_series(s, x) - trig_eval(s, x)) < 1e-12 * (1.0 + degree));
    }
  }
}

TEST_CASE("parity symmetry") {
  const ChebSeries even = ChebSeries::even({0.1, -0.4, 0.3, 0.2});
  const ChebSeries odd(Parity::odd, 5, {0.2, 0.5, -0.1});
  for (double x : {0.05, 0.33, 0.71, 0.99}) {
    CHECK(eval_series(even, -x) == eval_series(even, x));
    CHECK(eval_series(odd, -x) == doctest::Approx(-eval_series(odd, x)).epsilon(1e-14));
  }
}

TEST_CASE("domain handling") {
  const ChebSeries s = ChebSeries::even({0.0, 1.0});
  CHECK(eval_series(s, 1.0 + 1e-13) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_series(s, 1.01), DomainError);
  CHECK_THROWS_AS(eval_series(s, std::nan("")), DomainError);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(ChebSeries(Parity::even, 3, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(ChebSeries(Parity::even, 4, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(ChebSeries(Parity::odd, 2, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(ChebSeries(Parity::even, -2, {}), InvalidArgument);
  CHECK(coefficient_count(Parity::even, 600) == 301);
  CHECK(coefficient_count(Parity::odd, 7) == 4);
  CHECK(parse_parity(to_string(Parity::odd)) == Parity::odd);
  CHECK_THROWS_AS(parse_parity("sideways"), InvalidArgument);
}

TEST_CASE("batch evaluation matches the scalar recurrence") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(151);
  for (auto& v : c) v = u(rng) / 10.0;
  for (Parity parity : {Parity::even, Parity::odd}) {
    const ChebSeries s(parity, parity == Parity::even ? 300 : 301, c);
    std::vector<double> x(1000), out(1000);
    for (auto& v : x) v = u(rng);
    eval_series_batch(s, x, out);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(out[i] - eval_series(s, x[i])) <= 1e-14 * (1.0 + std::abs(out[i])));
    }
  }
  std::vector<double> bad{0.5, 2.0}, out(2);
  CHECK_THROWS_AS(eval_series_batch(ChebSeries::even({1.0}), bad, out), DomainError);
}

TEST_CASE("basis matrix structure") {
  const std::vector<double> pts{0.0, 0.25, 1.0};
  const auto b = basis_matrix(pts, 8, Parity::even);
  REQUIRE(b.cols() == 5);
  for (int j = 0; j < 3; ++j) CHECK(b(j, 0) == 1.0);
  for (int k = 0; k < 5; ++k) {
    CHECK(b(2, k) == doctest::Approx(1.0));
    CHECK(b(0, k) == doctest::Approx(k % 2 == 0 ? 1.0 : -1.0));
    CHECK(b(1, k) == doctest::Approx(std::cos(2 * k * std::acos(0.25))).epsilon(1e-13));
  }
  const auto o = basis_matrix(pts, 5, Parity::odd);
  CHECK(o(1, 2) == doctest::Approx(std::cos(5 * std::acos(0.25))).epsilon(1e-13));
}

TEST_CASE("boundedness certificate") {
  const ChebSeries ok = ChebSeries::even({0.0, 1.0});
  const BoundedSeries b = BoundedSeries::certify(ok, 2001);
  CHECK(b.certified_max_abs() == doctest::Approx(1.0));
  CHECK(b(0.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(BoundedSeries::certify(ChebSeries::even({0.6, 0.6}), 2001), InvalidArgument);
  CHECK(max_abs_on_grid(ChebSeries::even({0.25, 0.5}), 101) == doctest::Approx(0.75));
}
