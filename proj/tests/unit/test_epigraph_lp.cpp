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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qrisk/chebyshev.hpp"
#include "qrisk/epigraph_lp.hpp"
#include "qrisk/error.hpp"

using namespace qrisk;

namespace {

// Two-sided minimax rows |Phi a - f| <= t on every point.
lp::Problem minimax_problem(const std::vector<double>& x, const std::vector<double>& f, int degree) {
  lp::Problem p;
  p.basis = basis_matrix(x, degree, Parity::even);
  for (std::size_t j = 0; j < x.size(); ++j) {
    p.rows.push_back({static_cast<std::int32_t>(j), +1, true, f[j]});
    p.rows.push_back({static_cast<std::int32_t>(j), -1, true, -f[j]});
  }
  return p;
}

std::vector<double> half_grid(std::size_t count) {
  std::vector<double> x;
  for (double v : cheb_grid(count)) {
    if (v >= 0.0) x.push_back(v);
  }
  return x;
}

}  // namespace

TEST_CASE("best constant is the midrange") {
  const std::vector<double> x{0.0, 0.3, 0.6, 0.9};
  const std::vector<double> f{0.2, -0.7, 1.3, 0.4};
  const auto sol = lp::solve_minimax(minimax_problem(x, f, 0));
  CHECK(sol.t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.coeffs(0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("equioscillating target has zero best approximation") {
  // T_{2n+2} equioscillates n+2 times on [0, 1], so no even polynomial of
  // degree 2n improves on the zero polynomial.
  for (int n : {2, 5, 20}) {
    // The grid contains every extremum of the target.
    const auto x = half_grid(static_cast<std::size_t>(100 * (2 * n + 2) + 1));
    std::vector<double> f;
    for (double v : x) f.push_back(std::cos((2 * n + 2) * std::acos(v)));
    const auto sol = lp::solve_minimax(minimax_problem(x, f, 2 * n));
    CHECK(sol.t == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.coeffs.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("optimum is feasible with non-negative multipliers") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto x = half_grid(801);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> f;
    const double a = u(rng), b = u(rng);
    for (double v : x) f.push_back(std::abs(v - 0.5) + a * v + b * std::sin(7 * v));
    const auto problem = minimax_problem(x, f, 20);
    const auto sol = lp::solve_minimax(problem);
    CHECK(lp::max_violation(problem, sol.coeffs, sol.t) <= 1e-10);
    CHECK(sol.duals.minCoeff() >= -1e-12);
    CHECK(sol.duals.sum() == doctest::Approx(1.0).epsilon(1e-9));
    // Weak duality: perturbing the coefficients never beats the optimum.
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd c = sol.coeffs;
      c(k % c.size()) += 1e-3 * u(rng);
      Eigen::VectorXd r = problem.basis * c;
      double worst = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) worst = std::max(worst, std::abs(r(static_cast<Eigen::Index>(j)) - f[j]));
      CHECK(worst >= sol.t - 1e-12);
    }
  }
}

TEST_CASE("rows without t act as hard bounds") {
  const std::vector<double> x{0.0, 0.5, 1.0};
  lp::Problem p;
  p.basis = basis_matrix(x, 0, Parity::even);
  // Fit the constant 2 but cap it at 1.5.
  for (std::int32_t j = 0; j < 3; ++j) {
    p.rows.push_back({j, +1, true, 2.0});
    p.rows.push_back({j, -1, true, -2.0});
    p.rows.push_back({j, +1, false, 1.5});
  }
  const auto sol = lp::solve_minimax(p);
  CHECK(sol.coeffs(0) == doctest::Approx(1.5));
  CHECK(sol.t == doctest::Approx(0.5));
}

TEST_CASE("pivot cap surfaces a feasible incumbent") {
  const auto x = half_grid(2001);
  std::vector<double> f;
  for (double v : x) f.push_back(v < 0.5 ? 1.0 : 0.0);
  const auto problem = minimax_problem(x, f, 60);
  lp::Options opt;
  opt.max_pivots = 1;
  opt.max_remez_iterations = 0;
  try {
    (void)lp::solve_minimax(problem, opt);
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    Eigen::Map<const Eigen::VectorXd> c(e.incumbent().data(), static_cast<Eigen::Index>(e.incumbent().size()));
    CHECK(lp::max_violation(problem, c, e.incumbent_objective()) <= 1e-9);
  }
}

TEST_CASE("malformed problems are rejected") {
  lp::Problem p;
  p.basis = basis_matrix(std::vector<double>{0.0, 1.0}, 2, Parity::even);
  p.rows.push_back({5, +1, true, 0.0});
  CHECK_THROWS_AS(lp::solve_minimax(p), InvalidArgument);
}
