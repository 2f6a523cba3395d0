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
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qrisk/ae_sim.hpp"
#include "qrisk/error.hpp"

using namespace qrisk;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

Big iqae_oracle(double eps, double alpha) {
  const Big pi = boost::math::constants::pi<Big>();
  const Big inner = log(pi / (Big(4) * Big(eps))) / log(Big(2));
  return ceil(Big("1.4") / Big(eps) * log(Big(2) / Big(alpha) * inner));
}

}  // namespace

TEST_CASE("deterministic intervals") {
  const AEInterval a = ae_interval(0.5, 0.1, 0.01);
  CHECK(a.p_low == doctest::Approx(0.4));
  CHECK(a.p_high == doctest::Approx(0.6));
  const AEInterval b = ae_interval(0.005, 0.01, 0.01);
  CHECK(b.p_low == 0.0);
  CHECK(b.p_high == doctest::Approx(0.015));
  CHECK(b.circuit_depth_factor == 79);
  CHECK_THROWS_AS(ae_interval(1.5, 0.1, 0.01), InvalidArgument);
  CHECK_THROWS_AS(ae_interval(0.5, 0.8, 0.01), InvalidArgument);
}

TEST_CASE("stochastic intervals stay within one precision of the truth") {
  boost::random::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const AEInterval iv = ae_interval(0.4, 0.02, 0.01, &rng);
    CHECK(iv.p_low <= 0.4 + 1e-15);
    CHECK(iv.p_high >= 0.4 - 1e-15);
    CHECK(iv.p_high - iv.p_low == doctest::Approx(0.04));
  }
}

TEST_CASE("iqae bound against extended precision") {
  CHECK(Big(iqae_bound(1.2e-3, 0.05)) == iqae_oracle(1.2e-3, 0.05));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> le(-5.0, -0.5), la(-8.0, -0.1);
  for (int i = 0; i < 200; ++i) {
    const double eps = std::pow(10.0, le(rng));
    const double alpha = std::pow(10.0, la(rng));
    CHECK(Big(iqae_bound(eps, alpha)) == iqae_oracle(eps, alpha));
  }
}

TEST_CASE("iqae bound monotonicity and domain") {
  std::int64_t previous = iqae_bound(1e-3, 1e-4);
  for (double alpha : {1e-3, 1e-2, 0.1, 0.5}) {
    const std::int64_t n = iqae_bound(1e-3, alpha);
    CHECK(n < previous);
    previous = n;
  }
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double ratio = static_cast<double>(iqae_bound(eps / 2, 0.01)) / static_cast<double>(iqae_bound(eps, 0.01));
    CHECK(ratio > 2.0);
    CHECK(ratio < 2.3);
  }
  CHECK_THROWS_AS(iqae_bound(std::numbers::pi / 4, 0.05), InvalidArgument);
  CHECK_THROWS_AS(iqae_bound(0.7, 0.9), InvalidArgument);
  CHECK_THROWS_AS(iqae_bound(0.0, 0.05), InvalidArgument);
}

TEST_CASE("schedule steps and allocations") {
  PrecisionSchedule s;
  s.eps_final = 1e-3;
  const auto eps = s.eps_steps();
  REQUIRE(eps.size() == 8);
  CHECK(eps.front() == 0.1);
  CHECK(eps[6] == doctest::Approx(0.1 / 64));
  CHECK(eps.back() == 1e-3);
  double total = 0.0;
  for (double a : s.alpha_steps()) total += a;
  CHECK(total == doctest::Approx(0.05 / 30).epsilon(1e-12));
  s.allocation = AlphaAllocation::geometric;
  const auto geo = s.alpha_steps();
  CHECK(geo[1] == doctest::Approx(2 * geo[0]));
  total = 0.0;
  for (double a : geo) total += a;
  CHECK(total == doctest::Approx(0.05 / 30).epsilon(1e-12));
  s.eps_final = 0.2;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("refinement decisions") {
  PrecisionSchedule s;
  s.eps_final = 1e-3;
  const Refinement far = refine_until_decided(0.5, 0.2, s);
  CHECK(far.decision == Decision::above);
  CHECK(far.trace.size() == 1);
  CHECK(far.trace[0].eps_k == 0.1);

  const Refinement tie = refine_until_decided(0.3, 0.3, s);
  CHECK(tie.decision == Decision::converged);
  CHECK(tie.trace.back().eps_k == 1e-3);
  for (const auto& iv : tie.trace) CHECK((iv.p_low <= 0.3 && iv.p_high >= 0.3));

  const Refinement close = refine_until_decided(0.3 - 3e-3, 0.3, s);
  CHECK(close.decision == Decision::below);
  const auto index = static_cast<std::size_t>(std::ceil(std::log2(0.1 / 3e-3)));
  CHECK(close.trace.size() == index + 1);
  std::int64_t calls = 0;
  for (const auto& iv : close.trace) calls += iv.oracle_calls;
  CHECK(close.oracle_calls == calls);
}

TEST_CASE("failure budget") {
  FailureBudget b(0.05);
  b.consume(0.03);
  b.consume(0.02);
  CHECK(b.consumed() == doctest::Approx(0.05));
  CHECK_THROWS_AS(b.consume(1e-6), BudgetExhausted);
  PrecisionSchedule s;
  FailureBudget small(1e-6);
  CHECK_THROWS_AS(refine_until_decided(0.3, 0.3, s, small), BudgetExhausted);
}

TEST_CASE("trace csv") {
  PrecisionSchedule s;
  const Refinement r = refine_until_decided(0.3, 0.3, s);
  std::ostringstream out;
  write_trace_csv(out, r.trace);
  CHECK(out.str().rfind("step,eps_k,alpha_k,p_low,p_high,oracle_calls\n", 0) == 0);
  CHECK(to_string(Decision::below) == std::string("below"));
}
