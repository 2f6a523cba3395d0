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

#include "qrisk/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qrisk/error.hpp"

namespace qrisk {

namespace {

constexpr double kDomainSlack = 1e-12;

double clamp_to_domain(double x) {
  if (!(std::abs(x) <= 1.0 + kDomainSlack)) {
    throw DomainError("Chebyshev argument outside [-1, 1]: " + std::to_string(x));
  }
  return std::clamp(x, -1.0, 1.0);
}

}  // namespace

std::string_view to_string(Parity parity) noexcept {
  return parity == Parity::even ? "even" : "odd";
}

Parity parse_parity(std::string_view text) {
  if (text == "even") return Parity::even;
  if (text == "odd") return Parity::odd;
  throw InvalidArgument("unknown parity '" + std::string(text) + "'");
}

std::size_t coefficient_count(Parity parity, int degree) {
  if (degree < 0) throw InvalidArgument("negative degree");
  if (parity == Parity::even) {
    if (degree % 2 != 0) throw InvalidArgument("even parity requires an even degree");
    return static_cast<std::size_t>(degree / 2 + 1);
  }
  if (degree % 2 != 1) throw InvalidArgument("odd parity requires an odd degree");
  return static_cast<std::size_t>((degree + 1) / 2);
}

ChebSeries::ChebSeries(Parity parity, int degree, std::vector<double> coeffs)
    : parity_(parity), degree_(degree), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != coefficient_count(parity_, degree_)) {
    throw InvalidArgument("coefficient count does not match degree " +
                          std::to_string(degree_));
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw InvalidArgument("non-finite Chebyshev coefficient");
  }
}

ChebSeries ChebSeries::even(std::vector<double> coeffs) {
  if (coeffs.empty()) throw InvalidArgument("empty coefficient vector");
  const int degree = 2 * static_cast<int>(coeffs.size() - 1);
  return ChebSeries(Parity::even, degree, std::move(coeffs));
}

ChebSeries ChebSeries::scaled(double factor) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= factor;
  return ChebSeries(parity_, degree_, std::move(c));
}

std::vector<double> cheb_grid(std::size_t count) {
  if (count < 2) throw InvalidArgument("cheb_grid needs at least 2 points");
  std::vector<double> x(count);
  const double step = std::numbers::pi / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) {
    x[j] = -std::cos(static_cast<double>(j) * step);
  }
  // Pin the symmetric points so the grid is exactly antisymmetric.
  for (std::size_t j = 0; j < count / 2; ++j) x[count - 1 - j] = -x[j];
  if (count % 2 == 1) x[count / 2] = 0.0;
  return x;
}

double eval_series(const ChebSeries& series, double x) {
  x = clamp_to_domain(x);
  const double y = 2.0 * x * x - 1.0;  // T_2(x); T_{2k+2} = 2 T_2 T_{2k} - T_{2k-2}
  const double two_y = 2.0 * y;
  const auto& c = series.coeffs();
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = c[k] + two_y * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  const double b0 = c[0] + two_y * b1 - b2;
  if (series.parity() == Parity::even) return b0 - y * b1;
  return x * (b0 - b1);
}

void eval_series_batch(const ChebSeries& series, std::span<const double> x, std::span<double> out) {
  if (x.size() != out.size()) throw InvalidArgument("batch input and output differ in length");
  constexpr std::size_t kBlock = 32;
  const auto& c = series.coeffs();
  const bool even = series.parity() == Parity::even;
  double xs[kBlock], two_y[kBlock], b1[kBlock], b2[kBlock];
  for (std::size_t begin = 0; begin < x.size(); begin += kBlock) {
    const std::size_t n = std::min(kBlock, x.size() - begin);
    for (std::size_t i = 0; i < kBlock; ++i) {
      xs[i] = i < n ? clamp_to_domain(x[begin + i]) : 0.0;
      two_y[i] = 2.0 * (2.0 * xs[i] * xs[i] - 1.0);
      b1[i] = 0.0;
      b2[i] = 0.0;
    }
    for (std::size_t k = c.size(); k-- > 1;) {
      const double ck = c[k];
#pragma omp simd
      for (std::size_t i = 0; i < kBlock; ++i) {
        const double b0 = ck + two_y[i] * b1[i] - b2[i];
        b2[i] = b1[i];
        b1[i] = b0;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double b0 = c[0] + two_y[i] * b1[i] - b2[i];
      out[begin + i] = even ? b0 - 0.5 * two_y[i] * b1[i] : xs[i] * (b0 - b1[i]);
    }
  }
}

Eigen::MatrixXd basis_matrix(std::span<const double> points, int degree, Parity parity) {
  const auto cols = static_cast<Eigen::Index>(coefficient_count(parity, degree));
  Eigen::MatrixXd a(static_cast<Eigen::Index>(points.size()), cols);
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    const double x = clamp_to_domain(points[static_cast<std::size_t>(j)]);
    const double y = 2.0 * x * x - 1.0;
    double prev = parity == Parity::even ? 1.0 : x;  // T_0 / T_1
    double cur = parity == Parity::even ? y : x * (2.0 * y - 1.0);  // T_2 / T_3
    a(j, 0) = prev;
    if (cols > 1) a(j, 1) = cur;
    for (Eigen::Index k = 2; k < cols; ++k) {
      const double next = 2.0 * y * cur - prev;
      prev = cur;
      cur = next;
      a(j, k) = cur;
    }
  }
  return a;
}

double max_abs_on_grid(const ChebSeries& series, std::size_t grid_points) {
  const auto grid = cheb_grid(grid_points);
  double worst = 0.0;
  for (std::size_t j = grid_points / 2; j < grid.size(); ++j) {
    worst = std::max(worst, std::abs(eval_series(series, grid[j])));
  }
  return worst;
}

BoundedSeries BoundedSeries::certify(ChebSeries series, std::size_t grid_points) {
  const double m = max_abs_on_grid(series, grid_points);
  if (m > 1.0 + kBoundednessSlack) {
    throw InvalidArgument("series exceeds unit magnitude (max |P| = " + std::to_string(m) +
                          ")");
  }
  return BoundedSeries(std::move(series), m, grid_points);
}

}  // namespace qrisk
