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

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qrisk {

enum class Parity { even, odd };

std::string_view to_string(Parity parity) noexcept;
Parity parse_parity(std::string_view text);

/// Definite-parity Chebyshev series.
///
/// Even parity stores c_k for T_{2k}, k = 0..d/2. Odd parity stores c_k for
/// T_{2k+1}, k = 0..(d-1)/2.
class ChebSeries {
 public:
  ChebSeries(Parity parity, int degree, std::vector<double> coeffs);

  static ChebSeries even(std::vector<double> coeffs);

  Parity parity() const noexcept { return parity_; }
  int degree() const noexcept { return degree_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  ChebSeries scaled(double factor) const;

  bool operator==(const ChebSeries&) const = default;

 private:
  Parity parity_;
  int degree_;
  std::vector<double> coeffs_;
};

/// Coefficient count implied by (parity, degree).
std::size_t coefficient_count(Parity parity, int degree);

/// Grid x_j = -cos(j*pi/(count-1)), j = 0..count-1, ascending on [-1, 1].
std::vector<double> cheb_grid(std::size_t count);

/// Clenshaw evaluation. Inputs within 1e-12 of [-1, 1] are clamped.
double eval_series(const ChebSeries& series, double x);

/// eval_series over many points at once, blocked so the recurrence vectorizes.
void eval_series_batch(const ChebSeries& series, std::span<const double> x, std::span<double> out);

/// Row j, column k holds T_{2k}(x_j) (even) or T_{2k+1}(x_j) (odd).
Eigen::MatrixXd basis_matrix(std::span<const double> points, int degree,
                             Parity parity);

/// max |P(x)| over the non-negative half of cheb_grid(grid_points). Parity
/// makes the other half redundant.
double max_abs_on_grid(const ChebSeries& series, std::size_t grid_points);

inline constexpr double kBoundednessSlack = 1e-9;

/// A series that passed the |P| <= 1 + 1e-9 certificate on a dense grid, and
/// is therefore admissible as a signal-processing polynomial.
class BoundedSeries {
 public:
  static BoundedSeries certify(ChebSeries series, std::size_t grid_points);

  const ChebSeries& series() const noexcept { return series_; }
  double certified_max_abs() const noexcept { return max_abs_; }
  std::size_t certificate_grid() const noexcept { return grid_points_; }

  double operator()(double x) const { return eval_series(series_, x); }

 private:
  BoundedSeries(ChebSeries series, double max_abs, std::size_t grid_points)
      : series_(std::move(series)), max_abs_(max_abs), grid_points_(grid_points) {}

  ChebSeries series_;
  double max_abs_;
  std::size_t grid_points_;
};

}  // namespace qrisk
