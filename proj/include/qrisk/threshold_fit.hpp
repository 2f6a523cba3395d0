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

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "qrisk/chebyshev.hpp"
#include "qrisk/epigraph_lp.hpp"
#include "qrisk/measurement.hpp"

namespace qrisk {

enum class ThresholdKind { step, ramp };

std::string_view to_string(ThresholdKind kind) noexcept;
ThresholdKind parse_threshold_kind(std::string_view text);

struct ThresholdSpec {
  double mu = 0.5;
  double delta = 1e-3;
  double eps = 1e-3;
  std::optional<double> c;  // plateau level, 1 - eps when unset
  ThresholdKind kind = ThresholdKind::step;
  int degree = 100;
  std::size_t grid_size = 0;  // 0 selects max(4d, 2000)

  double plateau() const { return c.value_or(1.0 - eps); }
  std::size_t grid() const;

  /// Throws InvalidArgument when any field is out of range.
  void validate() const;

  /// Exact target: 1[x <= mu] (step) or (mu - x) 1[x <= mu] (ramp).
  double target(double x) const;
};

struct FitResult {
  ChebSeries series;
  double objective = 0.0;
  double inside_error = 0.0;
  double outside_error = 0.0;
  int solver_iterations = 0;
  double max_abs_on_nodes = 0.0;
  bool rescaled = false;

  /// The series with its dense-grid boundedness certificate.
  BoundedSeries certified() const;
};

FitResult fit_step(const ThresholdSpec& spec, const lp::Options& options = {});
FitResult fit_ramp(const ThresholdSpec& spec, const lp::Options& options = {});

/// Dispatches on spec.kind.
FitResult fit_threshold(const ThresholdSpec& spec, const lp::Options& options = {});

/// Point masses p_i on nodes x_i with uniform spacing dx, so that sum p_i dx = 1.
struct DiscreteDensity {
  std::vector<double> x;
  std::vector<double> p;
  double dx = 0.0;

  /// Density of Normal(mean, sd^2) sampled on `points` uniform nodes of [0, 1]
  /// and renormalized.
  static DiscreteDensity normal(double mean, double sd, std::size_t points);
};

/// |sum_i (P_mode(x_i) - theta(x_i)) p_i dx| for the threshold described by spec.
double theta_error(const ChebSeries& series, const ThresholdSpec& spec,
                   const DiscreteDensity& dist, MeasurementMode mode);

/// Memoized fits keyed by (kind, mu to 12 decimals, delta, eps, c, d, M).
///
/// The fit behind each key uses mu rounded to 12 decimals, so a key always
/// maps to the same coefficients no matter which caller populated it. When a
/// directory is given, entries are also persisted there as JSON.
class PolynomialCache {
 public:
  explicit PolynomialCache(std::optional<std::filesystem::path> directory = std::nullopt,
                           lp::Options options = {});

  /// Directory taken from the QRISK_CACHE_DIR environment variable, if set.
  static PolynomialCache from_environment();

  static std::string key(const ThresholdSpec& spec);

  FitResult get(const ThresholdSpec& spec);
  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  std::optional<FitResult> load(const std::string& key) const;
  void store(const std::string& key, const FitResult& fit) const;

  std::optional<std::filesystem::path> directory_;
  lp::Options options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, FitResult> entries_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace qrisk
