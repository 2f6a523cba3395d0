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

#include "qrisk/threshold_fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "qrisk/error.hpp"
#include "qrisk/serialize.hpp"

namespace qrisk {

std::string_view to_string(ThresholdKind kind) noexcept {
  return kind == ThresholdKind::step ? "step" : "ramp";
}

ThresholdKind parse_threshold_kind(std::string_view text) {
  if (text == "step") return ThresholdKind::step;
  if (text == "ramp") return ThresholdKind::ramp;
  throw InvalidArgument("unknown threshold kind '" + std::string(text) + "'");
}

std::string_view to_string(MeasurementMode mode) noexcept {
  switch (mode) {
    case MeasurementMode::amplitude_squared: return "amplitude_squared";
    case MeasurementMode::function_value: return "function_value";
    case MeasurementMode::ideal_value: return "ideal_value";
  }
  return "amplitude_squared";
}

MeasurementMode parse_measurement_mode(std::string_view text) {
  if (text == "amplitude_squared") return MeasurementMode::amplitude_squared;
  if (text == "function_value") return MeasurementMode::function_value;
  if (text == "ideal_value") return MeasurementMode::ideal_value;
  throw InvalidArgument("unknown measurement mode '" + std::string(text) + "'");
}

std::size_t ThresholdSpec::grid() const {
  if (grid_size != 0) return grid_size;
  return std::max<std::size_t>(4 * static_cast<std::size_t>(std::max(degree, 0)), 2000);
}

void ThresholdSpec::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidArgument("threshold spec: " + msg); };
  if (!(mu > 0.0 && mu < 1.0)) fail("mu must lie in (0, 1)");
  if (!(delta > 0.0)) fail("delta must be positive");
  if (!(mu - delta / 2 > 0.0 && mu + delta / 2 < 1.0)) fail("gap [mu - delta/2, mu + delta/2] must lie inside (0, 1)");
  if (!(eps > 0.0 && eps < 1.0)) fail("eps must lie in (0, 1)");
  const double level = plateau();
  if (!(level > 0.0 && level <= 1.0)) fail("c must lie in (0, 1]");
  if (!(eps < level)) fail("eps must be smaller than c");
  if (degree < 2 || degree % 2 != 0) fail("degree must be even and at least 2");
  if (grid() < static_cast<std::size_t>(degree)) fail("grid size must be at least the degree");
}

double ThresholdSpec::target(double x) const {
  if (x > mu) return 0.0;
  return kind == ThresholdKind::step ? 1.0 : mu - x;
}

BoundedSeries FitResult::certified() const {
  return BoundedSeries::certify(series, 10 * std::max<std::size_t>(2000, 4 * static_cast<std::size_t>(series.degree())));
}

namespace {

struct FitGrid {
  std::vector<double> x;
  std::vector<int> region;  // -1 plateau, 0 gap, +1 outside
  std::vector<double> goal;
};

FitGrid make_grid(const ThresholdSpec& spec) {
  const std::vector<double> all = cheb_grid(spec.grid());
  const double lo = spec.mu - spec.delta / 2;
  const double hi = spec.mu + spec.delta / 2;
  const double c = spec.plateau();
  FitGrid g;
  for (double x : all) {
    if (x < 0.0) continue;
    g.x.push_back(x);
    if (x <= lo) {
      g.region.push_back(-1);
      g.goal.push_back(spec.kind == ThresholdKind::step ? c : spec.mu - x);
    } else if (x >= hi) {
      g.region.push_back(1);
      g.goal.push_back(0.0);
    } else {
      g.region.push_back(0);
      g.goal.push_back(0.0);
    }
  }
  return g;
}

FitResult fit_impl(const ThresholdSpec& spec, const lp::Options& options, bool reduce = true);

// Degree-d fit built from the largest lower degree whose minimax error the
// solver still resolves, zero-padded to d.
FitResult fit_reduced(const ThresholdSpec& spec, const lp::Options& options) {
  ThresholdSpec lower = spec;
  lower.grid_size = spec.grid();
  int bad = spec.degree;
  std::optional<FitResult> best;
  int good = 0;
  for (int d = std::max(2, (bad / 4) * 2); !best; d = std::max(2, (d / 4) * 2)) {
    lower.degree = d;
    try {
      best = fit_impl(lower, options, false);
      good = d;
    } catch (const PrecisionLimit&) {
      if (d == 2) throw;
      bad = d;
    }
  }
  while (bad - good > 2 && bad - good > spec.degree / 16) {
    lower.degree = ((good + bad) / 4) * 2;
    if (lower.degree <= good) break;
    try {
      best = fit_impl(lower, options, false);
      good = lower.degree;
    } catch (const PrecisionLimit&) {
      bad = lower.degree;
    }
  }
  FitResult r = *best;
  std::vector<double> coeffs = r.series.coeffs();
  coeffs.resize(coefficient_count(Parity::even, spec.degree), 0.0);
  r.series = ChebSeries(Parity::even, spec.degree, std::move(coeffs));
  return r;
}

FitResult fit_impl(const ThresholdSpec& spec, const lp::Options& options, bool reduce) {
  spec.validate();
  const FitGrid grid = make_grid(spec);
  const double c = spec.plateau();

  lp::Problem problem;
  problem.basis = basis_matrix(grid.x, spec.degree, Parity::even);
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    const auto pt = static_cast<std::int32_t>(j);
    if (grid.region[j] != 0) {
      problem.rows.push_back({pt, 1, true, grid.goal[j]});
      problem.rows.push_back({pt, -1, true, -grid.goal[j]});
    }
    problem.rows.push_back({pt, 1, false, c});
    problem.rows.push_back({pt, -1, false, c});
  }

  lp::Solution sol;
  try {
    sol = lp::solve_minimax(problem, options);
  } catch (const PrecisionLimit&) {
    if (!reduce) throw;
    return fit_reduced(spec, options);
  }
  std::vector<double> coeffs(sol.coeffs.data(), sol.coeffs.data() + sol.coeffs.size());
  ChebSeries series(Parity::even, spec.degree, std::move(coeffs));

  FitResult out{series};
  const std::size_t dense = 10 * spec.grid();
  const double peak = max_abs_on_grid(series, dense);
  if (peak > 1.0 + kBoundednessSlack) {
    out.series = series.scaled(1.0 / peak);
    out.rescaled = true;
  }

  const Eigen::VectorXd f =
      problem.basis * Eigen::Map<const Eigen::VectorXd>(out.series.coeffs().data(),
                                                         static_cast<Eigen::Index>(out.series.coeffs().size()));
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    const double v = f(static_cast<Eigen::Index>(j));
    out.max_abs_on_nodes = std::max(out.max_abs_on_nodes, std::abs(v));
    const double err = std::abs(v - grid.goal[j]);
    if (grid.region[j] < 0) out.inside_error = std::max(out.inside_error, err);
    if (grid.region[j] > 0) out.outside_error = std::max(out.outside_error, err);
  }
  out.objective = std::max(out.inside_error, out.outside_error);
  out.solver_iterations = sol.remez_iterations + sol.pivots;
  return out;
}

}  // namespace

FitResult fit_step(const ThresholdSpec& spec, const lp::Options& options) {
  if (spec.kind != ThresholdKind::step) throw InvalidArgument("fit_step needs a step spec");
  return fit_impl(spec, options);
}

FitResult fit_ramp(const ThresholdSpec& spec, const lp::Options& options) {
  if (spec.kind != ThresholdKind::ramp) throw InvalidArgument("fit_ramp needs a ramp spec");
  return fit_impl(spec, options);
}

FitResult fit_threshold(const ThresholdSpec& spec, const lp::Options& options) {
  return fit_impl(spec, options);
}

DiscreteDensity DiscreteDensity::normal(double mean, double sd, std::size_t points) {
  if (points < 2) throw InvalidArgument("density needs at least two nodes");
  if (!(sd > 0.0)) throw InvalidArgument("density sd must be positive");
  DiscreteDensity d;
  d.dx = 1.0 / static_cast<double>(points - 1);
  d.x.resize(points);
  d.p.resize(points);
  double total = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    d.x[i] = static_cast<double>(i) * d.dx;
    const double z = (d.x[i] - mean) / sd;
    d.p[i] = std::exp(-0.5 * z * z);
    total += d.p[i];
  }
  for (double& v : d.p) v /= total * d.dx;
  return d;
}

double theta_error(const ChebSeries& series, const ThresholdSpec& spec,
                   const DiscreteDensity& dist, MeasurementMode mode) {
  if (dist.x.size() != dist.p.size() || dist.x.empty() || !(dist.dx > 0.0)) {
    throw InvalidArgument("theta_error: malformed density");
  }
  double mass = 0.0;
  for (double v : dist.p) {
    if (!(v >= 0.0)) throw InvalidArgument("theta_error: negative density");
    mass += v * dist.dx;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw InvalidArgument("theta_error: density is not normalized");

  double diff = 0.0;
  for (std::size_t i = 0; i < dist.x.size(); ++i) {
    const double exact = spec.target(dist.x[i]);
    double approx = exact;
    if (mode != MeasurementMode::ideal_value) {
      const double v = eval_series(series, dist.x[i]);
      approx = mode == MeasurementMode::amplitude_squared ? v * v : v;
    }
    diff += (approx - exact) * dist.p[i] * dist.dx;
  }
  return std::abs(diff);
}

PolynomialCache::PolynomialCache(std::optional<std::filesystem::path> directory,
                                 lp::Options options)
    : directory_(std::move(directory)), options_(options) {
  if (directory_) std::filesystem::create_directories(*directory_);
}

PolynomialCache PolynomialCache::from_environment() {
  const char* dir = std::getenv("QRISK_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return PolynomialCache();
  return PolynomialCache(std::filesystem::path(dir) / "fits");
}

std::string PolynomialCache::key(const ThresholdSpec& spec) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s_mu%.12f_D%.17g_e%.17g_c%.17g_d%d_M%zu",
                std::string(to_string(spec.kind)).c_str(), spec.mu, spec.delta, spec.eps,
                spec.plateau(), spec.degree, spec.grid());
  return buf;
}

std::optional<FitResult> PolynomialCache::load(const std::string& key) const {
  if (!directory_) return std::nullopt;
  std::ifstream in(*directory_ / (key + ".json"));
  if (!in) return std::nullopt;
  try {
    return fit_result_from_json(nlohmann::json::parse(in));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void PolynomialCache::store(const std::string& key, const FitResult& fit) const {
  if (!directory_) return;
  const auto final_path = *directory_ / (key + ".json");
  std::ostringstream tag;
  tag << std::hex << std::hash<std::string>{}(key) << '_' << reinterpret_cast<std::uintptr_t>(&fit);
  const auto tmp = *directory_ / (key + ".tmp" + tag.str());
  {
    std::ofstream out(tmp);
    out << nlohmann::json(fit).dump();
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

FitResult PolynomialCache::get(const ThresholdSpec& spec) {
  const std::string k = key(spec);
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(k);
    if (it != entries_.end()) {
      hits_.fetch_add(1, std::memory_order_relaxed);
      return it->second;
    }
  }
  std::optional<FitResult> fit = load(k);
  if (!fit) {
    ThresholdSpec canonical = spec;
    canonical.mu = std::round(spec.mu * 1e12) / 1e12;
    canonical.c = spec.plateau();
    canonical.grid_size = spec.grid();
    fit = fit_threshold(canonical, options_);
    store(k, *fit);
  }
  misses_.fetch_add(1, std::memory_order_relaxed);
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(k, *fit);
  return *fit;
}

std::size_t PolynomialCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t PolynomialCache::hits() const { return hits_.load(); }

std::size_t PolynomialCache::misses() const { return misses_.load(); }

}  // namespace qrisk
