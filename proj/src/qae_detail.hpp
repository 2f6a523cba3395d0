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

#include <cmath>
#include <numbers>
#include <vector>

namespace qrisk::detail {

/// sin and cos of pi*k/M for k = 0..M-1.
struct QaeTable {
  long size;
  std::vector<double> sin_k;
  std::vector<double> cos_k;

  explicit QaeTable(int m) : size(1L << m), sin_k(static_cast<std::size_t>(size)), cos_k(sin_k.size()) {
    for (long k = 0; k < size; ++k) {
      const double a = std::numbers::pi * static_cast<double>(k) / static_cast<double>(size);
      sin_k[static_cast<std::size_t>(k)] = std::sin(a);
      cos_k[static_cast<std::size_t>(k)] = std::cos(a);
    }
  }
};

inline constexpr double kSingularSin = 1e-15;

/// Calls visit(j, mass) for j = 0..min(last, M/2) with the folded canonical
/// QAE outcome law of the amplitude sqrt(value).
template <class Visit>
void for_each_folded(const QaeTable& table, double value, long last, Visit&& visit) {
  const long m_size = table.size;
  const double md = static_cast<double>(m_size);
  const double r = md * std::asin(std::sqrt(value)) / std::numbers::pi;
  const double k0d = std::nearbyint(r);
  const long k0 = static_cast<long>(k0d);
  const double frac = r - k0d;
  const double sf = std::sin(std::numbers::pi * frac);
  const double numerator = sf * sf;
  const double b = std::numbers::pi * frac / md;
  const double sb = std::sin(b);
  const double cb = std::cos(b);
  auto wrap = [m_size](long k) {
    k %= m_size;
    return static_cast<std::size_t>(k < 0 ? k + m_size : k);
  };
  auto kernel = [&](double s) {
    if (std::abs(s) < kSingularSin) return 1.0;
    return numerator / (md * md * s * s);
  };
  const long half = m_size / 2;
  const long stop = last < half ? last : half;
  for (long j = 0; j <= stop; ++j) {
    const std::size_t lo = wrap(j - k0);
    double mass = kernel(table.sin_k[lo] * cb - table.cos_k[lo] * sb);
    if (j > 0 && j < half) {
      const std::size_t hi = wrap(j + k0);
      mass += kernel(table.sin_k[hi] * cb + table.cos_k[hi] * sb);
    }
    visit(j, mass);
  }
}

}  // namespace qrisk::detail
