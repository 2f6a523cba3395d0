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

#include <string_view>

namespace qrisk {

/// How a polynomial value P(x) turns into a marked-state probability.
///
/// amplitude_squared reads |P(x)|^2, function_value reads P(x) itself, and
/// ideal_value bypasses the polynomial and uses the exact threshold function.
enum class MeasurementMode { amplitude_squared, function_value, ideal_value };

std::string_view to_string(MeasurementMode mode) noexcept;
MeasurementMode parse_measurement_mode(std::string_view text);

}  // namespace qrisk
