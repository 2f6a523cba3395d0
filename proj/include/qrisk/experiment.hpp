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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qrisk {

class PolynomialCache;

/// A validated experiment description. Unknown keys are rejected at load.
struct ExperimentConfig {
  std::string name;  // fig5, fig6, fig7, cvar or custom
  std::uint64_t seed = 0;
  int repetitions = 1;
  nlohmann::json document;  // the full validated document, defaults filled in

  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// FNV-1a over the canonical dump, ignoring output_dir.
  std::string hash() const;
  std::filesystem::path output_dir() const;
};

struct Sample {
  std::string group;
  int repetition = 0;
  double value = 0.0;
};

struct Aggregate {
  std::size_t count = 0;
  double mean = 0.0;
  double p68 = 0.0;
  double stddev = 0.0;
};

Aggregate aggregate(std::vector<double> values);

struct RunRecord {
  std::string config_hash;
  nlohmann::json config;
  std::string version;
  std::vector<Sample> samples;
  std::map<std::string, Aggregate> aggregates;
  nlohmann::json summary;
  double wall_seconds = 0.0;  // reported separately, never part of run.json

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

struct RunOptions {
  bool force = false;
  int jobs = 0;  // 0 keeps the OpenMP default
  std::optional<std::filesystem::path> cache_dir;  // run cache root, QRISK_CACHE_DIR when unset
};

/// Runs the named protocol, writes its CSV and JSON artifacts into the output
/// directory and returns the record. Identical configs hit the run cache.
RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Pools the samples of records that share a config (up to seed, repetition
/// count and output_dir) and recomputes every aggregate.
RunRecord summarize(const std::vector<RunRecord>& records);

/// Ordinary least squares of y on x; returns (slope, intercept).
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Atomic write through a temporary file in the same directory.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace qrisk
