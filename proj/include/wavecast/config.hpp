// Copyright 2026 The WaveCast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Run configuration: an INI document with one section per stage. Unknown
// keys are rejected so typos cannot silently fall back to defaults.
//
//   [data]       paths, pollutants, impute
//   [model]      lags, levels (0 = automatic), domain (coefficients | mra)
//   [gbdt]       iterations, depth, learning_rate, permutations, mode, bins, l2_reg
//   [conformal]  alpha, window, uncertainty, calibration, steps
//   [eval]       models, horizons, seasonality
//   [run]        seed, out

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wavecast/conformal.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/series.hpp"

namespace wavecast {

struct ConformalSettings {
  double alpha = 0.05;
  std::size_t window = 200;
  UncertaintyMode uncertainty = UncertaintyMode::kConstant;
  /// Trailing points held out from training to calibrate scores.
  std::size_t calibration = 200;
  /// Separate score buffers for steps 1..steps.
  std::size_t steps = 24;
};

struct RunConfig {
  std::vector<std::filesystem::path> data_paths;
  std::vector<std::string> pollutants;
  ImputePolicy impute = ImputePolicy::kLinear;
  WaveCatBoostConfig model;
  ConformalSettings conformal;
  std::vector<std::string> models{"wavecatboost", "plain-gbdt", "seasonal-naive"};
  std::vector<std::string> horizons{"1d", "7d", "14d", "31d"};
  std::size_t seasonality = 24;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";

  void validate() const;
  /// Sorted `section.key=value` lines of every setting that can change results.
  /// The output directory is left out so relocated runs hash the same.
  std::string canonical() const;
  std::string hash() const;
};

/// Relative data paths and out dir resolve against the config file's folder.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

}  // namespace wavecast
