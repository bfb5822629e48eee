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

// Rolling-origin evaluation: fixed train/test splits at several horizons,
// MASE scoring against the seasonal-naive scale, and the rank-based
// multiple-comparisons-with-the-best (MCB) test.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavecast/pipeline.hpp"
#include "wavecast/series.hpp"

namespace wavecast {

/// Mean absolute scaled error:
///   ((N - s) / h) * sum |forecast - actual| / sum_{t > s} |train_t - train_{t-s}|.
/// Throws std::domain_error when the in-sample seasonal differences are all zero.
double mase(std::span<const double> actuals, std::span<const double> forecasts, std::span<const double> train,
            std::size_t seasonality);

/// Repeats the last full season: value t (1-based) = train[N - s + (t - 1) mod s].
std::vector<double> seasonal_naive(std::span<const double> train, std::size_t seasonality, std::size_t horizon);

struct HorizonSpec {
  std::string label;  // 1d, 7d, 14d, 31d
  std::size_t steps = 0;
};

/// 24 steps per day. Accepts only the four evaluated labels.
HorizonSpec horizon_from_label(const std::string& label);

enum class ModelKind { kWaveCatBoost, kSeriesGbdt, kSeasonalNaive };

struct ModelSpec {
  std::string name;
  ModelKind kind = ModelKind::kWaveCatBoost;
  WaveCatBoostConfig config;  // lags and boosting parameters; ignored by seasonal naive
};

/// Recognises "wavecatboost", "plain-gbdt" and "seasonal-naive".
ModelSpec model_spec_from_name(const std::string& name, const WaveCatBoostConfig& config);

struct EvalCell {
  std::string model;
  std::string pollutant;
  std::string horizon;
  double mase = 0.0;
  /// FNV-1a of the fitted model snapshot; empty for seasonal naive.
  std::string snapshot_hash;
};

struct AbsentCell {
  std::string model;
  std::string pollutant;
  std::string horizon;
  std::string reason;
};

struct EvalReport {
  std::vector<EvalCell> cells;
  std::vector<AbsentCell> absent;
  std::uint64_t seed = 0;
  std::string config_hash;

  const EvalCell* find(const std::string& model, const std::string& pollutant, const std::string& horizon) const;
  std::string to_csv() const;
  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
};

struct EvalOptions {
  std::size_t seasonality = 24;
  std::string config_hash;
};

/// One fit per (model, series, horizon): train on everything except the last
/// `steps` points, forecast them, score MASE. Cells whose series is too short
/// are recorded as absent. Each cell draws its seed from (seed, cell key).
EvalReport run_rolling_eval(const std::map<std::string, TimeSeries>& series, const std::vector<ModelSpec>& models,
                            const std::vector<std::string>& horizons, std::uint64_t seed,
                            const EvalOptions& options = {});

/// Forecast of one model for one split. Exposed for tests and the CLI.
struct CellForecast {
  std::vector<double> forecast;
  std::string snapshot_hash;
};
CellForecast forecast_cell(const ModelSpec& spec, const TimeSeries& train, std::size_t horizon,
                           std::uint64_t cell_seed, std::size_t seasonality);

// ---------------------------------------------------------------------------
// MCB

/// Upper-alpha quantile of the range of M independent standard normals,
/// tabulated for M in [2, 20] and alpha in {0.01, 0.05, 0.10}.
double studentized_range_quantile(std::size_t models, double alpha);

/// Average ranks (1 = smallest) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct McbResult {
  double alpha = 0.05;
  std::size_t cells = 0;
  std::vector<std::string> models;
  std::vector<double> mean_ranks;
  double critical_value = 0.0;  // q_{alpha, M}
  double half_width = 0.0;
  std::string best;
  double reference_lo = 0.0;
  double reference_hi = 0.0;
  std::vector<std::string> significantly_worse;

  std::string to_json() const;
};

/// Ranks models within each (pollutant, horizon) cell and compares mean-rank
/// intervals of half-width q * sqrt(M (M + 1) / (12 n)). `horizon` restricts
/// the test to one horizon label; by default all cells are pooled.
McbResult mcb_test(const EvalReport& report, double alpha, const std::optional<std::string>& horizon = std::nullopt);

}  // namespace wavecast
