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

// The wavelet-boosting forecaster: normalise, split the series into MODWT
// multiresolution components, fit one ordered-boosting model per component on
// its own lags, forecast each component recursively and add them back up.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavecast/gbdt.hpp"
#include "wavecast/modwt.hpp"
#include "wavecast/series.hpp"

namespace wavecast {

/// Which additive representation the component models are fitted on.
enum class ComponentDomain {
  /// Haar MODWT coefficients W_1..W_K, V_K. Causal, so the values at the
  /// forecast origin are not affected by the periodic wrap.
  kCoefficients,
  /// MRA details and smooth D_1..D_K, S_K. Zero-phase; the last ~2^K values
  /// of each component depend on the start of the series through the wrap.
  kMra,
};

const char* to_string(ComponentDomain domain);
ComponentDomain component_domain_from_string(const std::string& name);

/// Additive components of `series` in the given domain, finest first, smooth
/// last. Their elementwise sum reproduces the series.
std::vector<std::vector<double>> decompose_components(std::span<const double> series, std::size_t levels,
                                                      ComponentDomain domain);

struct WaveCatBoostConfig {
  std::size_t lags = 48;
  ComponentDomain domain = ComponentDomain::kCoefficients;
  GbdtParams gbdt;
  /// Overrides decomposition_levels(N) when set.
  std::optional<std::size_t> levels;
};

/// How update_history turns a new observation into component values.
enum class HistoryUpdate {
  /// Re-run MODWT + MRA on the extended normalised series.
  kRedecompose,
  /// Append each component's own one-step forecast and add the remaining
  /// innovation to the finest detail D_1.
  kAllocateInnovation,
};

struct WaveCatBoostModel {
  std::string pollutant;
  std::string unit;
  Instant start{};
  std::size_t levels = 0;
  std::size_t lags = 0;
  ComponentDomain domain = ComponentDomain::kCoefficients;
  NormParams norm;
  FilterPair filter;
  /// Finest detail first, smooth last. Shared and immutable once fitted.
  std::shared_ptr<const std::vector<OrderedGbdtModel>> components;
  /// Last `lags` values of each component, oldest first.
  std::vector<std::vector<double>> histories;
  /// Whole normalised series seen so far (training data plus updates).
  std::vector<double> normalized_history;

  std::size_t component_count() const noexcept { return levels + 1; }
  /// Index of the next unseen observation.
  std::size_t issued_at() const noexcept { return normalized_history.size(); }
  std::string component_name(std::size_t k) const;
};

struct ForecastResult {
  std::string pollutant;
  std::size_t issued_at = 0;
  std::size_t horizon = 0;
  std::vector<double> point;                       // original units
  std::vector<std::string> component_names;        // W1..WK, VK or D1..DK, SK
  std::vector<std::vector<double>> per_component;  // normalised, one row per component
};

WaveCatBoostModel fit_wavecatboost(const TimeSeries& series, const WaveCatBoostConfig& config);
ForecastResult forecast(const WaveCatBoostModel& model, std::size_t horizon);
WaveCatBoostModel update_history(const WaveCatBoostModel& model, double value,
                                 HistoryUpdate mode = HistoryUpdate::kRedecompose);

std::string to_json(const WaveCatBoostModel& model);
WaveCatBoostModel wavecatboost_from_json(const std::string& text);
std::string to_json(const ForecastResult& result);

/// Baseline: one ordered-boosting model on the undecomposed normalised series.
struct SeriesGbdtModel {
  std::size_t lags = 0;
  NormParams norm;
  std::shared_ptr<const OrderedGbdtModel> model;
  std::vector<double> history;  // last `lags` normalised values
};

SeriesGbdtModel fit_series_gbdt(const TimeSeries& series, std::size_t lags, const GbdtParams& params);
std::vector<double> forecast(const SeriesGbdtModel& model, std::size_t horizon);

/// Iterates a one-step model `horizon` times, feeding predictions back as lags.
std::vector<double> recursive_forecast(const OrderedGbdtModel& model, std::span<const double> history,
                                       std::size_t horizon, const std::string& component = {});

}  // namespace wavecast
