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

// Weighted (hard-window) conformal prediction intervals around point
// forecasts. Scores are normalised absolute residuals; the interval
// half-width is the windowed conformal quantile times the uncertainty scale.

#include <cstddef>
#include <deque>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wavecast/gbdt.hpp"
#include "wavecast/pipeline.hpp"

namespace wavecast {

inline constexpr double kUncertaintyFloor = 1e-6;

enum class UncertaintyMode { kConstant, kLearned };

const char* to_string(UncertaintyMode mode);
UncertaintyMode uncertainty_mode_from_string(const std::string& name);

/// Scale model U(lags). Constant mode is identically 1; learned mode is a
/// plain boosting regressor of |residual| on the preceding lags.
class UncertaintyModel {
 public:
  UncertaintyModel() = default;
  explicit UncertaintyModel(std::shared_ptr<const OrderedGbdtModel> model) : model_(std::move(model)) {}

  UncertaintyMode mode() const noexcept { return model_ ? UncertaintyMode::kLearned : UncertaintyMode::kConstant; }
  /// Lag count the learned model expects; 0 in constant mode.
  std::size_t lags() const noexcept { return model_ ? model_->lags : 0; }
  /// Always >= kUncertaintyFloor.
  double operator()(std::span<const double> lags) const;
  const OrderedGbdtModel* learned() const noexcept { return model_.get(); }

 private:
  std::shared_ptr<const OrderedGbdtModel> model_;
};

/// Constant mode ignores `residuals`. Learned mode needs >= 32 rows.
UncertaintyModel fit_uncertainty(const LagMatrix& residuals, UncertaintyMode mode, GbdtParams params = {});

/// |y - pred| / max(u, floor).
double conformal_score(double y, double pred, double u);

/// Index of the order statistic used as the conformal quantile:
/// ceil((n + 1)(1 - alpha)). May exceed n.
std::size_t conformal_rank(std::size_t n, double alpha);

struct ScoreEntry {
  std::size_t t = 0;
  double score = 0.0;
};

class ConformalCalibrator {
 public:
  /// `steps` separate buffers, one per forecast step; 1 means pooled.
  ConformalCalibrator(double alpha, std::size_t window, std::size_t steps = 1, UncertaintyModel uncertainty = {});

  double alpha() const noexcept { return alpha_; }
  std::size_t window() const noexcept { return window_; }
  std::size_t steps() const noexcept { return buffers_.size(); }
  const UncertaintyModel& uncertainty() const noexcept { return uncertainty_; }
  /// Buffer used for 1-based forecast `step`; steps beyond the last buffer share it.
  const std::deque<ScoreEntry>& buffer(std::size_t step) const;

  /// Appends a score observed at time t. Times must be non-decreasing per buffer.
  void add_score(std::size_t step, std::size_t t, double score);

  /// Scores of `step`'s buffer inside the window [t - window, t).
  std::vector<double> windowed(std::size_t t, std::size_t step = 1) const;

 private:
  double alpha_;
  std::size_t window_;
  std::vector<std::deque<ScoreEntry>> buffers_;
  UncertaintyModel uncertainty_;
};

/// The ceil((n+1)(1-alpha))-th smallest windowed score, or +infinity when
/// that rank exceeds n. Throws when the window is empty.
double conformal_quantile(const ConformalCalibrator& cal, std::size_t t, std::size_t step = 1);

struct IntervalForecast {
  std::vector<double> point;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> quantile;  // CQ per step
  std::vector<double> scale;     // U per step
  double alpha = 0.0;
  bool unbounded = false;
};

/// Interval around an already computed point path. `lag_history` holds the
/// observed series in original units up to the origin; later lags are taken
/// from the point path itself. Lower bounds are clipped at zero.
IntervalForecast make_interval(std::span<const double> point, std::span<const double> lag_history,
                               const ConformalCalibrator& cal, std::size_t t);

IntervalForecast predict_interval(const WaveCatBoostModel& model, const ConformalCalibrator& cal,
                                  std::size_t horizon);

/// Original-unit history of a model, reconstructed from its normalised series.
std::vector<double> original_history(const WaveCatBoostModel& model);

struct ResidualRecord {
  std::size_t step = 0;    // 1-based forecast step
  std::size_t target = 0;  // time index of the forecast value
  double abs_residual = 0.0;
  std::vector<double> lags;  // original-unit lags preceding the target
};

struct ResidualCollection {
  std::vector<ResidualRecord> records;
  WaveCatBoostModel model;  // history advanced through every actual
};

/// Rolls the model across `actuals` (original units, immediately following
/// its history). At each origin it forecasts up to `max_step` steps and
/// records the absolute error of every step whose actual is known.
ResidualCollection collect_residuals(const WaveCatBoostModel& model, std::span<const double> actuals,
                                     std::size_t max_step, std::size_t uncertainty_lags,
                                     HistoryUpdate mode = HistoryUpdate::kRedecompose);

/// Scores every record with `uncertainty` and inserts it into a new calibrator.
ConformalCalibrator build_calibrator(std::span<const ResidualRecord> records, double alpha, std::size_t window,
                                     std::size_t steps, UncertaintyModel uncertainty = {});

/// Rows (lags -> |residual|) for fitting a learned uncertainty model.
LagMatrix residual_matrix(std::span<const ResidualRecord> records);

std::string to_json(const IntervalForecast& interval);

/// Snapshot of the score buffers and the uncertainty model.
std::string to_json(const ConformalCalibrator& cal);
ConformalCalibrator calibrator_from_json(const std::string& text);

/// Same buffers, different miscoverage level.
ConformalCalibrator with_alpha(const ConformalCalibrator& cal, double alpha);

}  // namespace wavecast
