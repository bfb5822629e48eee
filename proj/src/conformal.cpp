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

#include "wavecast/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavecast/json_io.hpp"

namespace wavecast {

const char* to_string(UncertaintyMode mode) { return mode == UncertaintyMode::kConstant ? "constant" : "learned"; }

UncertaintyMode uncertainty_mode_from_string(const std::string& name) {
  if (name == "constant") return UncertaintyMode::kConstant;
  if (name == "learned") return UncertaintyMode::kLearned;
  throw std::invalid_argument("unknown uncertainty mode: " + name);
}

double UncertaintyModel::operator()(std::span<const double> lags) const {
  if (!model_) return 1.0;
  return std::max(kUncertaintyFloor, model_->predict(lags));
}

UncertaintyModel fit_uncertainty(const LagMatrix& residuals, UncertaintyMode mode, GbdtParams params) {
  if (mode == UncertaintyMode::kConstant) return UncertaintyModel{};
  if (residuals.rows() < 32) {
    throw std::invalid_argument("learned uncertainty needs at least 32 residuals, got " +
                                std::to_string(residuals.rows()));
  }
  params.mode = BoostingMode::kPlain;
  return UncertaintyModel{std::make_shared<const OrderedGbdtModel>(fit(residuals, params))};
}

double conformal_score(double y, double pred, double u) {
  if (!std::isfinite(y) || !std::isfinite(pred) || !std::isfinite(u)) {
    throw std::invalid_argument("conformal score of non-finite input");
  }
  return std::abs(y - pred) / std::max(u, kUncertaintyFloor);
}

std::size_t conformal_rank(std::size_t n, double alpha) {
  // The small offset keeps products such as 20 * 0.95 from rounding up.
  const double target = static_cast<double>(n + 1) * (1.0 - alpha);
  return static_cast<std::size_t>(std::ceil(target - 1e-9));
}

ConformalCalibrator::ConformalCalibrator(double alpha, std::size_t window, std::size_t steps,
                                         UncertaintyModel uncertainty)
    : alpha_(alpha), window_(window), buffers_(steps), uncertainty_(std::move(uncertainty)) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
  if (window < 1) throw std::invalid_argument("conformal window must be >= 1");
  if (steps < 1) throw std::invalid_argument("calibrator needs at least one score buffer");
}

const std::deque<ScoreEntry>& ConformalCalibrator::buffer(std::size_t step) const {
  if (step < 1) throw std::invalid_argument("forecast steps are 1-based");
  return buffers_[std::min(step, buffers_.size()) - 1];
}

void ConformalCalibrator::add_score(std::size_t step, std::size_t t, double score) {
  if (step < 1 || step > buffers_.size()) throw std::invalid_argument("no score buffer for step " + std::to_string(step));
  if (!(score >= 0.0)) throw std::invalid_argument("conformity scores must be non-negative");
  auto& buf = buffers_[step - 1];
  if (!buf.empty() && t < buf.back().t) throw std::invalid_argument("scores must be added in time order");
  buf.push_back(ScoreEntry{t, score});
  while (buf.front().t + window_ < t) buf.pop_front();
}

std::vector<double> ConformalCalibrator::windowed(std::size_t t, std::size_t step) const {
  std::vector<double> out;
  const std::size_t from = t > window_ ? t - window_ : 0;
  for (const auto& e : buffer(step)) {
    if (e.t >= from && e.t < t) out.push_back(e.score);
  }
  return out;
}

double conformal_quantile(const ConformalCalibrator& cal, std::size_t t, std::size_t step) {
  std::vector<double> scores = cal.windowed(t, step);
  if (scores.empty()) throw std::invalid_argument("no conformity scores inside the calibration window");
  const std::size_t k = conformal_rank(scores.size(), cal.alpha());
  if (k > scores.size()) return std::numeric_limits<double>::infinity();
  const std::size_t idx = k == 0 ? 0 : k - 1;
  std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(idx), scores.end());
  return scores[idx];
}

IntervalForecast make_interval(std::span<const double> point, std::span<const double> lag_history,
                               const ConformalCalibrator& cal, std::size_t t) {
  const std::size_t lags = cal.uncertainty().lags();
  if (lag_history.size() < lags) throw std::invalid_argument("history shorter than uncertainty lag count");

  IntervalForecast out;
  out.alpha = cal.alpha();
  out.point.assign(point.begin(), point.end());
  std::vector<double> path(lag_history.end() - static_cast<std::ptrdiff_t>(lags), lag_history.end());
  for (std::size_t s = 0; s < point.size(); ++s) {
    const double cq = conformal_quantile(cal, t, s + 1);
    const double u = cal.uncertainty()(std::span<const double>(path).last(lags));
    out.quantile.push_back(cq);
    out.scale.push_back(u);
    if (std::isinf(cq)) {
      out.unbounded = true;
      out.lower.push_back(0.0);
      out.upper.push_back(std::numeric_limits<double>::infinity());
    } else {
      const double width = cq * u;
      out.lower.push_back(std::max(0.0, point[s] - width));
      out.upper.push_back(point[s] + width);
    }
    if (lags > 0) {
      path.erase(path.begin());
      path.push_back(point[s]);
    }
  }
  return out;
}

std::vector<double> original_history(const WaveCatBoostModel& model) {
  std::vector<double> out;
  out.reserve(model.normalized_history.size());
  for (double x : model.normalized_history) out.push_back(model.norm.degenerate ? x + model.norm.min : model.norm.invert(x));
  return out;
}

IntervalForecast predict_interval(const WaveCatBoostModel& model, const ConformalCalibrator& cal,
                                  std::size_t horizon) {
  const ForecastResult fc = forecast(model, horizon);
  return make_interval(fc.point, original_history(model), cal, model.issued_at());
}

ResidualCollection collect_residuals(const WaveCatBoostModel& model, std::span<const double> actuals,
                                     std::size_t max_step, std::size_t uncertainty_lags, HistoryUpdate mode) {
  if (max_step < 1) throw std::invalid_argument("max_step must be >= 1");
  ResidualCollection out{{}, model};
  std::vector<double> observed = original_history(model);
  if (observed.size() < uncertainty_lags) throw std::invalid_argument("history shorter than uncertainty lag count");

  for (std::size_t i = 0; i < actuals.size(); ++i) {
    const WaveCatBoostModel& current = out.model;
    const std::size_t steps = std::min(max_step, actuals.size() - i);
    const ForecastResult fc = forecast(current, steps);
    std::vector<double> path(observed.end() - static_cast<std::ptrdiff_t>(uncertainty_lags), observed.end());
    for (std::size_t s = 0; s < steps; ++s) {
      ResidualRecord rec;
      rec.step = s + 1;
      rec.target = current.issued_at() + s;
      rec.abs_residual = std::abs(actuals[i + s] - fc.point[s]);
      rec.lags = path;
      out.records.push_back(std::move(rec));
      if (uncertainty_lags > 0) {
        path.erase(path.begin());
        path.push_back(fc.point[s]);
      }
    }
    out.model = update_history(current, actuals[i], mode);
    observed.push_back(actuals[i]);
  }
  return out;
}

ConformalCalibrator build_calibrator(std::span<const ResidualRecord> records, double alpha, std::size_t window,
                                     std::size_t steps, UncertaintyModel uncertainty) {
  ConformalCalibrator cal(alpha, window, steps, std::move(uncertainty));
  std::vector<const ResidualRecord*> ordered;
  for (const auto& r : records) {
    if (r.step <= steps) ordered.push_back(&r);
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ResidualRecord* a, const ResidualRecord* b) { return a->target < b->target; });
  for (const ResidualRecord* r : ordered) {
    const double u = cal.uncertainty()(std::span<const double>(r->lags).last(cal.uncertainty().lags()));
    cal.add_score(r->step, r->target, r->abs_residual / std::max(u, kUncertaintyFloor));
  }
  return cal;
}

LagMatrix residual_matrix(std::span<const ResidualRecord> records) {
  LagMatrix m;
  if (records.empty()) return m;
  m.lags = records.front().lags.size();
  for (const auto& r : records) {
    if (r.lags.size() != m.lags) throw std::invalid_argument("residual records have differing lag counts");
    m.features.insert(m.features.end(), r.lags.begin(), r.lags.end());
    m.targets.push_back(r.abs_residual);
    m.time_index.push_back(r.target);
  }
  return m;
}

std::string to_json(const IntervalForecast& iv) {
  auto finite_or_null = [](const std::vector<double>& v) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
    return arr;
  };
  Json j{{"lower", finite_or_null(iv.lower)},
         {"upper", finite_or_null(iv.upper)},
         {"alpha", iv.alpha},
         {"unbounded_flag", iv.unbounded},
         {"quantile", finite_or_null(iv.quantile)},
         {"scale", iv.scale}};
  return j.dump(2);
}

namespace {

Json calibrator_json(const ConformalCalibrator& cal) {
  Json buffers = Json::array();
  for (std::size_t s = 1; s <= cal.steps(); ++s) {
    Json entries = Json::array();
    for (const auto& e : cal.buffer(s)) entries.push_back(Json::array({e.t, e.score}));
    buffers.push_back(std::move(entries));
  }
  Json j{{"version", kSnapshotVersion},
         {"kind", "conformal_calibrator"},
         {"alpha", cal.alpha()},
         {"window", cal.window()},
         {"uncertainty", to_string(cal.uncertainty().mode())},
         {"buffers", std::move(buffers)}};
  if (const auto* m = cal.uncertainty().learned()) j["uncertainty_model"] = *m;
  return j;
}

ConformalCalibrator calibrator_from(const Json& j, double alpha) {
  UncertaintyModel u;
  if (uncertainty_mode_from_string(j.at("uncertainty").get<std::string>()) == UncertaintyMode::kLearned) {
    u = UncertaintyModel{std::make_shared<const OrderedGbdtModel>(j.at("uncertainty_model").get<OrderedGbdtModel>())};
  }
  const auto& buffers = j.at("buffers");
  ConformalCalibrator cal(alpha, j.at("window").get<std::size_t>(), buffers.size(), std::move(u));
  for (std::size_t s = 0; s < buffers.size(); ++s) {
    for (const auto& e : buffers[s]) cal.add_score(s + 1, e.at(0).get<std::size_t>(), e.at(1).get<double>());
  }
  return cal;
}

}  // namespace

std::string to_json(const ConformalCalibrator& cal) { return calibrator_json(cal).dump(2); }

ConformalCalibrator calibrator_from_json(const std::string& text) {
  const Json j = parse_versioned(text, "conformal_calibrator");
  if (j.value("kind", "") != "conformal_calibrator") throw std::invalid_argument("not a calibrator snapshot");
  return calibrator_from(j, j.at("alpha").get<double>());
}

ConformalCalibrator with_alpha(const ConformalCalibrator& cal, double alpha) {
  return calibrator_from(calibrator_json(cal), alpha);
}

}  // namespace wavecast
