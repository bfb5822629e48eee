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

#include "wavecast/eval.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "wavecast/hash.hpp"
#include "wavecast/json_io.hpp"

namespace wavecast {

double mase(std::span<const double> actuals, std::span<const double> forecasts, std::span<const double> train,
            std::size_t seasonality) {
  const std::size_t n = train.size();
  const std::size_t h = actuals.size();
  if (seasonality < 1 || n <= seasonality) throw std::invalid_argument("MASE needs N > s >= 1");
  if (h < 1 || forecasts.size() != h) throw std::invalid_argument("MASE needs equally long, non-empty test vectors");

  double denom = 0.0;
  for (std::size_t t = seasonality; t < n; ++t) denom += std::abs(train[t] - train[t - seasonality]);
  if (denom == 0.0) throw std::domain_error("MASE scale is zero: training series has no seasonal variation");
  double num = 0.0;
  for (std::size_t t = 0; t < h; ++t) num += std::abs(forecasts[t] - actuals[t]);
  return (static_cast<double>(n - seasonality) * num) / (static_cast<double>(h) * denom);
}

std::vector<double> seasonal_naive(std::span<const double> train, std::size_t seasonality, std::size_t horizon) {
  const std::size_t n = train.size();
  if (seasonality < 1 || n < seasonality) throw std::invalid_argument("seasonal naive needs N >= s >= 1");
  std::vector<double> out(horizon);
  for (std::size_t t = 0; t < horizon; ++t) out[t] = train[n - seasonality + t % seasonality];
  return out;
}

HorizonSpec horizon_from_label(const std::string& label) {
  for (std::size_t days : {1, 7, 14, 31}) {
    if (label == std::to_string(days) + "d") return HorizonSpec{label, days * 24};
  }
  throw std::invalid_argument("unknown horizon label: " + label + " (expected 1d, 7d, 14d or 31d)");
}

ModelSpec model_spec_from_name(const std::string& name, const WaveCatBoostConfig& config) {
  if (name == "wavecatboost") return ModelSpec{name, ModelKind::kWaveCatBoost, config};
  if (name == "plain-gbdt") return ModelSpec{name, ModelKind::kSeriesGbdt, config};
  if (name == "seasonal-naive") return ModelSpec{name, ModelKind::kSeasonalNaive, config};
  throw std::invalid_argument("unknown model: " + name);
}

const EvalCell* EvalReport::find(const std::string& model, const std::string& pollutant,
                                 const std::string& horizon) const {
  for (const auto& c : cells) {
    if (c.model == model && c.pollutant == pollutant && c.horizon == horizon) return &c;
  }
  return nullptr;
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "model,pollutant,horizon,mase\n";
  char buf[32];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%.17g", c.mase);
    out << c.model << ',' << c.pollutant << ',' << c.horizon << ',' << buf << '\n';
  }
  return out.str();
}

std::string EvalReport::to_json() const {
  Json j;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  Json cs = Json::array();
  for (const auto& c : cells) {
    cs.push_back(Json{{"model", c.model},
                      {"pollutant", c.pollutant},
                      {"horizon", c.horizon},
                      {"mase", c.mase},
                      {"snapshot_hash", c.snapshot_hash}});
  }
  j["cells"] = cs;
  Json ab = Json::array();
  for (const auto& a : absent) {
    ab.push_back(Json{{"model", a.model}, {"pollutant", a.pollutant}, {"horizon", a.horizon}, {"reason", a.reason}});
  }
  j["absent"] = ab;
  return j.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
  const Json j = Json::parse(text);
  EvalReport r;
  j.at("seed").get_to(r.seed);
  j.at("config_hash").get_to(r.config_hash);
  for (const auto& c : j.at("cells")) {
    r.cells.push_back(EvalCell{c.at("model"), c.at("pollutant"), c.at("horizon"), c.at("mase"), c.at("snapshot_hash")});
  }
  for (const auto& a : j.at("absent")) {
    r.absent.push_back(AbsentCell{a.at("model"), a.at("pollutant"), a.at("horizon"), a.at("reason")});
  }
  return r;
}

CellForecast forecast_cell(const ModelSpec& spec, const TimeSeries& train, std::size_t horizon,
                           std::uint64_t cell_seed, std::size_t seasonality) {
  CellForecast out;
  switch (spec.kind) {
    case ModelKind::kSeasonalNaive:
      out.forecast = seasonal_naive(train.values, seasonality, horizon);
      break;
    case ModelKind::kWaveCatBoost: {
      WaveCatBoostConfig cfg = spec.config;
      cfg.gbdt.seed = cell_seed;
      const WaveCatBoostModel model = fit_wavecatboost(train, cfg);
      out.snapshot_hash = hex64(fnv1a64(to_json(model)));
      out.forecast = forecast(model, horizon).point;
      break;
    }
    case ModelKind::kSeriesGbdt: {
      GbdtParams params = spec.config.gbdt;
      params.seed = cell_seed;
      const SeriesGbdtModel model = fit_series_gbdt(train, spec.config.lags, params);
      out.snapshot_hash = hex64(fnv1a64(to_json(*model.model)));
      out.forecast = forecast(model, horizon);
      break;
    }
  }
  return out;
}

EvalReport run_rolling_eval(const std::map<std::string, TimeSeries>& series, const std::vector<ModelSpec>& models,
                            const std::vector<std::string>& horizons, std::uint64_t seed,
                            const EvalOptions& options) {
  EvalReport report;
  report.seed = seed;
  report.config_hash = options.config_hash;
  const std::size_t s = options.seasonality;

  for (const auto& [pollutant, ts] : series) {
    for (const auto& label : horizons) {
      const HorizonSpec hz = horizon_from_label(label);
      for (const auto& spec : models) {
        const std::string key = spec.name + "|" + pollutant + "|" + label;
        auto mark_absent = [&](const std::string& why) {
          report.absent.push_back(AbsentCell{spec.name, pollutant, label, why});
        };
        const std::size_t min_train =
            spec.kind == ModelKind::kSeasonalNaive ? s + 1 : std::max(spec.config.lags + 9, s + 1);
        if (ts.size() < hz.steps + min_train) {
          mark_absent("series length " + std::to_string(ts.size()) + " < " + std::to_string(hz.steps + min_train));
          continue;
        }
        TimeSeries train = ts;
        train.values.resize(ts.size() - hz.steps);
        const std::span<const double> actual(ts.values.data() + train.size(), hz.steps);
        try {
          const CellForecast cf = forecast_cell(spec, train, hz.steps, derive_seed(seed, key), s);
          report.cells.push_back(
              EvalCell{spec.name, pollutant, label, mase(actual, cf.forecast, train.values, s), cf.snapshot_hash});
        } catch (const std::exception& e) {
          mark_absent(e.what());
        }
      }
    }
  }
  return report;
}

}  // namespace wavecast
